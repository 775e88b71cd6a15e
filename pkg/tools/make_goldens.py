"""Regenerate golden files. Only run after a deliberate output change."""

import shutil
import tempfile
from pathlib import Path

from sbeval.config import load_config
from sbeval.fixtures import character_program, fixture_path
from sbeval.levelgen import settle
from sbeval.pipeline import Workspace, run_all
from sbeval.raster import encode_pgm, rasterize
from sbeval.xml_codec import level_to_xml


def main():
    golden = fixture_path("golden")
    golden.mkdir(exist_ok=True)
    level = settle(character_program("A")).level
    (golden / "demo_level_A.xml").write_text(level_to_xml(level), newline="\n")
    (golden / "demo_level_A.pgm").write_bytes(encode_pgm(rasterize(level)))
    with tempfile.TemporaryDirectory() as tmp:
        ws_root = Path(tmp) / "ws"
        shutil.copytree(fixture_path("demo_workspace"), ws_root)
        run_all(Workspace(ws_root, load_config(ws_root / "demo.toml")))
        out = golden / "demo"
        out.mkdir(exist_ok=True)
        for name in ("ranking.csv", "ranking.md"):
            shutil.copy(ws_root / "report" / name, out / name)


if __name__ == "__main__":
    main()
