"""Image -> 26 logits, and the softmax that turns logits into probabilities.

Two classifiers share the same output contract: a template matcher over
16x16 occupancy grids, and a table of logits computed elsewhere (for
example by a fine-tuned vision model) loaded from JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import UPPERCASE
from .raster import BLACK, Bitmap

LABELS = UPPERCASE
N_LABELS = len(LABELS)
GRID = 16


class LogitsError(ValueError):
    pass


def softmax(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("softmax needs finite logits")
    e = np.exp(z - z.max())
    return e / e.sum()


def _edges(n_src: int, n_dst: int):
    for i in range(n_dst):
        lo = (i * n_src) // n_dst
        hi = max(((i + 1) * n_src) // n_dst, lo + 1)
        yield lo, hi


def downsample(image: Bitmap, size: int = GRID) -> np.ndarray:
    """Block-mean occupancy grid: a cell is set when at least half its pixels are black."""
    black = (image.pixels == BLACK).astype(np.float64)
    h, w = black.shape
    out = np.zeros((size, size), dtype=bool)
    for r, (r0, r1) in enumerate(_edges(h, size)):
        for c, (c0, c1) in enumerate(_edges(w, size)):
            out[r, c] = black[r0:r1, c0:c1].mean() >= 0.5
    return out


@dataclass(frozen=True, eq=False)
class TemplateSet:
    """Per-label stacks of 16x16 boolean grids, ``grids[label]`` of shape (n, 16, 16)."""

    grids: dict

    def __post_init__(self):
        missing = [ch for ch in LABELS if ch not in self.grids or len(self.grids[ch]) == 0]
        if missing:
            raise ValueError(f"no templates for {''.join(missing)}")

    @classmethod
    def from_images(cls, images: dict) -> "TemplateSet":
        """Build from ``{label: [Bitmap, ...]}``."""
        return cls({ch: np.stack([downsample(im) for im in ims]) for ch, ims in images.items()})

    def scores(self, grid: np.ndarray) -> np.ndarray:
        """Best matching-pixel fraction per label."""
        return np.array([(self.grids[ch] == grid).mean(axis=(1, 2)).max() for ch in LABELS])


def template_classify(image: Bitmap, templates: TemplateSet, alpha: float = 10.0) -> np.ndarray:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return alpha * templates.scores(downsample(image))


def _check_logits(key: str, values) -> np.ndarray:
    if not isinstance(values, list) or len(values) != N_LABELS:
        n = len(values) if isinstance(values, list) else type(values).__name__
        raise LogitsError(f"{key}: expected an array of {N_LABELS} numbers, got {n}")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise LogitsError(f"{key}: non-finite or non-numeric logit {v!r}")
        out.append(float(v))
    return np.array(out)


def load_external_logits(path) -> dict[str, np.ndarray]:
    """Read ``{image name: [26 logits]}`` from a JSON file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LogitsError(f"cannot read logits file {path}: {exc}") from exc
    try:
        # NaN/Infinity literals are parsed so they can be reported by key
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LogitsError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise LogitsError(f"{path}: top level must be an object")
    return {key: _check_logits(key, values) for key, values in data.items()}


class ExternalLogitsClassifier:
    """Look up precomputed logits by image identifier (e.g. ``"A/01.pgm"``)."""

    def __init__(self, table: dict[str, np.ndarray]):
        self.table = table

    @classmethod
    def from_file(cls, path) -> "ExternalLogitsClassifier":
        return cls(load_external_logits(path))

    def __call__(self, image: Bitmap, key: str) -> np.ndarray:
        try:
            return self.table[key]
        except KeyError:
            raise LogitsError(f"no logits for image {key!r}") from None


class TemplateClassifier:
    def __init__(self, templates: TemplateSet, alpha: float = 10.0):
        self.templates = templates
        self.alpha = alpha

    def __call__(self, image: Bitmap, key: str = "") -> np.ndarray:
        return template_classify(image, self.templates, self.alpha)
