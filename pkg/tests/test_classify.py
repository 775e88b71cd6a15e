import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbeval.classify import (
    LABELS,
    ExternalLogitsClassifier,
    LogitsError,
    TemplateClassifier,
    TemplateSet,
    downsample,
    load_external_logits,
    softmax,
    template_classify,
)
from sbeval.core import UPPERCASE, GridConfig, Level
from sbeval.fixtures import character_program, default_templates
from sbeval.levelgen import settle
from sbeval.raster import Bitmap, rasterize

finite = st.floats(-50, 50, allow_nan=False)


def test_uniform_softmax():
    assert np.allclose(softmax(np.full(26, 3.0)), 1 / 26, atol=1e-12)


def test_two_way_softmax_closed_form():
    z = [math.log(3), math.log(1)] + [-1e9] * 24
    p = softmax(z)
    assert abs(p[0] - 0.75) < 1e-9 and abs(p[1] - 0.25) < 1e-9


@given(st.lists(finite, min_size=26, max_size=26), finite)
def test_softmax_properties(z, shift):
    p = softmax(z)
    assert abs(p.sum() - 1) < 1e-9
    assert np.all(p > 0)
    assert np.allclose(softmax(np.array(z) + shift), p, rtol=1e-9, atol=1e-15)


def test_softmax_rejects_nan():
    with pytest.raises(ValueError):
        softmax([0.0, float("nan")])


def test_downsample_threshold_and_edges():
    # 32x32 with the left half black: each destination cell averages a 2x2 block
    pix = np.full((32, 32), 255, np.uint8)
    pix[:, :16] = 0
    grid = downsample(Bitmap(pix))
    assert grid[:, :8].all() and not grid[:, 8:].any()
    # smaller than 16: every destination cell still reads one source pixel
    tiny = downsample(Bitmap(np.zeros((3, 3), np.uint8)))
    assert tiny.shape == (16, 16) and tiny.all()


def test_self_classification_all_letters():
    templates = default_templates()
    for ch in UPPERCASE:
        image = rasterize(settle(character_program(ch)).level)
        logits = template_classify(image, templates)
        assert LABELS[int(np.argmax(logits))] == ch
        assert logits[LABELS.index(ch)] == 10.0


def test_identical_templates_give_uniform_logits():
    blank = rasterize(Level(GridConfig(), ()))
    templates = TemplateSet.from_images({ch: [blank] for ch in LABELS})
    logits = template_classify(blank, templates)
    assert np.all(logits == logits[0])


def test_alpha_scales_logits():
    image = rasterize(settle(character_program("Q")).level)
    t = default_templates()
    a, b = template_classify(image, t, 10), template_classify(image, t, 20)
    assert np.allclose(b, 2 * a) and np.argmax(a) == np.argmax(b)
    with pytest.raises(ValueError):
        template_classify(image, t, 0)


def test_template_classifier_callable():
    image = rasterize(settle(character_program("K")).level)
    assert np.array_equal(TemplateClassifier(default_templates())(image, "K/01.pgm"),
                          template_classify(image, default_templates()))


def test_external_logits(tmp_path):
    path = tmp_path / "logits.json"
    path.write_text(json.dumps({"A/1.pgm": [0] * 26}))
    table = load_external_logits(path)
    assert list(table) == ["A/1.pgm"]
    assert np.allclose(softmax(table["A/1.pgm"]), 1 / 26)
    clf = ExternalLogitsClassifier(table)
    assert clf(None, "A/1.pgm").shape == (26,)
    with pytest.raises(LogitsError):
        clf(None, "B/1.pgm")


@pytest.mark.parametrize("payload", [
    {"A/1.pgm": [0] * 25},
    {"A/1.pgm": [0] * 25 + ["NaN"]},
    {"A/1.pgm": [0] * 25 + [True]},
    [[0] * 26],
])
def test_external_logits_rejections(tmp_path, payload):
    path = tmp_path / "logits.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(LogitsError):
        load_external_logits(path)


def test_external_logits_nan_literal(tmp_path):
    path = tmp_path / "logits.json"
    path.write_text('{"Q/3.pgm": [' + ", ".join(["0"] * 25 + ["NaN"]) + "]}")
    with pytest.raises(LogitsError, match="Q/3.pgm"):
        load_external_logits(path)
    with pytest.raises(LogitsError):
        load_external_logits(tmp_path / "missing.json")
