import json

import numpy as np
import pytest

from gsir.estimator import evaluate_predictors, fit_gsir1, fit_gsir2
from gsir.kernels import KernelSpec
from gsir.modelio import fit_from_json, fit_to_json, load_fit, save_fit

GAUSS = KernelSpec("gaussian", 0.7)


def make_fit(seed=0, variant=1):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((20, 2))
    y = np.cos(x[:, :1]) + 0.05 * rng.standard_normal((20, 1))
    fit_fn = fit_gsir1 if variant == 1 else fit_gsir2
    return fit_fn(x, y, GAUSS, KernelSpec("gaussian", 1.3), 0.05, 2)


@pytest.mark.parametrize("variant", [1, 2])
def test_roundtrip_preserves_fields(variant):
    fit = make_fit(variant=variant)
    back = fit_from_json(fit_to_json(fit))
    assert back.variant == fit.variant
    assert back.kernel_x == fit.kernel_x
    assert back.kernel_y == fit.kernel_y
    assert back.epsilon == fit.epsilon
    assert back.d == fit.d
    assert np.array_equal(back.train_points, fit.train_points)
    assert np.array_equal(back.coefficients, fit.coefficients)
    assert np.array_equal(back.eigenvalues, fit.eigenvalues)


def test_roundtrip_preserves_predictions(tmp_path):
    fit = make_fit(seed=3)
    path = tmp_path / "model.json"
    save_fit(fit, path)
    back = load_fit(path)
    rng = np.random.default_rng(4)
    x_new = rng.standard_normal((15, 2))
    assert np.array_equal(evaluate_predictors(back, x_new),
                          evaluate_predictors(fit, x_new))


def test_document_is_json_with_expected_fields(tmp_path):
    fit = make_fit(seed=5)
    path = tmp_path / "model.json"
    save_fit(fit, path)
    text = path.read_text()
    assert text.endswith("\n")
    doc = json.loads(text)
    assert set(doc) == {"version", "variant", "kernel_x", "kernel_y", "epsilon",
                        "d", "train_points", "coefficients", "eigenvalues"}
    assert doc["version"] == 1
    assert doc["variant"] == "gsir1"
    assert doc["kernel_x"] == {"family": "gaussian", "gamma": 0.7}


def test_floats_are_written_in_full_precision():
    fit = make_fit(seed=6)
    text = fit_to_json(fit)
    value = fit.coefficients[0, 0]
    assert format(value, ".17g") in text


def test_version_mismatch_rejected():
    fit = make_fit(seed=7)
    doc = json.loads(fit_to_json(fit))
    doc["version"] = 99
    with pytest.raises(ValueError, match="version"):
        fit_from_json(json.dumps(doc))


def test_missing_field_rejected():
    doc = json.loads(fit_to_json(make_fit(seed=8)))
    del doc["eigenvalues"]
    with pytest.raises(ValueError, match="missing"):
        fit_from_json(json.dumps(doc))


def test_unknown_field_rejected():
    doc = json.loads(fit_to_json(make_fit(seed=9)))
    doc["comment"] = "hello"
    with pytest.raises(ValueError, match="unknown"):
        fit_from_json(json.dumps(doc))


def test_inconsistent_shapes_rejected():
    doc = json.loads(fit_to_json(make_fit(seed=10)))
    doc["eigenvalues"] = [1.0, 0.5, 0.1]
    with pytest.raises(ValueError, match="shapes"):
        fit_from_json(json.dumps(doc))


def test_unknown_variant_rejected():
    doc = json.loads(fit_to_json(make_fit(seed=11)))
    doc["variant"] = "gsir9"
    with pytest.raises(ValueError, match="variant"):
        fit_from_json(json.dumps(doc))


def test_non_object_document_rejected():
    with pytest.raises(ValueError, match="object"):
        fit_from_json("[1, 2, 3]")
