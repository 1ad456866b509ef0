"""JSON persistence for fitted models.

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly, so save -> load -> predict reproduces predictions
bit-for-bit.
"""

import json

import numpy as np

from .estimator import GsirFit, VARIANTS
from .kernels import KernelSpec

FORMAT_VERSION = 1


def _emit(obj):
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_emit(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _matrix(a):
    return [[float(v) for v in row] for row in np.asarray(a, dtype=float)]


def fit_to_json(fit):
    """Serialize a fitted model to a JSON string."""
    doc = {
        "version": FORMAT_VERSION,
        "variant": fit.variant,
        "kernel_x": {"family": fit.kernel_x.family, "gamma": float(fit.kernel_x.gamma)},
        "kernel_y": {"family": fit.kernel_y.family, "gamma": float(fit.kernel_y.gamma)},
        "epsilon": float(fit.epsilon),
        "d": int(fit.d),
        "train_points": _matrix(fit.train_points),
        "coefficients": _matrix(fit.coefficients),
        "eigenvalues": [float(v) for v in fit.eigenvalues],
    }
    return _emit(doc)


def save_fit(fit, path):
    with open(path, "w") as fh:
        fh.write(fit_to_json(fit))
        fh.write("\n")


def fit_from_json(text):
    """Rebuild a GsirFit from its JSON form."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("model document must be a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {version!r}; "
                         f"expected {FORMAT_VERSION}")
    required = {"version", "variant", "kernel_x", "kernel_y", "epsilon", "d",
                "train_points", "coefficients", "eigenvalues"}
    missing = required - doc.keys()
    if missing:
        raise ValueError(f"model document is missing fields: {sorted(missing)}")
    unknown = doc.keys() - required
    if unknown:
        raise ValueError(f"model document has unknown fields: {sorted(unknown)}")
    if doc["variant"] not in VARIANTS:
        raise ValueError(f"unknown variant {doc['variant']!r}")
    kx = KernelSpec(doc["kernel_x"]["family"], float(doc["kernel_x"]["gamma"]))
    ky = KernelSpec(doc["kernel_y"]["family"], float(doc["kernel_y"]["gamma"]))
    train = np.asarray(doc["train_points"], dtype=float)
    coef = np.asarray(doc["coefficients"], dtype=float)
    eig = np.asarray(doc["eigenvalues"], dtype=float)
    d = int(doc["d"])
    if train.ndim != 2 or coef.ndim != 2:
        raise ValueError("train_points and coefficients must be 2-d arrays")
    if coef.shape != (train.shape[0], d) or eig.shape != (d,):
        raise ValueError(f"inconsistent shapes: train {train.shape}, "
                         f"coefficients {coef.shape}, eigenvalues {eig.shape}, d={d}")
    return GsirFit(variant=doc["variant"], train_points=train, kernel_x=kx,
                   kernel_y=ky, epsilon=float(doc["epsilon"]), d=d,
                   coefficients=coef, eigenvalues=eig, warnings=())


def load_fit(path):
    with open(path) as fh:
        return fit_from_json(fh.read())
