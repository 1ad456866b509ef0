"""Experiment configuration, orchestration, and CSV reports.

Three run modes share one JSON config format (strict: unknown fields are
rejected).  Every replication's randomness derives only from
(base_seed, n, replication_index) through numpy's SeedSequence, so results
do not depend on scheduling and identical configs produce byte-identical
CSV output.
"""

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from dataclasses import dataclass, field

from .datasets import SyntheticModel, generate
from .estimator import evaluate_predictors, fit_gsir1, fit_gsir2
from .kernels import KernelSpec, median_bandwidth
from .metrics import max_canonical_correlation, subspace_distance
from .rates import fit_loglog_slope, optimal_rate_theory, rate_bound_terms
from .seqsim import (build_model, error_report, estimate_regression_ops,
                     simulate_sample, truncation_tail_fraction,
                     RESIDUAL_KINDS, S_KINDS)

SCHEMA_VERSION = 1
MODES = ("sim_rate", "kernel_recovery", "theory_table")

SLOPE_TOL = 0.08   # |fitted slope + exponent| allowed at the optimal delta
R2_MIN = 0.95      # minimum r^2 for a trustworthy slope


class ConfigError(ValueError):
    """A config document is malformed; messages name the offending field."""


@dataclass(frozen=True)
class SimModelParams:
    j_dim: int = 200
    y_dim: int = 2
    s_kind: str = "identity"
    residual_kind: str = "independent"
    alpha_u: float = 2.0


@dataclass(frozen=True)
class SimRateConfig:
    base_seed: int
    n_grid: tuple
    replications: int
    alpha: float
    beta: float
    deltas: tuple          # () means: use the theoretical optimum
    epsilon_constant: float
    model: SimModelParams
    output_path: str = ""
    mode: str = "sim_rate"


@dataclass(frozen=True)
class RecoveryConfig:
    base_seed: int
    n_grid: tuple
    replications: int
    dataset: SyntheticModel
    kernel_x: tuple        # (family, gamma-or-'median')
    kernel_y: tuple
    epsilon: float
    d: int
    n_test: int = 2000
    output_path: str = ""
    mode: str = "kernel_recovery"


@dataclass(frozen=True)
class TheoryConfig:
    grid: tuple            # ((alpha, beta), ...)
    n_ref: int = 10000
    epsilon_constant: float = 1.0
    output_path: str = ""
    mode: str = "theory_table"


@dataclass(frozen=True)
class SimRateRow:
    n: int
    rep: int
    delta: float
    epsilon: float
    record: object         # seqsim.ErrorRecord


@dataclass(frozen=True)
class RecoveryRow:
    n: int
    rep: int
    variant: str
    subspace_dist: float
    max_cancor: float
    eigenvalues: tuple


@dataclass(frozen=True)
class TheoryRow:
    alpha: float
    beta: float
    branch: str
    delta_opt: float
    exponent_opt: float
    rn_sum: float
    rnprime_sum: float


@dataclass(frozen=True)
class RateReport:
    mode: str
    rows: tuple
    summary: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# config parsing
# --------------------------------------------------------------------------

def _require(doc, key, where):
    if key not in doc:
        raise ConfigError(f"missing required field {key!r} in {where}")
    return doc[key]


def _reject_unknown(doc, allowed, where):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown field(s) {unknown} in {where}; "
                          f"allowed: {sorted(allowed)}")


def _as_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field {name!r} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"field {name!r} must be >= {minimum}, got {value}")
    return value


def _as_real(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {name!r} must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"field {name!r} must be positive, got {value}")
    return float(value)


def _as_n_grid(value):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"field 'n_grid' must be a nonempty list, got {value!r}")
    grid = tuple(_as_int(v, "n_grid entry", minimum=10) for v in value)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"field 'n_grid' must be strictly increasing, got {list(grid)}")
    return grid


def _as_deltas(value):
    if value == "optimal":
        return ()
    if isinstance(value, list):
        vals = value
    else:
        vals = [value]
    out = []
    for v in vals:
        v = _as_real(v, "delta")
        if not 0 < v < 1:
            raise ConfigError(f"field 'delta' values must lie in (0, 1), got {v}")
        out.append(v)
    if not out:
        raise ConfigError("field 'delta' must not be an empty list")
    return tuple(out)


def _as_kernel(doc, name):
    if not isinstance(doc, dict):
        raise ConfigError(f"field {name!r} must be an object, got {doc!r}")
    _reject_unknown(doc, ("family", "gamma"), name)
    family = _require(doc, "family", name)
    if family not in ("gaussian", "laplace", "linear"):
        raise ConfigError(f"field '{name}.family' must be one of gaussian/laplace/"
                          f"linear, got {family!r}")
    gamma = doc.get("gamma", "median")
    if gamma != "median":
        gamma = _as_real(gamma, f"{name}.gamma", positive=True)
    return (family, gamma)


def parse_config(doc):
    """Validate a parsed JSON document and build the typed config."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    version = _require(doc, "schema_version", "config")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; "
                          f"expected {SCHEMA_VERSION}")
    mode = _require(doc, "mode", "config")
    if mode not in MODES:
        raise ConfigError(f"field 'mode' must be one of {MODES}, got {mode!r}")
    if mode == "sim_rate":
        return _parse_sim_rate(doc)
    if mode == "kernel_recovery":
        return _parse_recovery(doc)
    return _parse_theory(doc)


def _parse_sim_rate(doc):
    allowed = ("schema_version", "mode", "base_seed", "n_grid", "replications",
               "alpha", "beta", "delta", "epsilon_constant", "model",
               "output_path")
    _reject_unknown(doc, allowed, "sim_rate config")
    model_doc = doc.get("model", {})
    if not isinstance(model_doc, dict):
        raise ConfigError(f"field 'model' must be an object, got {model_doc!r}")
    _reject_unknown(model_doc, ("j_dim", "y_dim", "s_kind", "residual_kind",
                                "alpha_u"), "model section")
    s_kind = model_doc.get("s_kind", "identity")
    if s_kind not in S_KINDS:
        raise ConfigError(f"field 'model.s_kind' must be one of {S_KINDS}, "
                          f"got {s_kind!r}")
    residual_kind = model_doc.get("residual_kind", "independent")
    if residual_kind not in RESIDUAL_KINDS:
        raise ConfigError(f"field 'model.residual_kind' must be one of "
                          f"{RESIDUAL_KINDS}, got {residual_kind!r}")
    model = SimModelParams(
        j_dim=_as_int(model_doc.get("j_dim", 200), "model.j_dim", minimum=1),
        y_dim=_as_int(model_doc.get("y_dim", 2), "model.y_dim", minimum=1),
        s_kind=s_kind,
        residual_kind=residual_kind,
        alpha_u=_as_real(model_doc.get("alpha_u", 2.0), "model.alpha_u"),
    )
    if not model.alpha_u > 1:
        raise ConfigError(f"field 'model.alpha_u' must exceed 1, got {model.alpha_u}")
    alpha = _as_real(_require(doc, "alpha", "sim_rate config"), "alpha")
    if not alpha > 1:
        raise ConfigError(f"field 'alpha' must exceed 1, got {alpha}")
    beta = _as_real(_require(doc, "beta", "sim_rate config"), "beta", positive=True)
    return SimRateConfig(
        base_seed=_as_int(_require(doc, "base_seed", "sim_rate config"),
                          "base_seed", minimum=0),
        n_grid=_as_n_grid(_require(doc, "n_grid", "sim_rate config")),
        replications=_as_int(_require(doc, "replications", "sim_rate config"),
                             "replications", minimum=1),
        alpha=alpha, beta=beta,
        deltas=_as_deltas(doc.get("delta", "optimal")),
        epsilon_constant=_as_real(doc.get("epsilon_constant", 1.0),
                                  "epsilon_constant", positive=True),
        model=model,
        output_path=str(doc.get("output_path", "")),
    )


def _parse_recovery(doc):
    allowed = ("schema_version", "mode", "base_seed", "n_grid", "replications",
               "dataset", "kernel_x", "kernel_y", "epsilon", "d", "n_test",
               "output_path")
    _reject_unknown(doc, allowed, "kernel_recovery config")
    ds = _require(doc, "dataset", "kernel_recovery config")
    if not isinstance(ds, dict):
        raise ConfigError(f"field 'dataset' must be an object, got {ds!r}")
    _reject_unknown(ds, ("model", "p", "sigma_noise"), "dataset section")
    try:
        dataset = SyntheticModel(
            name=str(_require(ds, "model", "dataset section")),
            p=_as_int(_require(ds, "p", "dataset section"), "dataset.p", minimum=1),
            sigma_noise=_as_real(_require(ds, "sigma_noise", "dataset section"),
                                 "dataset.sigma_noise"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid dataset section: {exc}") from exc
    n_grid = _as_n_grid(_require(doc, "n_grid", "kernel_recovery config"))
    d = _as_int(_require(doc, "d", "kernel_recovery config"), "d", minimum=1)
    if d > min(n_grid) - 1:
        raise ConfigError(f"field 'd' must be at most min(n_grid) - 1 = "
                          f"{min(n_grid) - 1}, got {d}")
    return RecoveryConfig(
        base_seed=_as_int(_require(doc, "base_seed", "kernel_recovery config"),
                          "base_seed", minimum=0),
        n_grid=n_grid,
        replications=_as_int(_require(doc, "replications", "kernel_recovery config"),
                             "replications", minimum=1),
        dataset=dataset,
        kernel_x=_as_kernel(doc.get("kernel_x", {"family": "gaussian"}), "kernel_x"),
        kernel_y=_as_kernel(doc.get("kernel_y", {"family": "gaussian"}), "kernel_y"),
        epsilon=_as_real(_require(doc, "epsilon", "kernel_recovery config"),
                         "epsilon", positive=True),
        d=d,
        n_test=_as_int(doc.get("n_test", 2000), "n_test", minimum=2),
        output_path=str(doc.get("output_path", "")),
    )


def _parse_theory(doc):
    allowed = ("schema_version", "mode", "grid", "n_ref", "epsilon_constant",
               "output_path")
    _reject_unknown(doc, allowed, "theory_table config")
    raw = _require(doc, "grid", "theory_table config")
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"field 'grid' must be a nonempty list of [alpha, beta] "
                          f"pairs, got {raw!r}")
    grid = []
    for item in raw:
        if not isinstance(item, list) or len(item) != 2:
            raise ConfigError(f"each 'grid' entry must be an [alpha, beta] pair, "
                              f"got {item!r}")
        a = _as_real(item[0], "grid alpha")
        b = _as_real(item[1], "grid beta", positive=True)
        if not a > 1:
            raise ConfigError(f"grid alpha values must exceed 1, got {a}")
        grid.append((a, b))
    return TheoryConfig(
        grid=tuple(grid),
        n_ref=_as_int(doc.get("n_ref", 10000), "n_ref", minimum=2),
        epsilon_constant=_as_real(doc.get("epsilon_constant", 1.0),
                                  "epsilon_constant", positive=True),
        output_path=str(doc.get("output_path", "")),
    )


def load_config(path):
    """Read and validate a JSON config file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


# --------------------------------------------------------------------------
# seeding and scheduling
# --------------------------------------------------------------------------

def derive_seed(base_seed, n, rep):
    """Splittable per-replication seed from (base_seed, n, rep) only."""
    return np.random.SeedSequence((base_seed, n, rep))


def _run_tasks(fn, tasks, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# --------------------------------------------------------------------------
# runners
# --------------------------------------------------------------------------

def run_sim_rate(config, threads=1):
    """Simulate, estimate at epsilon = c * n^-delta, and report errors.

    One population model serves every replication; each (n, rep) sample is
    simulated once and estimated at every delta in the grid.
    """
    theory = optimal_rate_theory(config.alpha, config.beta)
    deltas = config.deltas if config.deltas else (theory.delta_opt,)
    model = build_model(config.model.j_dim, config.model.y_dim, config.alpha,
                        config.beta, seed=config.base_seed,
                        s_kind=config.model.s_kind,
                        alpha_u=config.model.alpha_u)

    def one(task):
        n, rep = task
        sample = simulate_sample(model, n, derive_seed(config.base_seed, n, rep),
                                 residual_kind=config.model.residual_kind)
        out = []
        for delta in deltas:
            eps = config.epsilon_constant * float(n) ** -delta
            rec = error_report(model, estimate_regression_ops(sample, eps))
            out.append(SimRateRow(n=n, rep=rep, delta=delta, epsilon=eps,
                                  record=rec))
        return out

    tasks = [(n, rep) for n in config.n_grid for rep in range(config.replications)]
    rows = [row for chunk in _run_tasks(one, tasks, threads) for row in chunk]
    rows.sort(key=lambda r: (r.n, r.rep, r.delta))

    summary = {
        "alpha": config.alpha,
        "beta": config.beta,
        "branch": theory.branch,
        "delta_opt": theory.delta_opt,
        "exponent_opt": theory.exponent_opt,
        "tail_fraction": truncation_tail_fraction(config.alpha,
                                                  config.model.j_dim),
        "by_delta": [],
    }
    for delta in deltas:
        med = {"delta": delta}
        for name in ("err_r1", "err_r2", "err_m", "eta_span_err"):
            med[f"median_{name}"] = {
                n: float(np.median([getattr(r.record, name) for r in rows
                                    if r.n == n and r.delta == delta]))
                for n in config.n_grid
            }
        if len(config.n_grid) >= 3:
            for name in ("err_r1", "err_r2", "err_m", "eta_span_err"):
                vals = [med[f"median_{name}"][n] for n in config.n_grid]
                fitline = fit_loglog_slope(config.n_grid, vals)
                med[f"slope_{name}"] = fitline.slope
                med[f"r2_{name}"] = fitline.r_squared
            med["slope_within_tolerance"] = bool(
                abs(med["slope_err_r1"] + theory.exponent_opt) <= SLOPE_TOL
                and med["r2_err_r1"] >= R2_MIN)
        summary["by_delta"].append(med)
    if len(deltas) > 1:
        summary["argmin_delta_by_n"] = {
            n: min(deltas, key=lambda d: next(
                m for m in summary["by_delta"] if m["delta"] == d
            )[f"median_err_r1"][n])
            for n in config.n_grid
        }
    report = RateReport(mode="sim_rate", rows=tuple(rows), summary=summary)
    if config.output_path:
        with open(config.output_path, "w", newline="") as fh:
            fh.write(sim_rate_csv(report))
    return report


def _resolve_kernel(spec, points):
    family, gamma = spec
    if gamma == "median":
        if family == "linear":
            return KernelSpec("linear")
        return KernelSpec(family, median_bandwidth(points))
    return KernelSpec(family, gamma)


def run_kernel_recovery(config, threads=1):
    """Fit both variants on synthetic draws and score recovery of the truth.

    Each replication spawns two child seeds (train, test) from its
    SeedSequence; fitted predictors are evaluated at the held-out test design
    and compared to the true predictor values there.
    """
    dataset = config.dataset

    def one(task):
        n, rep = task
        train_seed, test_seed = derive_seed(config.base_seed, n, rep).spawn(2)
        x, y, _ = generate(dataset, n, train_seed)
        x_test, _, f_test = generate(dataset, config.n_test, test_seed)
        kx = _resolve_kernel(config.kernel_x, x)
        ky = _resolve_kernel(config.kernel_y, y)
        out = []
        for variant, fit_fn in (("gsir1", fit_gsir1), ("gsir2", fit_gsir2)):
            fit = fit_fn(x, y, kx, ky, config.epsilon, config.d)
            pred = evaluate_predictors(fit, x_test)
            out.append(RecoveryRow(
                n=n, rep=rep, variant=variant,
                subspace_dist=subspace_distance(pred, f_test),
                max_cancor=max_canonical_correlation(pred, f_test),
                eigenvalues=tuple(float(v) for v in fit.eigenvalues)))
        return out

    tasks = [(n, rep) for n in config.n_grid for rep in range(config.replications)]
    rows = [row for chunk in _run_tasks(one, tasks, threads) for row in chunk]
    rows.sort(key=lambda r: (r.n, r.rep, r.variant))

    summary = {"by_variant": {}}
    for variant in ("gsir1", "gsir2"):
        med_cancor = {n: float(np.median([r.max_cancor for r in rows
                                          if r.n == n and r.variant == variant]))
                      for n in config.n_grid}
        med_dist = {n: float(np.median([r.subspace_dist for r in rows
                                        if r.n == n and r.variant == variant]))
                    for n in config.n_grid}
        cvals = [med_cancor[n] for n in config.n_grid]
        summary["by_variant"][variant] = {
            "median_max_cancor": med_cancor,
            "median_subspace_dist": med_dist,
            "cancor_monotone_nondecreasing": bool(
                all(b >= a for a, b in zip(cvals, cvals[1:]))),
        }
    report = RateReport(mode="kernel_recovery", rows=tuple(rows), summary=summary)
    if config.output_path:
        with open(config.output_path, "w", newline="") as fh:
            fh.write(kernel_recovery_csv(report))
    return report


def run_theory_table(config):
    """Tabulate optimal exponents and bound sums over an (alpha, beta) grid."""
    rows = []
    for alpha, beta in config.grid:
        th = optimal_rate_theory(alpha, beta)
        eps = config.epsilon_constant * float(config.n_ref) ** -th.delta_opt
        if not 0 < eps < 1:
            raise ConfigError(
                f"epsilon_constant {config.epsilon_constant} with n_ref "
                f"{config.n_ref} gives epsilon {eps:.3g} outside (0, 1) at "
                f"alpha={alpha}, beta={beta}")
        _, rn = rate_bound_terms(config.n_ref, eps, alpha, beta, "gsir1")
        _, rnp = rate_bound_terms(config.n_ref, eps, alpha, beta, "gsir2")
        rows.append(TheoryRow(alpha=alpha, beta=beta, branch=th.branch,
                              delta_opt=th.delta_opt,
                              exponent_opt=th.exponent_opt,
                              rn_sum=rn, rnprime_sum=rnp))
    report = RateReport(mode="theory_table", rows=tuple(rows),
                        summary={"n_ref": config.n_ref,
                                 "epsilon_constant": config.epsilon_constant})
    if config.output_path:
        with open(config.output_path, "w", newline="") as fh:
            fh.write(theory_table_csv(report))
    return report


def run_experiment(config, threads=1):
    """Dispatch on config mode."""
    if config.mode == "sim_rate":
        return run_sim_rate(config, threads=threads)
    if config.mode == "kernel_recovery":
        return run_kernel_recovery(config, threads=threads)
    return run_theory_table(config)


# --------------------------------------------------------------------------
# CSV emission
# --------------------------------------------------------------------------

def _f(x):
    return format(float(x), ".17g")


def sim_rate_csv(report):
    """CSV text: n,rep,epsilon,err_r1,err_r2,err_m,proj_err_1..d,bound_ok_1..d."""
    if not report.rows:
        raise ValueError("report has no rows")
    d = report.rows[0].record.d
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = (["n", "rep", "epsilon", "err_r1", "err_r2", "err_m"]
              + [f"proj_err_{j + 1}" for j in range(d)]
              + [f"bound_ok_{j + 1}" for j in range(d)])
    writer.writerow(header)
    for row in report.rows:
        rec = row.record
        cells = [str(row.n), str(row.rep), _f(row.epsilon), _f(rec.err_r1),
                 _f(rec.err_r2), _f(rec.err_m)]
        cells += [_f(v) for v in rec.proj_err]
        cells += [("1" if ok else "0") if app else "na"
                  for ok, app in zip(rec.bound_ok, rec.bound_applicable)]
        writer.writerow(cells)
    return buf.getvalue()


def kernel_recovery_csv(report):
    """CSV text: n,rep,variant,subspace_dist,max_cancor,eig_1..d."""
    if not report.rows:
        raise ValueError("report has no rows")
    d = len(report.rows[0].eigenvalues)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "rep", "variant", "subspace_dist", "max_cancor"]
                    + [f"eig_{j + 1}" for j in range(d)])
    for row in report.rows:
        writer.writerow([str(row.n), str(row.rep), row.variant,
                         _f(row.subspace_dist), _f(row.max_cancor)]
                        + [_f(v) for v in row.eigenvalues])
    return buf.getvalue()


def theory_table_csv(report):
    """CSV text: alpha,beta,branch,delta_opt,exponent_opt,rn_sum,rnprime_sum."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "beta", "branch", "delta_opt", "exponent_opt",
                     "rn_sum", "rnprime_sum"])
    for row in report.rows:
        writer.writerow([_f(row.alpha), _f(row.beta), row.branch,
                         _f(row.delta_opt), _f(row.exponent_opt),
                         _f(row.rn_sum), _f(row.rnprime_sum)])
    return buf.getvalue()
