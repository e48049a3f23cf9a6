"""Parameter sweeps, per-point optimizers and machine-readable results.

A sweep is described by a :class:`SweepConfig` (usually loaded from JSON).
Every grid point runs the same pipeline: build the source model, evaluate
its spectra at mirrored probe detunings, map them onto the equivalent
two-mode-squeezed reservoir and report the requested figures of merit.

Rates and frequencies are dimensionless multiples of the reference rate of
the config (``kappa``, ``gamma0`` or ``g``), which is fixed to one unless set
explicitly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import __version__
from .entangle import cd_from_spectra
from .gaussian import (gaussian_correlation_set, log_negativity, moments_from_state,
                       steady_second_moments)
from .liouville import correlation_set
from .models import (CavityParams, MemoryGuardError, TlsParams, bogoliubov_weak_coupling,
                     dressed_rwa, qms_quadratic, resolved_purcell, tls_two_cavities)
from .network import NetworkParams, analyze_network, optimize_network

MODELS = ("bare-tls", "full-cavity", "dressed-rwa", "purcell", "qms", "bogoliubov", "network")
CAVITY_MODELS = ("full-cavity", "dressed-rwa", "purcell", "qms", "bogoliubov")
EXACT_CAVITY_MODELS = ("full-cavity", "dressed-rwa", "bogoliubov")
PARAMETERS = ("delta0", "omega0", "omega_tilde", "theta", "gamma0", "kappa", "gamma_phi",
              "g", "delta_c", "delta_q", "gamma", "C", "secular")
REFERENCES = ("kappa", "gamma0", "g")
DEFAULT_REFERENCE = {"bare-tls": "kappa", "full-cavity": "kappa", "dressed-rwa": "gamma0",
                     "purcell": "kappa", "qms": "gamma0", "bogoliubov": "g",
                     "network": "kappa"}
OPTIMIZABLE = ("theta", "delta_q", "omega0")

SPECTRAL_OUTPUTS = ("Cd", "r_eff", "mu_eff", "N1", "N2", "absM", "Theta")
OUTPUTS = SPECTRAL_OUTPUTS + ("EN", "concurrences", "coherences")
WEAK_COUPLING_OUTPUTS = ("r_theta", "g_tms", "Gamma_theta", "N_th")
CONCURRENCE_COLUMNS = ("C01", "C02", "C12")
COHERENCE_COLUMNS = ("coh_gg_ee_12", "coh_eg_ge_12", "coh_gg_ee_01", "coh_eg_ge_01")

DEFAULT_N_FOCK = {"full-cavity": 3, "dressed-rwa": 20, "bogoliubov": 12}
FOCK_START = 3
FOCK_CAP = 24
FOCK_TOL = 1e-3

SIG_DIGITS = 12
WORKERS_ENV = "CASCADE_LAB_WORKERS"


class ConfigError(ValueError):
    """Invalid sweep configuration; ``errors`` lists field-level messages."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class PointError(RuntimeError):
    """A grid point could not be evaluated."""


# --- configuration ------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"
    label: str | None = None

    @property
    def column(self) -> str:
        return self.label or self.name

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class OptimizerSettings:
    coarse: int = 41
    coarse_2d: int = 11
    tol: float = 1e-4
    bounds: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepConfig:
    model: str
    fixed: dict = field(default_factory=dict)
    axes: tuple = ()
    optimize_over: tuple = ()
    outputs: tuple = ("Cd",)
    n_fock: int | None = None
    seed: int = 0
    reference: str | None = None
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    name: str = "sweep"

    @property
    def reference_rate(self) -> str:
        return self.reference or DEFAULT_REFERENCE[self.model]

    def columns(self) -> list[str]:
        cols = [a.column for a in self.axes]
        cols += [opt_column(p) for p in self.optimize_over]
        for out in self.outputs:
            if out == "concurrences":
                cols += CONCURRENCE_COLUMNS
            elif out == "coherences":
                cols += COHERENCE_COLUMNS
            else:
                cols.append(out)
        return cols + ["status"]

    def to_dict(self) -> dict:
        d = {"name": self.name, "model": self.model, "reference": self.reference_rate,
             "fixed": dict(self.fixed), "axes": [asdict(a) for a in self.axes],
             "optimize_over": list(self.optimize_over), "outputs": list(self.outputs),
             "n_fock": self.n_fock, "seed": self.seed,
             "optimizer": asdict(self.optimizer)}
        return d


def opt_column(name: str) -> str:
    return name.replace("_", "") + "_star"


CONFIG_SCHEMA = {
    "type": "object",
    "required": ["model"],
    "properties": {
        "name": {"type": "string"},
        "model": {"enum": list(MODELS)},
        "reference": {"enum": list(REFERENCES)},
        "fixed": {"type": "object", "propertyNames": {"enum": list(PARAMETERS)},
                  "additionalProperties": {"type": "number"}},
        "axes": {"type": "array", "minItems": 0, "maxItems": 2, "items": {
            "type": "object", "required": ["name", "min", "max", "count"],
            "properties": {"name": {"enum": list(PARAMETERS)}, "min": {"type": "number"},
                           "max": {"type": "number"}, "count": {"type": "integer", "minimum": 1},
                           "scale": {"enum": ["linear", "log"]},
                           "label": {"type": "string"}}}},
        "optimize_over": {"type": "array", "items": {"enum": list(OPTIMIZABLE)}, "maxItems": 2},
        "outputs": {"type": "array", "minItems": 1,
                    "items": {"enum": list(OUTPUTS + WEAK_COUPLING_OUTPUTS)}},
        "n_fock": {"type": ["integer", "null"], "minimum": 2},
        "seed": {"type": "integer"},
        "optimizer": {"type": "object", "properties": {
            "coarse": {"type": "integer", "minimum": 3},
            "coarse_2d": {"type": "integer", "minimum": 3},
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "bounds": {"type": "object"}}},
    },
    "additionalProperties": False,
}


def _num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def parse_config(raw: dict) -> SweepConfig:
    """Validate a JSON-like mapping and build a :class:`SweepConfig`.

    Raises
    ------
    ConfigError
        With one message per offending field.
    """
    err = []
    if not isinstance(raw, dict):
        raise ConfigError(["config: expected a JSON object"])
    for k in raw:
        if k not in CONFIG_SCHEMA["properties"]:
            err.append(f"{k}: unknown field")
    model = raw.get("model")
    if model not in MODELS:
        err.append(f"model: expected one of {', '.join(MODELS)}, got {model!r}")
    ref = raw.get("reference")
    if ref is not None and ref not in REFERENCES:
        err.append(f"reference: expected one of {', '.join(REFERENCES)}")
    fixed = raw.get("fixed", {})
    if not isinstance(fixed, dict):
        err.append("fixed: expected an object")
        fixed = {}
    for k, v in fixed.items():
        if k not in PARAMETERS:
            err.append(f"fixed.{k}: unknown parameter")
        elif not _num(v):
            err.append(f"fixed.{k}: expected a finite number")
    axes = []
    raw_axes = raw.get("axes", [])
    if not isinstance(raw_axes, list) or len(raw_axes) > 2:
        err.append("axes: expected a list of at most two axes")
        raw_axes = []
    for n, a in enumerate(raw_axes):
        where = f"axes[{n}]"
        if not isinstance(a, dict):
            err.append(f"{where}: expected an object")
            continue
        for k in ("name", "min", "max", "count"):
            if k not in a:
                err.append(f"{where}.{k}: missing")
        extra = set(a) - {"name", "min", "max", "count", "scale", "label"}
        for k in sorted(extra):
            err.append(f"{where}.{k}: unknown field")
        if any(k not in a for k in ("name", "min", "max", "count")):
            continue
        name, lo, hi, cnt = a["name"], a["min"], a["max"], a["count"]
        scale = a.get("scale", "linear")
        ok = True
        if name not in PARAMETERS:
            err.append(f"{where}.name: unknown parameter {name!r}")
            ok = False
        if not (_num(lo) and _num(hi)):
            err.append(f"{where}: min and max must be finite numbers")
            ok = False
        if not isinstance(cnt, int) or isinstance(cnt, bool) or cnt < 1:
            err.append(f"{where}.count: expected a positive integer")
            ok = False
        if scale not in ("linear", "log"):
            err.append(f"{where}.scale: expected 'linear' or 'log'")
            ok = False
        if ok and cnt > 1 and lo == hi:
            err.append(f"{where}: degenerate axis (min == max with count > 1)")
            ok = False
        if ok and scale == "log" and (lo <= 0 or hi <= 0):
            err.append(f"{where}: log axis needs positive bounds")
            ok = False
        if ok and name in fixed:
            err.append(f"{where}.name: {name!r} is also fixed")
        if ok:
            axes.append(Axis(name, float(lo), float(hi), int(cnt), scale, a.get("label")))
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        err.append("axes: the same parameter appears twice")
    over = raw.get("optimize_over", [])
    if not isinstance(over, list):
        err.append("optimize_over: expected a list")
        over = []
    for p in over:
        if p not in OPTIMIZABLE:
            err.append(f"optimize_over: {p!r} not in {', '.join(OPTIMIZABLE)}")
        if p in names:
            err.append(f"optimize_over: {p!r} is also a sweep axis")
        if p in fixed:
            err.append(f"optimize_over: {p!r} is also fixed")
    if len(set(over)) != len(over) or len(over) > 2:
        err.append("optimize_over: at most two distinct parameters")
    outputs = raw.get("outputs", ["Cd"])
    if not isinstance(outputs, list) or not outputs:
        err.append("outputs: expected a non-empty list")
        outputs = []
    for o in outputs:
        if o not in OUTPUTS + WEAK_COUPLING_OUTPUTS:
            err.append(f"outputs: unknown output {o!r}")
    n_fock = raw.get("n_fock")
    if n_fock is not None and (not isinstance(n_fock, int) or isinstance(n_fock, bool)
                               or n_fock < 2):
        err.append("n_fock: expected an integer >= 2 or null")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        err.append("seed: expected an integer")
    opt_raw = raw.get("optimizer", {})
    opt = OptimizerSettings()
    if not isinstance(opt_raw, dict):
        err.append("optimizer: expected an object")
    else:
        for k in opt_raw:
            if k not in ("coarse", "coarse_2d", "tol", "bounds"):
                err.append(f"optimizer.{k}: unknown field")
        bounds = opt_raw.get("bounds", {})
        if not isinstance(bounds, dict):
            err.append("optimizer.bounds: expected an object")
            bounds = {}
        for k, b in bounds.items():
            if k not in OPTIMIZABLE:
                err.append(f"optimizer.bounds.{k}: not an optimizable parameter")
            elif (not isinstance(b, list) or len(b) != 2 or not all(map(_num, b))
                  or b[0] >= b[1]):
                err.append(f"optimizer.bounds.{k}: expected [low, high] with low < high")
        coarse = opt_raw.get("coarse", 41)
        coarse2 = opt_raw.get("coarse_2d", 11)
        tol = opt_raw.get("tol", 1e-4)
        for k, v in (("coarse", coarse), ("coarse_2d", coarse2)):
            if not isinstance(v, int) or v < 3:
                err.append(f"optimizer.{k}: expected an integer >= 3")
        if not _num(tol) or tol <= 0:
            err.append("optimizer.tol: expected a positive number")
        if not err:
            opt = OptimizerSettings(coarse, coarse2, float(tol),
                                    {k: [float(x) for x in b] for k, b in bounds.items()})
    if model in MODELS:
        err += _model_checks(model, fixed, names, over, outputs, n_fock)
    if err:
        raise ConfigError(err)
    return SweepConfig(model=model, fixed={k: float(v) for k, v in fixed.items()},
                       axes=tuple(axes), optimize_over=tuple(over), outputs=tuple(outputs),
                       n_fock=n_fock, seed=seed, reference=ref, optimizer=opt,
                       name=str(raw.get("name", "sweep")))


def _model_checks(model, fixed, axis_names, over, outputs, n_fock) -> list[str]:
    err = []
    given = set(fixed) | set(axis_names) | set(over)
    dressed = {"omega_tilde", "theta"} & given
    bare = {"delta0", "omega0"} & given
    if dressed and bare:
        err.append("parameters: give either (omega_tilde, theta) or (delta0, omega0), not both")
    if "theta" in given and "omega_tilde" not in given:
        err.append("parameters: theta requires omega_tilde")
    if "omega_tilde" in given and "theta" not in given:
        err.append("parameters: omega_tilde requires theta (fixed, swept or optimized)")
    if "C" in given and model not in CAVITY_MODELS:
        err.append(f"parameters: cooperativity C needs a cavity model, not {model}")
    if "C" in given and "kappa" in given:
        err.append("parameters: give either C or kappa, not both")
    if model == "network":
        if set(outputs) - {"concurrences", "coherences", "Cd"}:
            err.append("outputs: the network model reports Cd, concurrences and coherences")
        if "theta" in over:
            err.append("optimize_over: the network model optimizes omega0 and delta_q")
    else:
        if {"concurrences", "coherences"} & set(outputs):
            err.append("outputs: concurrences and coherences need model 'network'")
        if "gamma" in given:
            err.append("parameters: gamma (target-qubit decay) needs model 'network'")
    if "EN" in outputs and (model not in CAVITY_MODELS or model == "purcell"):
        err.append("outputs: EN needs a model with cavity modes")
    if set(WEAK_COUPLING_OUTPUTS) & set(outputs) and model not in ("qms", "bogoliubov"):
        err.append("outputs: weak-coupling rates need model 'qms' or 'bogoliubov'")
    if n_fock is not None and model not in EXACT_CAVITY_MODELS:
        err.append(f"n_fock: model {model} has no Fock truncation")
    if "omega0" in over and dressed:
        err.append("optimize_over: omega0 cannot be combined with (omega_tilde, theta)")
    return err


def load_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: invalid JSON ({exc})"]) from exc
    return parse_config(raw)


# --- single points --------------------------------------------------------------


def resolve(cfg_or_model, values: dict, reference: str | None = None) -> dict:
    """Fill defaults and derived parameters for one point."""
    model = cfg_or_model.model if isinstance(cfg_or_model, SweepConfig) else cfg_or_model
    if isinstance(cfg_or_model, SweepConfig):
        reference = cfg_or_model.reference_rate
    reference = reference or DEFAULT_REFERENCE[model]
    v = {"delta0": 0.0, "omega0": 0.0, "gamma0": 0.0, "kappa": 1.0, "gamma_phi": 0.0,
         "g": 0.0, "gamma": 0.0, "secular": 1.0}
    v[reference] = 1.0
    v.update(values)
    if "omega_tilde" in v:
        th = v.get("theta", np.pi / 4)
        v["delta0"] = v["omega_tilde"] * np.cos(th)
        v["omega0"] = v["omega_tilde"] * np.sin(th)
    wt = float(np.hypot(v["delta0"], v["omega0"]))
    v.setdefault("omega_tilde", wt)
    if "C" in v:
        if v["C"] <= 0 or v["gamma0"] <= 0:
            raise PointError("cooperativity needs positive C and gamma0")
        v["kappa"] = v["g"] ** 2 / (v["C"] * v["gamma0"])
    if model in CAVITY_MODELS:
        v.setdefault("delta_c", wt)
        v.setdefault("delta_q", v["delta_c"])
    elif model == "bare-tls":
        v.setdefault("delta_q", wt)
    else:
        v.setdefault("delta_q", 0.0)
    return v


def _tls(v: dict) -> TlsParams:
    return TlsParams(delta0=v["delta0"], omega0=v["omega0"], gamma0=v["gamma0"],
                     kappa=v["kappa"], gamma_phi=v["gamma_phi"])


def _cavity(v: dict, n_fock: int) -> CavityParams:
    return CavityParams(_tls(v), g=v["g"], delta_c=v["delta_c"], n_fock=n_fock)


@lru_cache(maxsize=8)
def _source(model: str, key: tuple, n_fock: int):
    """Model object for a point; cached so probe scans reuse steady states."""
    v = dict(key)
    if model == "bare-tls":
        from .models import bare_tls
        return bare_tls(_tls(v))
    p = _cavity(v, n_fock)
    if model == "full-cavity":
        return tls_two_cavities(p)
    if model == "dressed-rwa":
        return dressed_rwa(p, frame="cavity")
    if model == "bogoliubov":
        return dressed_rwa(p, frame="cavity", basis="bogoliubov")
    if model == "purcell":
        return resolved_purcell(p)
    if model == "qms":
        return qms_quadratic(p, secular=bool(v["secular"]))
    raise ValueError(model)


def evaluate_point(model: str, values: dict, outputs=("Cd",), n_fock: int | None = None,
                   reference: str | None = None) -> dict:
    """Requested outputs for one parameter point.

    ``values`` holds raw parameters (before defaults). Network points report
    ``Cd`` as the concurrence of the two target qubits.
    """
    v = resolve(model, values, reference)
    out: dict = {}
    if model == "network":
        src = _tls(v)
        rep = analyze_network(NetworkParams(src, v["gamma"], v["delta_q"]))
        out["Cd"] = rep.C12
        for k in CONCURRENCE_COLUMNS:
            out[k] = rep.concurrences[k[1:]]
        for k in COHERENCE_COLUMNS:
            out[k] = abs(rep.coherences[k[4:]])
        return out
    n = n_fock or DEFAULT_N_FOCK.get(model, 2)
    skip = ("delta_q",)
    key = tuple(sorted((k, float(x)) for k, x in v.items() if k not in skip))
    src = _source(model, key, n)
    dq = v["delta_q"]
    need_spectra = set(outputs) & set(SPECTRAL_OUTPUTS)
    if need_spectra:
        if model == "qms":
            cs = gaussian_correlation_set(src, dq, -dq)
        else:
            cs = correlation_set(src, dq, -dq)
        cd, tms, eff = cd_from_spectra(cs)
        out.update(Cd=cd, r_eff=eff.r_eff, mu_eff=eff.mu_eff, N1=tms.N1, N2=tms.N2,
                   absM=abs(tms.M), Theta=tms.theta)
    if "EN" in outputs:
        if model == "qms":
            out["EN"] = log_negativity(steady_second_moments(src))
        else:
            a1, a2 = (port.op for port in src.ports)
            out["EN"] = log_negativity(moments_from_state(src.steady_state(), a1, a2))
    if set(WEAK_COUPLING_OUTPUTS) & set(outputs):
        b = bogoliubov_weak_coupling(_cavity(v, 2))
        out.update(r_theta=b.r_theta, g_tms=b.g_tms, Gamma_theta=b.gamma_theta, N_th=b.n_th)
    return out


# --- optimizers -------------------------------------------------------------------


@dataclass(frozen=True)
class OptimumRecord:
    x: dict
    value: float
    evaluations: int
    iterations: int
    boundary: bool
    converged: bool = True


def default_bounds(name: str, v: dict) -> tuple[float, float]:
    if name == "theta":
        return (0.0, np.pi / 2)
    if name == "delta_q":
        return (0.0, 3.0 * max(v.get("omega_tilde", 0.0), v.get("delta_c", 0.0)))
    if name == "omega0":
        return (0.0, 10.0)
    raise KeyError(name)


def optimize_point(objective, over, bounds, coarse: int = 41, coarse_2d: int = 11,
                   tol: float = 1e-4, seed: int = 0) -> OptimumRecord:
    """Maximize ``objective(dict)`` over one or two bounded parameters.

    Bounds are open: the coarse scan stays strictly inside. One parameter uses
    a ``coarse``-point scan and golden-section refinement around the best
    point; two use a ``coarse_2d`` square scan and a Nelder-Mead simplex whose
    initial shape is drawn from ``seed``. Non-finite objective values are
    treated as failures and raise :class:`PointError` if nothing is finite.
    """
    over = list(over)
    lo = np.array([bounds[p][0] for p in over], float)
    hi = np.array([bounds[p][1] for p in over], float)
    count = 0

    def f(x):
        nonlocal count
        count += 1
        val = objective(dict(zip(over, map(float, x))))
        return val if np.isfinite(val) else -np.inf

    if len(over) == 1:
        xs = np.linspace(lo[0], hi[0], coarse + 2)[1:-1]
        vals = np.array([f([x]) for x in xs])
    else:
        g0 = np.linspace(lo[0], hi[0], coarse_2d + 2)[1:-1]
        g1 = np.linspace(lo[1], hi[1], coarse_2d + 2)[1:-1]
        pts = [np.array(p) for p in product(g0, g1)]
        vals = np.array([f(p) for p in pts])
    if not np.isfinite(vals).any():
        raise PointError("objective is not finite anywhere on the coarse scan")
    i = int(np.argmax(vals))
    best = float(vals[i])
    iters = 0
    if len(over) == 1:
        x = np.array([xs[i]])
        step = xs[1] - xs[0] if len(xs) > 1 else hi[0] - lo[0]
        interior = 0 < i < len(xs) - 1 and vals[i] > max(vals[i - 1], vals[i + 1])
        if interior:
            res = minimize_scalar(lambda t: -f([t]), bracket=(xs[i - 1], xs[i], xs[i + 1]),
                                  method="golden", options={"xtol": tol})
            iters = int(getattr(res, "nit", 0))
            if -res.fun >= best:
                x, best = np.array([res.x]), float(-res.fun)
        elif best > 0:
            a = max(lo[0], xs[i] - step)
            b = min(hi[0], xs[i] + step)
            res = minimize_scalar(lambda t: -f([t]), bounds=(a, b), method="bounded",
                                  options={"xatol": tol * max(step, 1e-12)})
            iters = int(getattr(res, "nit", 0))
            if -res.fun >= best:
                x, best = np.array([res.x]), float(-res.fun)
    else:
        x = pts[i]
        if best > 0:
            rng = np.random.default_rng(seed)
            span = (hi - lo) / (coarse_2d + 1)
            steps = span * (0.5 + 0.25 * rng.random(2))
            steps = np.where(x + steps > hi, -steps, steps)
            simplex = [x, x + [steps[0], 0.0], x + [0.0, steps[1]]]
            res = minimize(lambda y: -f(y), x, method="Nelder-Mead",
                           bounds=list(zip(lo, hi)),
                           options={"initial_simplex": simplex, "fatol": tol,
                                    "xatol": tol * float(np.max(hi - lo))})
            iters = int(res.nit)
            if -res.fun >= best:
                x, best = res.x, float(-res.fun)
    span = hi - lo
    boundary = bool(np.any((x - lo <= 1e-3 * span) | (hi - x <= 1e-3 * span)))
    return OptimumRecord(dict(zip(over, map(float, x))), best, count, iters, boundary)


# --- Fock convergence -----------------------------------------------------------------


@dataclass(frozen=True)
class FockRecord:
    n_fock: int
    converged: bool
    ladder: tuple


def fock_convergence(model: str, values: dict, start: int = FOCK_START, cap: int = FOCK_CAP,
                     tol: float = FOCK_TOL, reference: str | None = None) -> FockRecord:
    """Double the truncation from ``start`` until ``C_d`` moves by less than ``tol``.

    The reported ``n_fock`` is the smaller rung of the first agreeing pair,
    i.e. the cheapest truncation confirmed by the next doubling. Without
    coupling (``g = 0``) the cavities stay empty and two levels suffice.
    The ladder holds ``(n_fock, C_d)`` pairs; hitting ``cap`` or the memory
    guard returns ``converged=False``.
    """
    if model not in EXACT_CAVITY_MODELS:
        raise ValueError(f"model {model} has no Fock truncation")
    v = resolve(model, values, reference)
    if v["g"] == 0:
        cd = evaluate_point(model, values, ("Cd",), 2, reference)["Cd"]
        return FockRecord(2, True, ((2, cd),))
    ladder = []
    n = start
    prev = None
    while n <= cap:
        try:
            cd = evaluate_point(model, values, ("Cd",), n, reference)["Cd"]
        except MemoryGuardError:
            break
        ladder.append((n, cd))
        if prev is not None and abs(cd - prev) < tol:
            return FockRecord(n // 2, True, tuple(ladder))
        prev = cd
        n *= 2
    return FockRecord(ladder[-1][0] if ladder else start, False, tuple(ladder))


# --- sweeps ----------------------------------------------------------------------------


def _canon(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return x
        return float(f"{x:.{SIG_DIGITS}g}")
    return x


@dataclass
class SweepResult:
    config: SweepConfig
    columns: list
    rows: list
    meta: list
    wall_time: list = field(default_factory=list)
    version: str = __version__

    @property
    def errors(self) -> list:
        return [r for r in self.rows if r["status"] != "ok"]

    def __eq__(self, other):
        if not isinstance(other, SweepResult):
            return NotImplemented
        return (self.config.to_dict() == other.config.to_dict()
                and self.columns == other.columns and self.meta == other.meta
                and _rows_equal(self.rows, other.rows))


def _rows_equal(a, b) -> bool:
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        if ra.keys() != rb.keys():
            return False
        for k in ra:
            x, y = ra[k], rb[k]
            if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
                continue
            if x != y:
                return False
    return True


def grid_points(cfg: SweepConfig) -> list[dict]:
    if not cfg.axes:
        return [{}]
    vals = [a.values() for a in cfg.axes]
    return [{a.name: float(x) for a, x in zip(cfg.axes, combo)} for combo in product(*vals)]


def _objective(cfg: SweepConfig, base: dict):
    def obj(x: dict) -> float:
        return evaluate_point(cfg.model, {**base, **x}, ("Cd",), cfg.n_fock,
                              cfg.reference_rate)["Cd"]
    return obj


def _point_task(args):
    cfg_dict, index, coords = args
    cfg = parse_config(cfg_dict)
    t0 = time.perf_counter()
    row, meta = _run_point(cfg, coords)
    return index, row, meta, time.perf_counter() - t0


def _run_point(cfg: SweepConfig, coords: dict):
    row = {a.column: coords[a.name] for a in cfg.axes}
    data_cols = [c for c in cfg.columns() if c not in row and c != "status"]
    meta = {"n_fock": cfg.n_fock or DEFAULT_N_FOCK.get(cfg.model), "evaluations": 1,
            "iterations": 0, "boundary": False}
    base = {**cfg.fixed, **coords}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            opt_vals = {}
            if cfg.optimize_over:
                if cfg.model == "network" and set(cfg.optimize_over) == {"omega0", "delta_q"}:
                    v = resolve(cfg, base)
                    kappa = v["kappa"]
                    o = optimize_network(v["gamma"] / kappa, v["delta0"], kappa)
                    opt_vals = {"omega0": o.omega0, "delta_q": o.delta_q}
                    meta.update(evaluations=o.n_solves, boundary=o.boundary)
                else:
                    v = resolve(cfg, base)
                    bounds = {p: tuple(cfg.optimizer.bounds.get(p, default_bounds(p, v)))
                              for p in cfg.optimize_over}
                    o = optimize_point(_objective(cfg, base), cfg.optimize_over, bounds,
                                       cfg.optimizer.coarse, cfg.optimizer.coarse_2d,
                                       cfg.optimizer.tol, cfg.seed)
                    opt_vals = o.x
                    meta.update(evaluations=o.evaluations, iterations=o.iterations,
                                boundary=o.boundary)
                for p in cfg.optimize_over:
                    row[opt_column(p)] = opt_vals[p]
            out = evaluate_point(cfg.model, {**base, **opt_vals}, cfg.outputs, cfg.n_fock,
                                 cfg.reference_rate)
        for c in data_cols:
            if c not in row:
                row[c] = out.get(c, float("nan"))
        row["status"] = "ok"
    except Exception as exc:  # error rows instead of aborting the sweep
        for c in data_cols:
            row.setdefault(c, float("nan"))
        row["status"] = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    row = {c: _canon(row[c]) for c in cfg.columns()}
    return row, meta


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Evaluate every grid point; failures become tagged error rows.

    Points are independent. With ``workers > 1`` they run in a process pool;
    results are assembled by grid index, so the worker count never changes
    the emitted values.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    pts = grid_points(cfg)
    cfg_dict = _config_input(cfg)
    tasks = [(cfg_dict, i, c) for i, c in enumerate(pts)]
    if workers == 1 or len(pts) == 1:
        done = [_point_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            done = list(ex.map(_point_task, tasks, chunksize=1))
    done.sort(key=lambda t: t[0])
    return SweepResult(cfg, cfg.columns(), [d[1] for d in done], [d[2] for d in done],
                       [d[3] for d in done])


def _config_input(cfg: SweepConfig) -> dict:
    """Config mapping that :func:`parse_config` accepts."""
    d = cfg.to_dict()
    for a in d["axes"]:
        if a["label"] is None:
            del a["label"]
    return d


# --- emission -------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS}g}"


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for r in result.rows:
        w.writerow([_fmt(r[c]) for c in result.columns])
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


def _from_json_value(x):
    if x is None:
        return float("nan")
    if x in ("inf", "-inf"):
        return float(x)
    return x


def to_json(result: SweepResult) -> str:
    doc = {
        "library": "cascade_lab",
        "version": result.version,
        "config": _config_input(result.config),
        "columns": result.columns,
        "records": [{"index": i, "values": {c: _json_value(r[c]) for c in result.columns},
                     "meta": m}
                    for i, (r, m) in enumerate(zip(result.rows, result.meta))],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def from_json(text: str) -> SweepResult:
    doc = json.loads(text)
    cfg = parse_config(doc["config"])
    rows, meta = [], []
    for rec in doc["records"]:
        row = {}
        for c in doc["columns"]:
            x = _from_json_value(rec["values"][c])
            row[c] = float(x) if isinstance(x, int) and not isinstance(x, bool) else x
        rows.append(row)
        meta.append(rec["meta"])
    return SweepResult(cfg, list(doc["columns"]), rows, meta, [], doc.get("version", ""))


def emit(result: SweepResult, fmt: str, out_dir: str, stem: str | None = None) -> str:
    """Write ``<out_dir>/<stem>.<fmt>``; returns the path. Raises ``OSError`` on I/O failure."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    stem = stem or result.config.name
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{stem}.{fmt}")
    text = to_csv(result) if fmt == "csv" else to_json(result)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
