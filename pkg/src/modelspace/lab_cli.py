"""Configuration-driven experiment runner.

One YAML file describes one experiment.  A run writes ``results.csv``
(fixed header per kind), optional extra tables, ``series_*.csv`` files with
``x,y`` columns and ``manifest.yaml``.  With ``--verify`` every table is
recomputed at doubled resolution and the ``selfconv_delta`` column holds
the absolute change of the headline quantity.

Exit status: 0 success, 2 invalid configuration, 3 theorem hypothesis
violated, 1 any other failure.  Failures write ``error.yaml`` and print a
JSON record on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .bergman_lab import (
    DiscFunction,
    DiscQuadrature,
    cauchy_pairing_disc,
    cyclicity_curve,
    obstruction_functional,
    orthogonal_remainder,
)
from .boundary_measures import (
    ArcSet,
    CantorComponent,
    GapSchedule,
    SingularMeasure,
    decompose,
    entropy,
    is_beurling_carleson,
)
from .circle_harmonics import taylor_coefficients
from .errors import ConfigError, HypothesisViolationError, ModelSpaceError
from .inner_functions import InnerFunction
from .smoothing_pipeline import CutoffFamily, KernelSmoother, SmoothingSequence, build_profile

KINDS = ("ENTROPY", "DECOMPOSE", "APPROX_KERNEL", "CYCLICITY", "PAIRING_CHECK", "SMOOTHING_SUITE")

HEADERS = {
    "ENTROPY": ["name", "entropy", "partial_sum", "tail_bound", "is_bc", "selfconv_delta"],
    "DECOMPOSE": ["item", "type", "mass", "part", "entropy_partial", "tail_bound", "witness"],
    "APPROX_KERNEL": ["n", "h2_error", "membership_residual", "decay_exponent", "selfconv_delta"],
    "CYCLICITY": ["function", "degree", "distance", "selfconv_delta"],
    "PAIRING_CHECK": ["pair", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap", "fwp_ratio", "selfconv_delta"],
    "SMOOTHING_SUITE": [
        "n",
        "weight_integral",
        "weight_fraction",
        "sup_abs_H",
        "median_abs_H_minus_1",
        "abs_H_at_0",
        "selfconv_delta",
    ],
}
OBSTRUCTION_HEADER = ["J", "pairing_abs", "h2_norm_sq", "selfconv_delta"]


# ---------------------------------------------------------------------------
# Literal parsing
# ---------------------------------------------------------------------------


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ConfigError(f"{where}: missing key {key!r}")
    return d[key]


def _check_keys(d: dict, allowed: set, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(d).__name__}")
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


def _complex(v, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"{where}: expected a number or [re, im], got {v!r}")


def _int(v, where: str, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{where}: must be >= {lo}, got {v}")
    return v


def _float(v, where: str, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where}: must be positive, got {v}")
    return float(v)


def parse_schedule(d: dict, where: str = "schedule") -> GapSchedule:
    _check_keys(d, {"family", "param", "base_start", "base_length", "depth"}, where)
    try:
        return GapSchedule(
            _require(d, "family", where),
            _float(_require(d, "param", where), f"{where}.param"),
            _float(d.get("base_start", 0.0), f"{where}.base_start"),
            _float(d.get("base_length", 1.0), f"{where}.base_length"),
            _int(d.get("depth", 12), f"{where}.depth", 1),
        )
    except ModelSpaceError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_measure(d: dict, where: str = "measure") -> SingularMeasure:
    d = {} if d is None else d
    _check_keys(d, {"atoms", "components"}, where)
    atoms = []
    for i, a in enumerate(d.get("atoms", []) or []):
        if not (isinstance(a, (list, tuple)) and len(a) == 2):
            raise ConfigError(f"{where}.atoms[{i}]: expected [position, mass]")
        atoms.append((_float(a[0], f"{where}.atoms[{i}]"), _float(a[1], f"{where}.atoms[{i}]", True)))
    comps = []
    for i, c in enumerate(d.get("components", []) or []):
        w = f"{where}.components[{i}]"
        _check_keys(c, {"schedule", "mass"}, w)
        comps.append(CantorComponent(parse_schedule(_require(c, "schedule", w), w + ".schedule"), _float(_require(c, "mass", w), w + ".mass", True)))
    return SingularMeasure(tuple(atoms), tuple(comps))


def parse_set(d: dict, where: str = "set"):
    _check_keys(d, {"name", "points", "arcs", "schedule"}, where)
    given = [k for k in ("points", "arcs", "schedule") if k in d]
    if len(given) != 1:
        raise ConfigError(f"{where}: give exactly one of points, arcs, schedule")
    try:
        if "points" in d:
            return ArcSet.from_points([_float(p, where) for p in d["points"]])
        if "arcs" in d:
            return ArcSet(tuple((_float(a[0], where), _float(a[1], where)) for a in d["arcs"]))
    except ModelSpaceError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return parse_schedule(d["schedule"], where + ".schedule")


def parse_theta(d: dict, where: str = "theta") -> InnerFunction:
    _check_keys(d, {"zeros", "measure", "level", "max_level", "tol"}, where)
    zeros = [_complex(z, f"{where}.zeros[{i}]") for i, z in enumerate(d.get("zeros", []) or [])]
    if any(abs(z) >= 1 for z in zeros):
        raise ConfigError(f"{where}: zeros must lie in the open disc")
    meas = parse_measure(d.get("measure"), where + ".measure")
    kw = {}
    if "level" in d:
        kw["level"] = _int(d["level"], where + ".level", 1)
    if "max_level" in d:
        kw["max_level"] = _int(d["max_level"], where + ".max_level", 1)
    if "tol" in d:
        kw["tol"] = _float(d["tol"], where + ".tol", True)
    return InnerFunction.build(zeros, meas, **kw)


def _pow2(v, where: str) -> int:
    v = _int(v, where, 8)
    if v & (v - 1):
        raise ConfigError(f"{where}: must be a power of two, got {v}")
    return v


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Validated experiment description; ``raw`` keeps the YAML mapping."""

    kind: str
    seed: int
    raw: dict
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict, seed: int | None = None, grid_override: int | None = None) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a mapping")
        kind = str(_require(raw, "kind", "config")).upper()
        if kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {list(KINDS)}")
        s = _int(raw.get("seed", 0), "seed", 0) if seed is None else int(seed)
        cfg = cls(kind, s, raw)
        cfg.params = _VALIDATORS[kind](raw, grid_override)
        return cfg

    @classmethod
    def load(cls, path, seed=None, grid_override=None) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from exc
        return cls.from_dict(raw, seed, grid_override)


_COMMON = {"kind", "seed", "description"}


def _v_entropy(raw, _go):
    _check_keys(raw, _COMMON | {"sets"}, "config")
    sets = _require(raw, "sets", "config")
    if not isinstance(sets, list) or not sets:
        raise ConfigError("sets: expected a non-empty list")
    out = []
    for i, s in enumerate(sets):
        name = str(s.get("name", f"set{i}")) if isinstance(s, dict) else f"set{i}"
        out.append((name, parse_set(s, f"sets[{i}]")))
    return {"sets": out}


def _v_decompose(raw, _go):
    _check_keys(raw, _COMMON | {"measure"}, "config")
    return {"measure": parse_measure(_require(raw, "measure", "config"))}


def _profile_params(d, where, defaults):
    d = {} if d is None else d
    _check_keys(d, {"alpha", "c", "cutoff_exponent", "mollifier_width"}, where)
    out = dict(defaults)
    for k in out:
        if k in d:
            out[k] = _float(d[k], f"{where}.{k}", True)
    return out


def _n_list(raw):
    n_list = raw.get("n_list", [2, 4, 8, 16])
    if not isinstance(n_list, list):
        raise ConfigError("n_list: expected a list")
    return [_int(n, f"n_list[{i}]", 1) for i, n in enumerate(n_list)]


def _v_approx(raw, go):
    _check_keys(raw, _COMMON | {"theta", "lambda", "n_list", "grid", "profile"}, "config")
    theta = parse_theta(_require(raw, "theta", "config"))
    lam = _complex(_require(raw, "lambda", "config"), "lambda")
    if not abs(lam) < 1:
        raise ConfigError("lambda must lie in the open disc")
    grid = raw.get("grid", {}) or {}
    _check_keys(grid, {"N", "oversample"}, "grid")
    N = _pow2(go if go is not None else grid.get("N", 2**20), "grid.N")
    ov = _int(grid.get("oversample", 2), "grid.oversample", 1)
    prof = _profile_params(raw.get("profile"), "profile", {"alpha": 3.0, "c": 0.03, "cutoff_exponent": 3.2, "mollifier_width": 4.0})
    return {"theta": theta, "lam": lam, "n_list": _n_list(raw), "N": N, "oversample": ov, "profile": prof}


def _quad(raw):
    q = raw.get("quadrature", {}) or {}
    _check_keys(q, {"radial", "angular"}, "quadrature")
    return DiscQuadrature(_int(q.get("radial", 64), "quadrature.radial", 2), _int(q.get("angular", 512), "quadrature.angular", 8))


def _v_cyclicity(raw, _go):
    _check_keys(raw, _COMMON | {"degrees", "functions", "quadrature", "obstruction"}, "config")
    degrees = _require(raw, "degrees", "config")
    if not isinstance(degrees, list) or not degrees:
        raise ConfigError("degrees: expected a non-empty list")
    degrees = [_int(d, f"degrees[{i}]", 0) for i, d in enumerate(degrees)]
    funcs = []
    for i, f in enumerate(_require(raw, "functions", "config")):
        w = f"functions[{i}]"
        _check_keys(f, {"name", "theta"}, w)
        funcs.append((str(_require(f, "name", w)), parse_theta(_require(f, "theta", w), w + ".theta")))
    names = [n for n, _ in funcs]
    obs = raw.get("obstruction")
    if obs is not None:
        _check_keys(obs, {"function", "J_list", "degree"}, "obstruction")
        fn = str(_require(obs, "function", "obstruction"))
        if fn not in names:
            raise ConfigError(f"obstruction.function {fn!r} is not among {names}")
        obs = {
            "function": fn,
            "J_list": [_int(j, "obstruction.J_list", 0) for j in _require(obs, "J_list", "obstruction")],
            "degree": _int(obs.get("degree", 128), "obstruction.degree", 1),
        }
    return {"degrees": degrees, "functions": funcs, "quad": _quad(raw), "obstruction": obs}


def _v_pairing(raw, _go):
    _check_keys(raw, _COMMON | {"pairs", "max_degree", "p", "quadrature"}, "config")
    return {
        "pairs": _int(raw.get("pairs", 50), "pairs", 0),
        "max_degree": _int(raw.get("max_degree", 8), "max_degree", 0),
        "p": _float(raw.get("p", 2.0), "p", True),
        "quad": _quad(raw),
    }


def _v_smoothing(raw, go):
    _check_keys(raw, _COMMON | {"set", "profile", "grid", "n_list"}, "config")
    E = parse_set(_require(raw, "set", "config"))
    if not isinstance(E, ArcSet):
        raise ConfigError("set: smoothing profiles need a finite point or arc set")
    prof = _profile_params(raw.get("profile"), "profile", {"alpha": 1.0, "c": 1.0, "cutoff_exponent": 3.2, "mollifier_width": 4.0})
    grid = raw.get("grid", {}) or {}
    _check_keys(grid, {"N"}, "grid")
    N = _pow2(go if go is not None else grid.get("N", 2**14), "grid.N")
    try:
        profile = build_profile(E, prof["alpha"], prof["c"])
    except ModelSpaceError as exc:
        raise ConfigError(f"set: {exc}") from exc
    return {"profile": profile, "prof": prof, "N": N, "n_list": _n_list(raw)}


_VALIDATORS = {
    "ENTROPY": _v_entropy,
    "DECOMPOSE": _v_decompose,
    "APPROX_KERNEL": _v_approx,
    "CYCLICITY": _v_cyclicity,
    "PAIRING_CHECK": _v_pairing,
    "SMOOTHING_SUITE": _v_smoothing,
}


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    tables: dict  # filename -> (header, rows)
    series: dict  # name -> list of (x, y)
    info: dict  # manifest entries
    warnings: list


def _delta(a: float, b: float) -> float:
    return 0.0 if a == b else abs(a - b)


def _selfconv_ok(value: float, delta: float) -> bool:
    if not math.isfinite(delta):
        return False
    return delta < max(0.1 * abs(value), 1e-8)


def _selfconv_summary(pairs):
    """``pairs``: list of (value, delta); returns manifest summary."""
    worst = 0.0
    ok = True
    for v, d in pairs:
        ok = ok and _selfconv_ok(v, d)
        if math.isfinite(v) and v != 0 and math.isfinite(d):
            worst = max(worst, d / abs(v))
    return {"all_within_tolerance": ok, "max_relative_delta": worst}


def _run_entropy(p, verify):
    rows, checks, warnings = [], [], []
    for name, obj in p["sets"]:
        if isinstance(obj, ArcSet):
            value = entropy(obj)
            try:
                bc = is_beurling_carleson(obj).is_bc
            except ModelSpaceError as exc:
                bc = False
                warnings.append(f"{name}: {exc}")
            partial, tail = value, 0.0
            delta = 0.0 if verify else None
        else:
            se = entropy(obj)
            value, partial, tail = se.value, se.partial_sum, se.tail_bound
            bc = se.converges
            delta = None
            if verify:
                se2 = entropy(obj, 2 * obj.depth)
                delta = _delta(se2.value, value)
        rows.append([name, value, partial, tail, bc, delta])
        if delta is not None:
            checks.append((value, delta))
    info = {"selfconv": _selfconv_summary(checks)} if verify else {}
    return RunResult({"results.csv": (HEADERS["ENTROPY"], rows)}, {}, info, warnings)


def _run_decompose(p, verify):
    meas = p["measure"]
    dec = decompose(meas)
    rows = []
    for i, (pos, m) in enumerate(meas.atoms):
        rows.append([f"atom{i}", f"atom@{pos!r}", m, "BC", 0.0, 0.0, 0.0])
    for i, (comp, cert) in enumerate(zip(meas.components, dec.certificates)):
        s = comp.schedule
        rows.append([f"component{i}", f"{s.family.value}({s.param!r})", comp.mass, "BC" if cert.is_bc else "KR", cert.entropy, cert.tail_bound, cert.witness])
    # masses are moved, not recombined, so the check is exact
    moved = dec.bc.masses + dec.kr.masses
    conserved = sorted(moved) == sorted(meas.masses) and math.fsum(moved) == meas.total_mass
    info = {
        "total_mass": meas.total_mass,
        "bc_mass": dec.bc.total_mass,
        "kr_mass": dec.kr.total_mass,
        "mass_conserved": bool(conserved),
        "certificates": [c.as_dict() for c in dec.certificates],
    }
    series = {"witness_mass": [(k + 1, m) for k, m in enumerate(dec.witnesses)]}
    return RunResult({"results.csv": (HEADERS["DECOMPOSE"], rows)}, series, info, [])


def _approx_rows(p, N, fit_max):
    prof = p["profile"]
    ks = KernelSmoother(
        p["theta"], p["lam"], N=N, oversample=p["oversample"], alpha=prof["alpha"], c=prof["c"],
        cutoff_exponent=prof["cutoff_exponent"], mollifier_width=prof["mollifier_width"], fit_max=fit_max,
    )
    return ks, [ks.approximate(n) for n in p["n_list"]]


def _run_approx(p, verify):
    warnings = []
    if not p["n_list"]:
        warnings.append("empty n_list: header-only table")
    ks, res = _approx_rows(p, p["N"], None)
    deltas = [None] * len(res)
    info: dict = {"kernel_decay_exponent": ks.kernel_decay().exponent, "grid_N": p["N"], "work_grid": ks.work.N}
    if verify and res:
        _, res2 = _approx_rows(p, 2 * p["N"], ks.fit_max)
        deltas = [abs(a.h2_error - b.h2_error) for a, b in zip(res, res2)]
        info["doubled"] = {
            "h2_error": [b.h2_error for b in res2],
            "membership_residual": [b.membership_residual for b in res2],
            "decay_exponent": [b.decay.exponent for b in res2],
        }
        pairs = [(a.h2_error, d) for a, d in zip(res, deltas)]
        pairs += [(a.membership_residual, _delta(a.membership_residual, b.membership_residual)) for a, b in zip(res, res2)]
        pairs += [(a.decay.exponent, _delta(a.decay.exponent, b.decay.exponent)) for a, b in zip(res, res2)]
        info["selfconv"] = _selfconv_summary(pairs)
    rows = [[a.n, a.h2_error, a.membership_residual, a.decay.exponent, d] for a, d in zip(res, deltas)]
    errs = [a.h2_error for a in res]
    kd = info["kernel_decay_exponent"]
    info["checks"] = {
        "error_strictly_decreasing": all(b < a for a, b in zip(errs, errs[1:])),
        "final_over_initial": errs[-1] / errs[0] if errs and errs[0] > 0 else 0.0,
        "max_membership_residual": max((a.membership_residual for a in res), default=0.0),
        "min_decay_gain": min((a.decay.exponent - kd for a in res), default=math.inf),
        "dominated_by_grid_norm": all(a.h2_error <= a.dominating_bound + 1e-9 for a in res),
    }
    info["dominating_bound"] = [a.dominating_bound for a in res]
    series = {"h2_error": [(a.n, a.h2_error) for a in res]}
    return RunResult({"results.csv": (HEADERS["APPROX_KERNEL"], rows)}, series, info, warnings)


def _obstruction(theta, obs, quad):
    D = obs["degree"]
    coeffs = taylor_coefficients(theta, D + 1)
    rows = []
    for J in obs["J_list"]:
        g = orthogonal_remainder(coeffs, min(J, D), D)
        val = obstruction_functional(None, DiscFunction.polynomial([1.0]), DiscFunction.polynomial(g), 2.0, quad)
        rows.append((J, abs(val), float(np.sum(np.abs(g) ** 2))))
    return rows


def _run_cyclicity(p, verify):
    quad = p["quad"]
    rows, series, info, checks = [], {}, {"curves": {}}, []
    curves = {}
    for name, theta in p["functions"]:
        r = cyclicity_curve(theta, p["degrees"], quad=quad)
        d2 = cyclicity_curve(theta, p["degrees"], quad=quad.doubled()).distances if verify else [None] * len(r.distances)
        curves[name] = r.distances
        info["curves"][name] = {"condition": r.condition, "regularization": r.regularization, "distances": list(r.distances)}
        for N, d, dd in zip(r.degrees, r.distances, d2):
            delta = None if dd is None else abs(d - dd)
            rows.append([name, N, d, delta])
            if delta is not None:
                checks.append((d, delta))
        series[f"distance_{name}"] = list(zip(r.degrees, r.distances))
    tables = {"results.csv": (HEADERS["CYCLICITY"], rows)}
    obs = p["obstruction"]
    if obs is not None:
        theta = dict(p["functions"])[obs["function"]]
        o1 = _obstruction(theta, obs, quad)
        o2 = _obstruction(theta, obs, quad.doubled()) if verify else None
        orows = []
        for i, (J, v, n2) in enumerate(o1):
            delta = None if o2 is None else abs(v - o2[i][1])
            orows.append([J, v, n2, delta])
            if delta is not None:
                checks.append((v, delta))
        tables["obstruction.csv"] = (OBSTRUCTION_HEADER, orows)
        series["obstruction"] = [(J, v) for J, v, _ in o1]
        vals = [v for _, v, _ in o1]
        info["obstruction_nonincreasing"] = all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
    if verify:
        info["selfconv"] = _selfconv_summary(checks)
    info["ratios"] = {name: {"last_over_first": c[-1] / c[0], "last_over_previous": c[-1] / c[-2] if len(c) > 1 else 1.0} for name, c in curves.items()}
    return RunResult(tables, series, info, [])


def _run_pairing(p, verify, seed):
    rng = np.random.default_rng(seed)
    quad = p["quad"]
    pairs = [(np.array([0, 1], complex), np.array([0, 1], complex))]
    for _ in range(p["pairs"]):
        da, db = rng.integers(0, p["max_degree"] + 1, size=2)
        a = rng.normal(size=da + 1) + 1j * rng.normal(size=da + 1)
        b = rng.normal(size=db + 1) + 1j * rng.normal(size=db + 1)
        pairs.append((a, b))
    rows, checks = [], []
    worst = 0.0
    for i, (a, b) in enumerate(pairs):
        f, g = DiscFunction.polynomial(a), DiscFunction.polynomial(b)
        r = cauchy_pairing_disc(f, g, p["p"], quad)
        delta = None
        if verify:
            r2 = cauchy_pairing_disc(f, g, p["p"], quad.doubled())
            delta = abs(r.rhs - r2.rhs)
            checks.append((abs(r.rhs), delta))
        worst = max(worst, r.gap)
        rows.append([i, r.lhs.real, r.lhs.imag, r.rhs.real, r.rhs.imag, r.gap, r.ratio, delta])
    info = {"max_gap": worst, "closed_form_pair": "f = g = z"}
    if verify:
        info["selfconv"] = _selfconv_summary(checks)
    return RunResult({"results.csv": (HEADERS["PAIRING_CHECK"], rows)}, {"gap": [(r[0], r[5]) for r in rows]}, info, [])


def _smoothing_rows(p, M):
    prof = p["prof"]
    seq = SmoothingSequence(p["profile"], CutoffFamily(prof["cutoff_exponent"]), M, prof["mollifier_width"])
    total = p["profile"].total_integral
    out = []
    for n in p["n_list"]:
        H = seq.boundary(n).values
        wi = seq.weight_integral(n)
        out.append((n, wi, wi / total, float(np.max(np.abs(H))), float(np.median(np.abs(H - 1.0))), float(abs(seq.interior(n, 0.0)))))
    return out, total


def _run_smoothing(p, verify):
    warnings = []
    if not p["n_list"]:
        warnings.append("empty n_list: header-only table")
    res, total = _smoothing_rows(p, p["N"])
    res2 = _smoothing_rows(p, 2 * p["N"])[0] if verify else None
    rows, checks = [], []
    for i, r in enumerate(res):
        delta = None
        if res2 is not None:
            delta = abs(r[4] - res2[i][4])
            checks.append((r[4], delta))
            checks.append((r[3], abs(r[3] - res2[i][3])))
        rows.append(list(r) + [delta])
    wis = [r[1] for r in res]
    meds = [r[4] for r in res]
    info = {
        "profile_integral": total,
        "checks": {
            "max_sup_abs_H": max((r[3] for r in res), default=0.0),
            "weight_nonincreasing": all(b <= a for a, b in zip(wis, wis[1:])),
            "final_weight_fraction": wis[-1] / total if wis else 0.0,
            "median_decreasing": all(b < a for a, b in zip(meds, meds[1:])),
        },
    }
    if verify:
        info["selfconv"] = _selfconv_summary(checks)
    series = {"median_abs_H_minus_1": [(r[0], r[4]) for r in res], "weight_integral": [(r[0], r[1]) for r in res]}
    return RunResult({"results.csv": (HEADERS["SMOOTHING_SUITE"], rows)}, series, info, warnings)


def run(config: ExperimentConfig, verify: bool = False) -> RunResult:
    """Dispatch to the pipeline for ``config.kind``."""
    p = config.params
    k = config.kind
    if k == "ENTROPY":
        return _run_entropy(p, verify)
    if k == "DECOMPOSE":
        return _run_decompose(p, verify)
    if k == "APPROX_KERNEL":
        return _run_approx(p, verify)
    if k == "CYCLICITY":
        return _run_cyclicity(p, verify)
    if k == "PAIRING_CHECK":
        return _run_pairing(p, verify, config.seed)
    return _run_smoothing(p, verify)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _plain(v):
    """Convert numpy scalars and containers for YAML output."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def emit_report(result: RunResult, config: ExperimentConfig, out: Path, verify: bool, timing: float | None = None) -> dict:
    """Write tables, series and the manifest; return the manifest mapping."""
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in result.tables.items():
        with open(out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
        files.append(name)
    for name, pts in result.series.items():
        fn = f"series_{name}.csv"
        with open(out / fn, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y"])
            for x, y in pts:
                w.writerow([_fmt(x), _fmt(y)])
        files.append(fn)
    manifest = {
        "artifact_version": __version__,
        "kind": config.kind,
        "seed": config.seed,
        "verify": verify,
        "config": config.raw,
        "results": _plain(result.info),
        "warnings": list(result.warnings),
        "files": sorted(files),
    }
    if timing is not None:
        manifest["timing_seconds"] = round(timing, 3)
    with open(out / "manifest.yaml", "w") as fh:
        yaml.safe_dump(_plain(manifest), fh, sort_keys=True, default_flow_style=False)
    return manifest


def _fail(out: Path | None, status: int, exc: BaseException) -> int:
    record = {"status": status, "error": type(exc).__name__, "message": str(exc)}
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "error.yaml", "w") as fh:
                yaml.safe_dump(record, fh, sort_keys=True)
        except OSError as io_exc:
            record["write_error"] = f"{out / 'error.yaml'}: {io_exc}"
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modelspace-lab", description="Run a model-space experiment from a YAML config.")
    ap.add_argument("--config", required=True, help="experiment YAML file")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--grid-override", type=int, default=None, metavar="N", help="replace the circle grid size")
    ap.add_argument("--seed", type=int, default=None, metavar="S", help="replace the config seed")
    ap.add_argument("--verify", action="store_true", help="recompute at doubled resolution and report deltas")
    ap.add_argument("--timing", action="store_true", help="record wall time in the manifest (breaks byte identity)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = ExperimentConfig.load(args.config, args.seed, args.grid_override)
    except ConfigError as exc:
        return _fail(out, 2, exc)
    t0 = time.perf_counter()
    try:
        result = run(cfg, args.verify)
        emit_report(result, cfg, out, args.verify, time.perf_counter() - t0 if args.timing else None)
    except HypothesisViolationError as exc:
        return _fail(out, 3, exc)
    except ConfigError as exc:
        return _fail(out, 2, exc)
    except Exception as exc:  # fail closed with a record
        return _fail(out, 1, exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
