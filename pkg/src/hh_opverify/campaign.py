"""Seeded randomized verification campaigns and their reports.

Each trial draws its randomness from ``SeedSequence(seed, spawn_key=(i,))``,
so results do not depend on how trials are scheduled across threads.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import hh
from .eta import (
    ETA_REGISTRY,
    EtaMap,
    check_condition_C,
    check_eq_2_2,
    check_invex,
    get_eta,
    sample_pair,
)
from .functions import REGISTRY_NAMES, kind_of, parse_function, scalar_convex_on
from .linalg import (
    HermitianMatrix,
    ScalarFunction,
    check_property_P,
    eigh,
    operator_norm,
    scale_of,
    spectral_apply,
)
from .preinvex import check_operator_preinvex
from .sampling import hermitian_in_interval, random_hermitian, unit_vector

SUITES = (
    "gelfand", "invex", "condition-c", "preinvex", "chain",
    "corollary1", "estimate", "scalar-oracles", "falsify",
)
MAX_DIM = 16
THREADS_ENV = "HH_OPVERIFY_THREADS"

EXIT_OK = 0
EXIT_UNEXPECTED_VIOLATION = 2
EXIT_MISSING_VIOLATION = 3
EXIT_USAGE = 64

PASS, VIOLATION, ERROR = "pass", "violation", "error"


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    eta: str = "convex"
    function: str = "square"
    dims: tuple[int, ...] = (1, 2, 3, 4)
    trials: int = 100
    seed: int = 0
    tol: float | None = None
    a: float = 0.0
    b: float = 1.0
    threads: int | None = None

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; known: {', '.join(SUITES)}")
        if self.eta not in ETA_REGISTRY:
            raise UsageError(f"unknown eta {self.eta!r}; known: {', '.join(sorted(ETA_REGISTRY))}")
        try:
            parse_function(self.function)
        except KeyError:
            raise UsageError(
                f"unknown function {self.function!r}; known: {', '.join(REGISTRY_NAMES)}"
            ) from None
        if not self.dims or any(not 1 <= d <= MAX_DIM for d in self.dims):
            raise UsageError(f"dims must be a non-empty list of integers in [1, {MAX_DIM}]")
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.tol is not None and not self.tol >= 0:
            raise UsageError("tol must be nonnegative")
        if self.suite == "scalar-oracles" and not self.a < self.b:
            raise UsageError("scalar-oracles needs a < b")


@dataclass
class TrialRecord:
    index: int
    dim: int
    digest: str
    verdict: str
    slack: float
    certificates: dict[str, float] = field(default_factory=dict)
    note: str = ""


@dataclass
class RunReport:
    config: SuiteConfig
    expectation: str
    records: list[TrialRecord]
    wall_time: float = 0.0

    def counts(self) -> dict[str, int]:
        out = {PASS: 0, VIOLATION: 0, ERROR: 0}
        for r in self.records:
            out[r.verdict] += 1
        return out

    @property
    def worst_slack(self) -> float:
        vals = [r.slack for r in self.records if not math.isnan(r.slack)]
        return min(vals) if vals else math.nan

    @property
    def exit_code(self) -> int:
        c = self.counts()
        if self.expectation == "hold" and (c[VIOLATION] or c[ERROR]):
            return EXIT_UNEXPECTED_VIOLATION
        if self.expectation == "violate" and not c[VIOLATION]:
            return EXIT_MISSING_VIOLATION
        return EXIT_OK

    @property
    def status(self) -> str:
        return {
            EXIT_OK: "ok",
            EXIT_UNEXPECTED_VIOLATION: "unexpected-violations",
            EXIT_MISSING_VIOLATION: "expected-violation-not-found",
        }[self.exit_code]

    def summary(self) -> dict:
        c = self.counts()
        return {
            "type": "summary",
            "suite": self.config.suite,
            "eta": self.config.eta,
            "function": self.config.function,
            "seed": self.config.seed,
            "expectation": self.expectation,
            "trials": len(self.records),
            "pass": c[PASS],
            "violation": c[VIOLATION],
            "error": c[ERROR],
            "worst_slack": self.worst_slack,
            "status": self.status,
            "exit_code": self.exit_code,
            "wall_time": self.wall_time,
        }


# --- expectations ------------------------------------------------------------

_OPERATOR_CONVEX = ("square", "identity", "affine", "constant")


def expectation(cfg: SuiteConfig) -> str:
    """What the claims being tested predict: "hold", "violate" or "report"."""
    kind = kind_of(cfg.function)
    eta = cfg.eta
    if cfg.suite == "gelfand":
        return "hold"
    if cfg.suite in ("invex", "condition-c"):
        return "report" if eta == "eta3" else "hold"
    if cfg.suite == "falsify":
        return "violate"
    if cfg.suite == "scalar-oracles":
        return "hold" if scalar_convex_on(cfg.function, cfg.a, cfg.b) else "report"
    if cfg.suite == "preinvex":
        if kind == "constant":
            return "hold"
        if eta == "convex":
            if kind in _OPERATOR_CONVEX:
                return "hold"
            return "violate" if kind == "cube" else "report"
        if eta == "eta1":
            if kind == "square":
                return "hold"
            return "violate" if kind in ("affine", "identity") else "report"
        if eta == "eta2":
            return "violate" if kind in ("square", "affine", "identity") else "report"
        if eta == "eta3" and kind == "abs-neg":
            return "hold" if set(cfg.dims) == {1} else "report"
        return "report"
    if cfg.suite in ("chain", "corollary1"):
        if kind == "square" and eta in ("eta1", "convex"):
            return "hold"
        if eta == "convex" and kind in _OPERATOR_CONVEX:
            return "hold"
        return "report"
    if cfg.suite == "estimate":
        return "hold" if kind == "square" and eta in ("eta1", "convex") else "report"
    return "report"


# --- sampling ----------------------------------------------------------------

def _digest(*mats) -> str:
    h = hashlib.sha256()
    for m in mats:
        h.update(np.ascontiguousarray(m.data if isinstance(m, HermitianMatrix) else m).tobytes())
    return h.hexdigest()[:16]


def draw_pair(eta: EtaMap, rng: np.random.Generator, dim: int, suite: str):
    """Pairs for a trial: cross-component pairs only in dimension 1, per-suite conventions."""
    S = eta.domain
    if suite == "falsify" and S.components is None:
        return hermitian_in_interval(rng, dim, 0.0, 10.0), hermitian_in_interval(rng, dim, 0.0, 10.0)
    if S.components is not None and dim > 1 and suite in ("chain", "corollary1", "estimate"):
        return sample_pair(S, rng, dim, "same")
    return sample_pair(S, rng, dim, "any")


# --- trials ------------------------------------------------------------------

def _trial_gelfand(cfg, f, eta, rng, dim, tol, index):
    A = random_hermitian(rng, dim)
    dec = eigh(A)
    normA = float(np.max(np.abs(dec.eigenvalues)))
    sA = max(1.0, normA)
    diff = float(np.linalg.norm(dec.reconstruct() - A.data, 2))
    recon = diff / normA if normA > 0 else diff
    fA, fvals = spectral_apply(f, A, dec)
    sF = scale_of(fA)
    mapped = np.sort(eigh(fA).eigenvalues)
    spectral = float(np.max(np.abs(mapped - np.sort(fvals)))) / sF
    ident = parse_function("identity")
    lin = f.linear_combination(2.0, ident, -3.0)
    linres = operator_norm(spectral_apply(lin, A, dec)[0] - (2.0 * fA - 3.0 * A)) / max(sF, sA)
    ff, _ = spectral_apply(f * f, A, dec)
    mult = float(np.max(np.abs(ff.data - fA.data @ fA.data))) / sF ** 2
    c = float(np.mean(dec.eigenvalues))
    g = ScalarFunction(lambda t: f.eval(t) - (t - c) ** 2, f.domain, "f-(t-c)^2")
    prop = check_property_P(f, g, A, tol)
    certs = {
        "reconstruction": recon,
        "spectral_mapping": spectral,
        "linearity": linres,
        "multiplicativity": mult,
        "property_P_gap": prop.loewner_gap,
    }
    ok = (recon <= 1e-10 and spectral <= 1e-9 and linres <= 1e-10 and mult <= 1e-9
          and not prop.violation and prop.pointwise)
    return (A,), ok, -max(recon, spectral, linres, mult), certs, ""


def _trial_invex(cfg, f, eta, rng, dim, tol, index):
    x, y = draw_pair(eta, rng, dim, cfg.suite)
    rep = check_invex(eta.domain, eta, [(x, y)], margin=1e-9 if tol is None else tol)
    certs = {"boundary_hits": float(len(rep.boundary_hits)), "violations": float(len(rep.violations))}
    return (x, y), rep.holds, -float(len(rep.violations)), certs, ""


def _trial_condition_c(cfg, f, eta, rng, dim, tol, index):
    x, y = draw_pair(eta, rng, dim, cfg.suite)
    ctol = 1e-12 if tol is None else tol
    rc = check_condition_C(eta, [(x, y)], tol=ctol)
    r22 = check_eq_2_2(eta, [(x, y)], tol=ctol)
    certs = {
        "max_residual": rc.max_residual,
        "path_shift_max_residual": r22.max_residual,
        "boundary": float(sum(r.boundary for r in rc.records)),
        "inapplicable": float(len(rc.inapplicable) + len(r22.inapplicable)),
    }
    ok = rc.holds and r22.holds
    return (x, y), ok, -max(rc.max_residual, r22.max_residual), certs, ""


def _trial_preinvex(cfg, f, eta, rng, dim, tol, index):
    A, B = draw_pair(eta, rng, dim, cfg.suite)
    rep = check_operator_preinvex(f, eta, [(A, B)], tol=1e-8 if tol is None else tol)
    certs = {"worst_gap": rep.worst_gap, "witnesses": float(len(rep.witnesses)),
             "inapplicable": float(len(rep.inapplicable))}
    if rep.witnesses:
        w = min(rep.witnesses, key=lambda w: w.min_eigenvalue / w.scale)
        certs["witness_t"] = w.t
        certs["witness_min_eigenvalue"] = w.min_eigenvalue
    if rep.samples == 0:
        raise ValueError("no applicable samples: " + "; ".join(rep.inapplicable[:2]))
    return (A, B), rep.verdict != "violated", rep.worst_gap, certs, ""


def _chain_certs(rep: hh.ChainReport) -> dict[str, float]:
    s = rep.scale
    return {
        "gap_QM": rep.gaps[0] / s,
        "gap_IQ": rep.gaps[1] / s,
        "gap_RI": rep.gaps[2] / s,
        "gap_ER": rep.gaps[3] / s,
        "gap_EV_R": rep.gap_EV_R / s,
        "fv_fb_distance": rep.fv_fb_distance,
        "quad_error": rep.quad_error,
        "symmetry_residual": rep.symmetry_residual,
        "scale": s,
    }


def _trial_chain(cfg, f, eta, rng, dim, tol, index):
    A, B = draw_pair(eta, rng, dim, cfg.suite)
    rep = hh.hh_chain(f, eta, A, B, hh.GAP_RTOL if tol is None else tol)
    certs = _chain_certs(rep)
    note = "f(V) differs from f(B)" if rep.fv_differs else ""
    return (A, B), rep.holds, min(rep.gaps) / rep.scale, certs, note


def _trial_corollary1(cfg, f, eta, rng, dim, tol, index):
    A, B = draw_pair(eta, rng, dim, cfg.suite)
    rep = hh.hh_chain(f, eta, A, B, hh.GAP_RTOL if tol is None else tol)
    cor = hh.corollary1_check(rep)
    certs = _chain_certs(rep)
    certs["cor1_lower_gap"] = cor.lower_gap / rep.scale
    certs["cor1_slack"] = cor.slack / rep.scale
    return (A, B), cor.holds, min(cor.lower_gap, cor.slack) / rep.scale, certs, ""


def _trial_estimate(cfg, f, eta, rng, dim, tol, index):
    A, B = draw_pair(eta, rng, dim, cfg.suite)
    a, b = np.sort(rng.uniform(0.0, 1.0, size=2))
    a, b = float(a), float(b)
    if not 0.0 < a < b < 1.0:
        a, b = 0.25, 0.75
    x = unit_vector(rng, dim)
    terms = hh.trapezoid_terms(f, A, eta(B, A), a, b)
    vec = hh.trapezoid_estimate(f, eta, A, B, a, b, x, terms=terms)
    nrm = hh.trapezoid_estimate_norm(f, eta, A, B, a, b, terms=terms)
    s = terms.scale
    certs = {
        "a": a, "b": b,
        "vector_lhs": vec.lhs, "vector_rhs": vec.rhs,
        "norm_lhs": nrm.lhs, "norm_rhs": nrm.rhs, "norm_rhs_split": nrm.rhs_alt,
        "quad_error": terms.quad_error,
    }
    slack = min(vec.slack, nrm.slack) / s
    return (A, B, x), vec.holds and nrm.holds, slack, certs, ""


def _trial_scalar_oracles(cfg, f, eta, rng, dim, tol, index):
    if index == 0:
        a, b = cfg.a, cfg.b
    else:
        a, b = (float(v) for v in np.sort(rng.uniform(cfg.a, cfg.b, size=2)))
    left, mean, right = hh.scalar_hh(f, a, b)
    trap = hh.scalar_trapezoid(f, a, b)
    s = max(1.0, abs(left), abs(mean), abs(right))
    eps = 1e-12 * s
    ok = left <= mean + eps and mean <= right + eps and trap.holds
    certs = {"a": a, "b": b, "left": left, "mean": mean, "right": right,
             "trapezoid_lhs": trap.lhs, "trapezoid_rhs": trap.rhs}
    slack = min(mean - left, right - mean, trap.slack) / s
    return (np.array([a, b]),), ok, slack, certs, ""


_TRIALS: dict[str, Callable] = {
    "gelfand": _trial_gelfand,
    "invex": _trial_invex,
    "condition-c": _trial_condition_c,
    "preinvex": _trial_preinvex,
    "falsify": _trial_preinvex,
    "chain": _trial_chain,
    "corollary1": _trial_corollary1,
    "estimate": _trial_estimate,
    "scalar-oracles": _trial_scalar_oracles,
}


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def run_trial(cfg: SuiteConfig, index: int) -> TrialRecord:
    f = parse_function(cfg.function)
    eta = get_eta(cfg.eta)
    dim = 1 if cfg.suite == "scalar-oracles" else cfg.dims[index % len(cfg.dims)]
    rng = trial_rng(cfg.seed, index)
    try:
        inputs, ok, slack, certs, note = _TRIALS[cfg.suite](cfg, f, eta, rng, dim, cfg.tol, index)
    except Exception as exc:  # recorded per trial; the campaign goes on
        return TrialRecord(index, dim, "", ERROR, math.nan, {}, f"{type(exc).__name__}: {exc}")
    return TrialRecord(index, dim, _digest(*inputs), PASS if ok else VIOLATION,
                       float(slack), dict(sorted(certs.items())), note)


def resolve_threads(requested: int | None) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def run_suite(cfg: SuiteConfig) -> RunReport:
    cfg.validate()
    start = time.perf_counter()
    threads = resolve_threads(cfg.threads)
    if threads == 1:
        records = [run_trial(cfg, i) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda i: run_trial(cfg, i), range(cfg.trials)))
    records.sort(key=lambda r: r.index)
    return RunReport(cfg, expectation(cfg), records, time.perf_counter() - start)


# --- emission ----------------------------------------------------------------

def _fmt_real(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _json(obj) -> str:
    # json.dumps prints shortest round-trip floats; reports fix 17 significant digits
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_real(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _trial_dict(r: TrialRecord) -> dict:
    d = {"type": "trial"}
    d.update(asdict(r))
    return d


def emit_report(report: RunReport, fmt: str = "text") -> bytes:
    records = sorted(report.records, key=lambda r: r.index)
    if fmt in ("jsonl", "json-lines"):
        lines = [_json(_trial_dict(r)) for r in records]
        lines.append(_json(report.summary()))
        return ("\n".join(lines) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    cfg = report.config
    out = [
        "# hh-opverify run",
        f"suite {cfg.suite}",
        f"eta {cfg.eta}",
        f"function {cfg.function}",
        f"dims {','.join(map(str, cfg.dims))}",
        f"seed {cfg.seed}",
        f"expectation {report.expectation}",
    ]
    for r in records:
        certs = " ".join(f"{k}={_fmt_real(float(v))}" for k, v in r.certificates.items())
        line = f"trial {r.index} dim {r.dim} digest {r.digest or '-'} {r.verdict} slack={_fmt_real(r.slack)}"
        if certs:
            line += " " + certs
        if r.note:
            line += f" note={json.dumps(r.note)}"
        out.append(line)
    s = report.summary()
    out.append(
        "summary " + " ".join(
            f"{k}={_fmt_real(v) if isinstance(v, float) else v}"
            for k, v in s.items() if k != "type"
        )
    )
    return ("\n".join(out) + "\n").encode()
