"""Operator preinvexity tests and the scalar Rayleigh curves that characterize it.

A function f is operator preinvex with respect to eta when

    f(A + t eta(B, A)) <= (1 - t) f(A) + t f(B)

in the Loewner order. Sampled checks can only falsify or corroborate this, so
a passing report reads "holds-on-samples", never "proved".
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .eta import EtaDomainError, EtaMap, Pair, default_t_grid
from .linalg import (
    DEFAULT_PSD_RTOL,
    DomainError,
    HermitianMatrix,
    ScalarFunction,
    eigh,
    scale_of,
    spectral_apply,
)

HOLDS = "holds-on-samples"
VIOLATED = "violated"
IMAG_ATOL = 1e-12


@dataclass
class Witness:
    A: HermitianMatrix
    B: HermitianMatrix
    t: float
    min_eigenvalue: float
    vector: np.ndarray  # unit eigenvector of the gap for min_eigenvalue
    scale: float


@dataclass
class PreinvexityReport:
    tol: float
    witnesses: list[Witness] = field(default_factory=list)
    samples: int = 0
    inapplicable: list[str] = field(default_factory=list)
    worst_gap: float = np.inf  # min over samples of lambda_min(gap) / scale

    @property
    def verdict(self) -> str:
        return VIOLATED if self.witnesses else HOLDS

    def merge(self, other: "PreinvexityReport") -> "PreinvexityReport":
        return PreinvexityReport(
            self.tol,
            self.witnesses + other.witnesses,
            self.samples + other.samples,
            self.inapplicable + other.inapplicable,
            min(self.worst_gap, other.worst_gap),
        )


def preinvexity_gap(f: ScalarFunction, eta: EtaMap, A: HermitianMatrix, B: HermitianMatrix,
                    t: float) -> tuple[HermitianMatrix, float]:
    """(1 - t) f(A) + t f(B) - f(A + t eta(B, A)) and the scale of its terms."""
    fA, _ = spectral_apply(f, A)
    fB, _ = spectral_apply(f, B)
    fP, _ = spectral_apply(f, A + t * eta(B, A))
    return (1.0 - t) * fA + t * fB - fP, scale_of(fA, fB, fP)


def check_operator_preinvex(f: ScalarFunction, eta: EtaMap, pairs: Iterable[Pair],
                            t_grid: Sequence[float] | None = None,
                            tol: float = DEFAULT_PSD_RTOL) -> PreinvexityReport:
    """Look for Loewner-order violations of preinvexity over sampled pairs and t.

    A sample whose path point has spectrum outside ``f.domain`` (beyond the
    clamping margin) or outside the eta domain is recorded as inapplicable.
    """
    t_grid = default_t_grid() if t_grid is None else t_grid
    report = PreinvexityReport(tol)
    for i, (A, B) in enumerate(pairs):
        try:
            D = eta(B, A)
            fA, _ = spectral_apply(f, A)
            fB, _ = spectral_apply(f, B)
        except (DomainError, EtaDomainError) as exc:
            report.inapplicable.append(f"pair {i}: {exc}")
            continue
        for t in t_grid:
            t = float(t)
            try:
                fP, fvals = spectral_apply(f, A + t * D)
            except DomainError as exc:
                report.inapplicable.append(f"pair {i}, t={t}: {exc}")
                continue
            gap = (1.0 - t) * fA + t * fB - fP
            dec = eigh(gap)
            scale = max(1.0, float(np.max(np.abs(fvals))),
                        _spectral_radius(fA), _spectral_radius(fB))
            lam = float(dec.eigenvalues[0])
            report.samples += 1
            report.worst_gap = min(report.worst_gap, lam / scale)
            if lam < -tol * scale:
                report.witnesses.append(Witness(A, B, t, lam, dec.eigenvectors[:, 0].copy(), scale))
    return report


def _spectral_radius(M: HermitianMatrix) -> float:
    return float(np.max(np.abs(eigh(M).eigenvalues)))


def scalar_preinvex_holds(f: ScalarFunction, a: float, b: float, direction: float, t: float,
                          tol: float = DEFAULT_PSD_RTOL) -> bool:
    """The 1x1 form: f(a + t d) <= (1 - t) f(a) + t f(b), d = eta(b, a)."""
    lhs = f(a + t * direction)
    rhs = (1.0 - t) * f(a) + t * f(b)
    scale = max(1.0, abs(lhs), abs(f(a)), abs(f(b)))
    return rhs - lhs >= -tol * scale


# --- Rayleigh curves ---------------------------------------------------------

@dataclass(frozen=True)
class RayleighCurve:
    """t -> <f(A + t D) x, x> for a unit vector x."""

    f: ScalarFunction
    A: HermitianMatrix
    direction: HermitianMatrix
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex).reshape(-1)
        if x.size != self.A.dim or self.direction.dim != self.A.dim:
            raise ValueError("curve vector and matrices must share a dimension")
        if abs(np.linalg.norm(x) - 1.0) > 1e-12:
            raise ValueError(f"x must be a unit vector, |x| = {np.linalg.norm(x)!r}")
        object.__setattr__(self, "x", x)

    @classmethod
    def from_eta(cls, f: ScalarFunction, eta: EtaMap, A, B, x) -> "RayleighCurve":
        return cls(f, A, eta(B, A), x)

    def value(self, t: float) -> float:
        return phi(self, t)


def _real_form(M: HermitianMatrix, x: np.ndarray) -> float:
    z = M.quadratic_form(x)
    if abs(z.imag) > IMAG_ATOL * max(1.0, abs(z.real)):
        raise ArithmeticError(f"quadratic form has imaginary part {z.imag!r}")
    return z.real


def phi(curve: RayleighCurve, t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t!r} outside [0, 1]")
    fP, _ = spectral_apply(curve.f, curve.A + t * curve.direction)
    return _real_form(fP, curve.x)


def second_differences(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v[:-2] - 2.0 * v[1:-1] + v[2:]


def check_phi_convexity(curve: RayleighCurve, grid_size: int = 101,
                        tol: float | None = None) -> tuple[bool, float]:
    """Convexity of the curve on an equispaced grid via centered second differences.

    Returns (convex, worst second difference). The default tolerance is
    1e-9 * max(1, max |phi| on the grid).
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    ts = np.linspace(0.0, 1.0, grid_size)
    vals = np.array([phi(curve, float(t)) for t in ts])
    d2 = second_differences(vals)
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(vals))))
    worst = float(d2.min())
    return worst >= -tol, worst


@dataclass
class Prop1Report:
    curves_convex: bool
    preinvex_on_path: bool
    curve_results: list[tuple[bool, float]]
    witnesses: list[tuple[float, float, float, float]]  # (t1, t2, lam, lambda_min)
    witness_curves_nonconvex: list[bool]
    inconsistencies: list[str]

    @property
    def consistent(self) -> bool:
        return not self.inconsistencies


def check_prop1_equivalence(f: ScalarFunction, eta: EtaMap, A: HermitianMatrix, B: HermitianMatrix,
                            x_samples: Sequence[np.ndarray], t_grid: Sequence[float] | None = None,
                            tol: float = DEFAULT_PSD_RTOL,
                            lambdas: Sequence[float] = (0.25, 0.5, 0.75)) -> Prop1Report:
    """Cross-check preinvexity on the eta-path from A against convexity of its Rayleigh curves.

    Operator side: for path points C1 = A + t1 D, C2 = A + t2 D (D = eta(B, A))
    and each lambda, test f(C1 + lambda eta(C2, C1)) <= (1-lambda) f(C1) + lambda f(C2).
    Curve side: second differences of <f(A + t D) x, x> on ``t_grid``, which
    must be equispaced. The curve tolerance is twice the operator one, since a
    second difference at t is twice the quadratic form of the lambda = 1/2 gap
    at (t - h, t + h).

    Every operator witness contributes its eigenvector as an extra curve; that
    curve must break the chord inequality at the witness's (t1, t2, lambda).
    """
    ts = np.linspace(0.0, 1.0, 11) if t_grid is None else np.asarray(t_grid, dtype=float)
    h = np.diff(ts)
    if ts.size < 3 or not np.allclose(h, h[0], rtol=1e-12, atol=1e-15):
        raise ValueError("t_grid must be equispaced with at least 3 points")
    D = eta(B, A)
    path = [A + float(t) * D for t in ts]
    fpath = [spectral_apply(f, P)[0] for P in path]
    scale = scale_of(*fpath)
    abs_tol = tol * scale

    witnesses = []
    for i, C1 in enumerate(path):
        for j, C2 in enumerate(path):
            if i == j:
                continue
            direction = eta(C2, C1)
            for lam in lambdas:
                fZ, _ = spectral_apply(f, C1 + lam * direction)
                gap = (1.0 - lam) * fpath[i] + lam * fpath[j] - fZ
                dec = eigh(gap)
                if dec.eigenvalues[0] < -abs_tol:
                    witnesses.append((float(ts[i]), float(ts[j]), float(lam),
                                      float(dec.eigenvalues[0]), dec.eigenvectors[:, 0].copy()))

    def curve_check(x):
        vals = np.array([_real_form(M, x) for M in fpath])
        worst = float(second_differences(vals).min())
        return worst >= -2.0 * abs_tol, worst

    curve_results = [curve_check(np.asarray(x, dtype=complex)) for x in x_samples]

    inconsistencies = []
    witness_nonconvex = []
    for t1, t2, lam, lam_min, x in witnesses:
        s = (1.0 - lam) * t1 + lam * t2
        c = RayleighCurve(f, A, D, x)
        chord = (1.0 - lam) * phi(c, t1) + lam * phi(c, t2)
        broken = phi(c, s) > chord + abs_tol
        witness_nonconvex.append(broken)
        if not broken:
            inconsistencies.append(
                f"operator violation at (t1={t1}, t2={t2}, lambda={lam}) but its witness curve "
                f"satisfies the chord inequality"
            )
    curves_convex = all(ok for ok, _ in curve_results) and not witnesses
    preinvex = not witnesses
    if preinvex:
        for k, (ok, worst) in enumerate(curve_results):
            if not ok:
                inconsistencies.append(
                    f"no operator violation on the path but curve {k} has second difference {worst!r}"
                )
    return Prop1Report(
        curves_convex=curves_convex,
        preinvex_on_path=preinvex,
        curve_results=curve_results,
        witnesses=[w[:4] for w in witnesses],
        witness_curves_nonconvex=witness_nonconvex,
        inconsistencies=inconsistencies,
    )
