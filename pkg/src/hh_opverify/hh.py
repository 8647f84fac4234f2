"""Operator-valued integrals and Hermite-Hadamard certificates.

Everything here reduces an operator inequality ``X <= Y`` to a gap
certificate ``lambda_min(Y - X)``, which is nonnegative (up to tolerance)
exactly when the inequality holds in the Loewner order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .eta import EtaDomainError, EtaMap, make_convex_eta
from .linalg import (
    HermitianMatrix,
    ScalarFunction,
    eigvalsh,
    operator_norm,
    scale_of,
    spectral_apply,
)

QUAD_START = 8
QUAD_MAX = 256
QUAD_RTOL = 1e-11
SYMMETRY_RTOL = 1e-11
GAP_RTOL = 1e-8
SLACK_RTOL = 1e-9
SIMPSON_TOL = 1e-12


class QuadratureSymmetryError(AssertionError):
    """Forward and reversed path integrals disagree."""


class NegativeRangeError(ValueError):
    """f takes negative values where the trapezoid estimates need f >= 0."""


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1], made exactly symmetric about 1/2."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class QuadResult:
    value: HermitianMatrix
    error: float          # norm of the last successive difference
    nodes: int
    converged: bool
    scale: float          # max(1, largest ||f(A + t D)|| seen at the nodes)
    symmetry_residual: float = math.nan


def _gl_sum(f, A, D, lo, hi, n, require_nonnegative=False, reverse=False):
    ts, ws = gauss_legendre(n)
    width = hi - lo
    acc = np.zeros((A.dim, A.dim), dtype=complex)
    scale = 1.0
    for t, w in zip(ts, ws):
        s = (1.0 - t) if reverse else t
        fP, fvals = spectral_apply(f, A + (lo + width * s) * D)
        peak = float(np.max(np.abs(fvals)))
        scale = max(scale, peak)
        if require_nonnegative and fvals.min() < -1e-12 * max(1.0, peak):
            raise NegativeRangeError(
                f"{f.label} takes value {fvals.min()!r} on the path at s={lo + width * s!r}"
            )
        acc += (width * w) * fP.data
    return HermitianMatrix._trusted(acc), scale


def operator_integral(f: ScalarFunction, A: HermitianMatrix, D: HermitianMatrix,
                      nodes: int = QUAD_START, lo: float = 0.0, hi: float = 1.0,
                      max_nodes: int = QUAD_MAX, rtol: float = QUAD_RTOL,
                      check_symmetry: bool | None = None, refine: bool = True,
                      require_nonnegative: bool = False) -> QuadResult:
    """Gauss-Legendre approximation of the integral of f(A + s D) over s in [lo, hi].

    The node count doubles from ``nodes`` until successive results agree within
    ``rtol * scale`` in operator norm, or ``max_nodes`` is reached (then
    ``converged`` is False). With ``refine=False`` a single ``nodes``-point rule
    is used and ``error`` is nan.

    On [0, 1] the reversed path s -> f(A + (1 - s) D) is integrated as well and
    must agree within 1e-11 * scale; ``check_symmetry`` forces this on or off.
    """
    if A.dim != D.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {D.dim}")
    prev, scale = _gl_sum(f, A, D, lo, hi, nodes, require_nonnegative)
    n, err, converged = nodes, math.nan, not refine
    while refine:
        if 2 * n > max_nodes:
            break
        cur, s2 = _gl_sum(f, A, D, lo, hi, 2 * n, require_nonnegative)
        scale = max(scale, s2)
        err = operator_norm(cur - prev)
        prev, n = cur, 2 * n
        if err <= rtol * scale:
            converged = True
            break
    if check_symmetry is None:
        check_symmetry = (lo, hi) == (0.0, 1.0)
    sym = math.nan
    if check_symmetry:
        rev, _ = _gl_sum(f, A, D, lo, hi, n, require_nonnegative, reverse=True)
        sym = operator_norm(rev - prev)
        if sym > SYMMETRY_RTOL * scale:
            raise QuadratureSymmetryError(
                f"reversed-path integral differs by {sym:.3e} (scale {scale:.3e})"
            )
    return QuadResult(prev, err, n, converged, scale, sym)


# --- Hermite-Hadamard chain --------------------------------------------------

@dataclass(frozen=True)
class ChainReport:
    """Terms of the operator Hermite-Hadamard chain and their gap certificates.

    M = f((A+V)/2), Q = [f((3A+V)/4) + f((A+3V)/4)]/2, I = integral of
    f(A + t D), R = [M + (f(A)+f(V))/2]/2, E = (f(A)+f(B))/2, with
    D = eta(B, A) and V = A + D. ``gaps`` are lambda_min of Q-M, I-Q, R-I, E-R.
    """

    M: HermitianMatrix
    Q: HermitianMatrix
    I: HermitianMatrix
    R: HermitianMatrix
    E: HermitianMatrix
    E_V: HermitianMatrix        # (f(A) + f(V))/2
    V: HermitianMatrix
    gaps: tuple[float, float, float, float]
    gap_EV_R: float             # lambda_min(E_V - R)
    fv_fb_distance: float       # ||f(V) - f(B)||
    quad_error: float
    symmetry_residual: float
    scale: float
    tol: float

    @property
    def terms(self) -> tuple[HermitianMatrix, ...]:
        return self.M, self.Q, self.I, self.R, self.E

    @property
    def holds(self) -> bool:
        return min(self.gaps) >= -self.tol * self.scale

    @property
    def fv_differs(self) -> bool:
        """f(V) and f(B) differ materially, so E and E_V are different bounds."""
        return self.fv_fb_distance > self.tol * self.scale


def lambda_min(M: HermitianMatrix) -> float:
    return float(eigvalsh(M)[0])


def hh_chain(f: ScalarFunction, eta: EtaMap, A: HermitianMatrix, B: HermitianMatrix,
             tol: float = GAP_RTOL) -> ChainReport:
    for name, X in (("A", A), ("B", B)):
        if not eta.domain.contains_closure(X):
            raise EtaDomainError(f"{name} is outside the domain {eta.domain.label} of {eta.label}")
    D = eta(B, A)
    V = A + D
    fA, _ = spectral_apply(f, A)
    fV, _ = spectral_apply(f, V)
    fB, _ = spectral_apply(f, B)
    M, _ = spectral_apply(f, 0.5 * (A + V))
    q1, _ = spectral_apply(f, 0.25 * (3.0 * A + V))
    q2, _ = spectral_apply(f, 0.25 * (A + 3.0 * V))
    Q = 0.5 * (q1 + q2)
    quad = operator_integral(f, A, D)
    I = quad.value
    E_V = 0.5 * (fA + fV)
    R = 0.5 * (M + E_V)
    E = 0.5 * (fA + fB)
    scale = scale_of(M, Q, I, R, E)
    gaps = (lambda_min(Q - M), lambda_min(I - Q), lambda_min(R - I), lambda_min(E - R))
    return ChainReport(
        M, Q, I, R, E, E_V, V, gaps, lambda_min(E_V - R), operator_norm(fV - fB),
        quad.error, quad.symmetry_residual, scale, tol,
    )


def segment_chain_terms(f: ScalarFunction, A: HermitianMatrix, B: HermitianMatrix):
    """The operator-convex chain written directly in A and B, integrand f((1-t)A + tB)."""
    M, _ = spectral_apply(f, 0.5 * (A + B))
    q1, _ = spectral_apply(f, 0.25 * (3.0 * A + B))
    q2, _ = spectral_apply(f, 0.25 * (A + 3.0 * B))
    ts, ws = gauss_legendre(QUAD_START * 2)
    acc = np.zeros((A.dim, A.dim), dtype=complex)
    for t, w in zip(ts, ws):
        acc += w * spectral_apply(f, (1.0 - t) * A + t * B)[0].data
    I = HermitianMatrix._trusted(acc)
    fA, _ = spectral_apply(f, A)
    fB, _ = spectral_apply(f, B)
    E = 0.5 * (fA + fB)
    return M, 0.5 * (q1 + q2), I, 0.5 * (M + E), E


@dataclass(frozen=True)
class Corollary1Result:
    holds: bool
    lower_gap: float  # lambda_min(I - M)
    slack: float      # lambda_min((E - I) - (I - M))


def corollary1_check(report: ChainReport, tol: float | None = None) -> Corollary1Result:
    """0 <= I - M <= E - I in the Loewner order."""
    tol = report.tol if tol is None else tol
    lower = lambda_min(report.I - report.M)
    slack = lambda_min((report.E - report.I) - (report.I - report.M))
    bound = -tol * report.scale
    return Corollary1Result(lower >= bound and slack >= bound, lower, slack)


# --- trapezoid estimates -----------------------------------------------------

@dataclass(frozen=True)
class TrapezoidTerms:
    """K = Phi(a)/2 + Phi(b)/2 - (1/(b-a)) * integral of Phi over [a, b],
    where Phi(t) is the integral of f(A + s D) over [0, t]."""

    K: HermitianMatrix
    f_a: HermitianMatrix  # f(A + a D)
    f_b: HermitianMatrix  # f(A + b D)
    a: float
    b: float
    quad_error: float
    inner_nodes: int
    outer_nodes: int
    scale: float


def _check_window(a: float, b: float) -> None:
    if not (0.0 < a < b < 1.0):
        raise ValueError(f"need 0 < a < b < 1, got a={a!r}, b={b!r}")


def trapezoid_terms(f: ScalarFunction, A: HermitianMatrix, D: HermitianMatrix,
                    a: float, b: float) -> TrapezoidTerms:
    """Outer Gauss-Legendre over [a, b] of the inner cumulative integral.

    The inner node count is refined once on [0, b], the longest inner
    interval; the coarser of the last two levels (already within tolerance of
    its refinement) is reused at every outer node.
    """
    _check_window(a, b)
    phi_b = operator_integral(f, A, D, hi=b, check_symmetry=False, require_nonnegative=True)
    n_in = max(QUAD_START, phi_b.nodes // 2) if phi_b.converged else phi_b.nodes
    phi_a = operator_integral(f, A, D, nodes=n_in, hi=a, refine=False, check_symmetry=False,
                              require_nonnegative=True)
    scale = phi_b.scale

    def outer(n):
        ts, ws = gauss_legendre(n)
        acc = np.zeros((A.dim, A.dim), dtype=complex)
        for t, w in zip(ts, ws):
            tt = a + (b - a) * t
            inner = operator_integral(f, A, D, nodes=n_in, hi=tt, refine=False,
                                      check_symmetry=False, require_nonnegative=True)
            acc += ((b - a) * w) * inner.value.data
        return HermitianMatrix._trusted(acc)

    n_out = QUAD_START
    prev = outer(n_out)
    err = math.nan
    while 2 * n_out <= QUAD_MAX:
        cur = outer(2 * n_out)
        err = operator_norm(cur - prev)
        prev, n_out = cur, 2 * n_out
        if err <= QUAD_RTOL * scale:
            break
    K = 0.5 * (phi_a.value + phi_b.value) - prev / (b - a)
    f_a, _ = spectral_apply(f, A + a * D)
    f_b, _ = spectral_apply(f, A + b * D)
    err = max(err, phi_b.error)
    return TrapezoidTerms(K, f_a, f_b, a, b, err, n_in, n_out, scale_of(f_a, f_b, phi_b.value))


@dataclass(frozen=True)
class EstimateReport:
    lhs: float
    rhs: float
    a: float
    b: float
    mode: str                    # "vector", "norm" or "scalar"
    x: np.ndarray | None = None
    rhs_alt: float | None = None  # norm mode: (b-a)/8 (||f(A+aD)|| + ||f(A+bD)||)
    floor: float = 0.0
    quad_error: float = math.nan

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        ok = self.lhs <= self.rhs + self.floor
        if self.rhs_alt is not None:
            ok = ok and self.rhs <= self.rhs_alt + self.floor
        return ok


def _direction(eta: EtaMap, A, B) -> HermitianMatrix:
    for name, X in (("A", A), ("B", B)):
        if not eta.domain.contains_closure(X):
            raise EtaDomainError(f"{name} is outside the domain {eta.domain.label} of {eta.label}")
    return eta(B, A)


def trapezoid_estimate(f: ScalarFunction, eta: EtaMap, A: HermitianMatrix, B: HermitianMatrix,
                       a: float, b: float, x: np.ndarray,
                       terms: TrapezoidTerms | None = None) -> EstimateReport:
    """Quadratic-form trapezoid estimate for a unit vector x.

    lhs = |<K x, x>| and rhs = (b-a)/8 * (<f(A+aD)x,x> + <f(A+bD)x,x>).
    """
    _check_window(a, b)
    x = np.asarray(x, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("x must be a unit vector")
    if terms is None:
        terms = trapezoid_terms(f, A, _direction(eta, A, B), a, b)
    lhs = abs(terms.K.quadratic_form(x).real)
    rhs = (b - a) / 8.0 * (terms.f_a.quadratic_form(x).real + terms.f_b.quadratic_form(x).real)
    return EstimateReport(lhs, rhs, a, b, "vector", x, None, SLACK_RTOL * terms.scale,
                          terms.quad_error)


def trapezoid_estimate_norm(f: ScalarFunction, eta: EtaMap, A: HermitianMatrix, B: HermitianMatrix,
                            a: float, b: float,
                            terms: TrapezoidTerms | None = None) -> EstimateReport:
    """Operator-norm form: ||K|| <= (b-a)/8 ||f(A+aD) + f(A+bD)|| <= (b-a)/8 (||.|| + ||.||)."""
    _check_window(a, b)
    if terms is None:
        terms = trapezoid_terms(f, A, _direction(eta, A, B), a, b)
    c = (b - a) / 8.0
    return EstimateReport(
        operator_norm(terms.K),
        c * operator_norm(terms.f_a + terms.f_b),
        a, b, "norm", None,
        c * (operator_norm(terms.f_a) + operator_norm(terms.f_b)),
        SLACK_RTOL * terms.scale, terms.quad_error,
    )


def convex_specialization(f: ScalarFunction, A: HermitianMatrix, B: HermitianMatrix,
                          a: float, b: float, x: np.ndarray) -> EstimateReport:
    """Trapezoid estimate along the straight segment (1-s)A + sB."""
    return trapezoid_estimate(f, make_convex_eta(), A, B, a, b, x)


def convex_specialization_norm(f: ScalarFunction, A: HermitianMatrix, B: HermitianMatrix,
                               a: float, b: float) -> EstimateReport:
    return trapezoid_estimate_norm(f, make_convex_eta(), A, B, a, b)


# --- scalar oracles ----------------------------------------------------------

def adaptive_simpson(g: Callable[[float], float], a: float, b: float,
                     tol: float = SIMPSON_TOL, max_depth: int = 50) -> float:
    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(lo, hi, fa, fm, fb, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = g(lm), g(rm)
        left = simpson(fa, flm, fm, lo, mid)
        right = simpson(fm, frm, fb, mid, hi)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (rec(lo, mid, fa, flm, fm, left, eps / 2.0, depth + 1)
                + rec(mid, hi, fm, frm, fb, right, eps / 2.0, depth + 1))

    fa, fb, fm = g(a), g(b), g(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


def scalar_hh(f: Callable[[float], float], a: float, b: float) -> tuple[float, float, float]:
    """(f((a+b)/2), mean of f over [a, b], (f(a)+f(b))/2)."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a!r}, b={b!r}")
    mean = adaptive_simpson(lambda t: float(f(t)), a, b) / (b - a)
    return float(f(0.5 * (a + b))), mean, 0.5 * (float(f(a)) + float(f(b)))


def scalar_trapezoid(f: Callable[[float], float], a: float, b: float,
                     fprime: Callable[[float], float] | None = None) -> EstimateReport:
    """|(f(a)+f(b))/2 - mean f| <= (b-a)(|f'(a)| + |f'(b)|)/8 for |f'| convex.

    Convexity of |f'| is the caller's responsibility.
    """
    if fprime is None:
        fprime = getattr(f, "derivative", None)
        if fprime is None:
            raise ValueError("scalar_trapezoid needs the derivative of f")
    _, mean, right = scalar_hh(f, a, b)
    lhs = abs(right - mean)
    rhs = (b - a) * (abs(float(fprime(a))) + abs(float(fprime(b)))) / 8.0
    return EstimateReport(lhs, rhs, a, b, "scalar", floor=SLACK_RTOL * max(1.0, abs(right)))


def scalar_chain(f: Callable[[float], float], a: float, v: float, b: float) -> tuple[float, ...]:
    """The five chain terms for 1x1 operators, integral by adaptive Simpson."""
    def g(t):
        return float(f(a + t * (v - a)))
    M = float(f(0.5 * (a + v)))
    Q = 0.5 * (float(f(0.25 * (3 * a + v))) + float(f(0.25 * (a + 3 * v))))
    I = adaptive_simpson(g, 0.0, 1.0)
    R = 0.5 * (M + 0.5 * (float(f(a)) + float(f(v))))
    E = 0.5 * (float(f(a)) + float(f(b)))
    return M, Q, I, R, E
