"""Eta maps on sets of Hermitian matrices, invex sets and condition C.

An eta map sends a pair (X, Y) of Hermitian matrices to a Hermitian matrix;
``Y + t * eta(X, Y)`` traces the eta-path from ``Y`` toward ``X``. The
built-in maps are the convex map ``X - Y`` and three casewise maps whose case
is chosen from which component of an operator interval union an argument
lies in (``eta1``, ``eta2``) or from the sign of the arguments (``eta3``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .linalg import HermitianMatrix, eigvalsh, is_psd, operator_norm
from .sampling import hermitian_in_interval

CLOSURE_TOL = 1e-9
SIGN_TOL = 1e-10
CONDITION_C_TOL = 1e-12

Pair = tuple[HermitianMatrix, HermitianMatrix]


class EtaDomainError(ValueError):
    """An argument of an eta map lies outside the map's domain."""


def default_t_grid() -> np.ndarray:
    return np.linspace(0.0, 1.0, 21)


def default_t_pairs() -> list[tuple[float, float]]:
    g = np.linspace(0.0, 1.0, 11)
    return [(float(a), float(b)) for a in g for b in g]


@dataclass(frozen=True)
class OperatorSet:
    """Union of open operator intervals ``{A : lo < A < hi}``.

    ``components=None`` stands for the set of all Hermitian matrices.
    """

    components: tuple[tuple[float, float], ...] | None = None
    label: str = "all-hermitian"
    closure_tol: float = CLOSURE_TOL

    @classmethod
    def everything(cls) -> "OperatorSet":
        return cls(None, "all-hermitian")

    @classmethod
    def union(cls, *intervals: tuple[float, float], label: str = "") -> "OperatorSet":
        for lo, hi in intervals:
            if not lo < hi:
                raise ValueError(f"empty operator interval ({lo}, {hi})")
        return cls(tuple((float(lo), float(hi)) for lo, hi in intervals), label or "union")

    def _tol(self, lam: np.ndarray) -> float:
        return self.closure_tol * max(1.0, float(np.max(np.abs(lam))))

    def component_of(self, A: HermitianMatrix, closure: bool = True) -> int | None:
        """Index of the component containing A: strict membership first, then closure."""
        if self.components is None:
            return 0
        lam = eigvalsh(A)
        lmin, lmax = lam[0], lam[-1]
        for k, (lo, hi) in enumerate(self.components):
            if lmin > lo and lmax < hi:
                return k
        if closure:
            tol = self._tol(lam)
            for k, (lo, hi) in enumerate(self.components):
                if lmin >= lo - tol and lmax <= hi + tol:
                    return k
        return None

    def contains(self, A: HermitianMatrix) -> bool:
        return self.component_of(A, closure=False) is not None

    def contains_closure(self, A: HermitianMatrix) -> bool:
        return self.component_of(A, closure=True) is not None

    def offending_eigenvalue(self, A: HermitianMatrix) -> float:
        """Eigenvalue that sits furthest outside the nearest component."""
        lam = eigvalsh(A)
        if self.components is None:
            return math.nan
        best, worst_val = math.inf, math.nan
        for lo, hi in self.components:
            below, above = lo - lam[0], lam[-1] - hi
            excess = max(below, above)
            if excess < best:
                best = excess
                worst_val = float(lam[0] if below >= above else lam[-1])
        return worst_val

    def sample(self, rng: np.random.Generator, dim: int, component: int | None = None) -> HermitianMatrix:
        if self.components is None:
            kind = int(rng.integers(3))
            bounds = [(0.0, 2.0), (-2.0, 0.0), (-2.0, 2.0)][kind]
            return hermitian_in_interval(rng, dim, *bounds)
        if component is None:
            component = int(rng.integers(len(self.components)))
        lo, hi = self.components[component]
        return hermitian_in_interval(rng, dim, lo, hi)


@dataclass(frozen=True)
class EtaMap:
    rule: Callable[[HermitianMatrix, HermitianMatrix], HermitianMatrix]
    domain: OperatorSet = field(default_factory=OperatorSet.everything)
    label: str = "eta"

    def __call__(self, X: HermitianMatrix, Y: HermitianMatrix) -> HermitianMatrix:
        if X.dim != Y.dim:
            raise ValueError(f"dimension mismatch: {X.dim} vs {Y.dim}")
        out = self.rule(X, Y)
        assert out.dim == X.dim
        return out

    def endpoint(self, A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
        """V = A + eta(B, A), the far end of the eta-path from A."""
        return A + self(B, A)


@dataclass(frozen=True)
class PathPoint:
    base: HermitianMatrix
    direction: HermitianMatrix
    t: float

    def value(self) -> HermitianMatrix:
        return self.base + self.t * self.direction


# --- built-in maps -----------------------------------------------------------

def make_convex_eta() -> EtaMap:
    return EtaMap(lambda X, Y: X - Y, OperatorSet.everything(), "convex")


def make_eta1() -> EtaMap:
    """Example map on T = (-3, -1) union U = (1, 4)."""
    S = OperatorSet.union((-3.0, -1.0), (1.0, 4.0), label="T|U")
    T, U = 0, 1

    def rule(X, Y):
        cx, cy = _components(S, X, Y, "eta1")
        if cx == cy:
            return X - Y
        one = HermitianMatrix.identity(X.dim)
        if cx == T and cy == U:
            return one - Y
        return -one - Y

    return EtaMap(rule, S, "eta1")


def make_eta2() -> EtaMap:
    """Example map on V = (-2, 0) union W = (0, 2); zero across components."""
    S = OperatorSet.union((-2.0, 0.0), (0.0, 2.0), label="V|W")

    def rule(X, Y):
        cx, cy = _components(S, X, Y, "eta2")
        if cx == cy:
            return X - Y
        return HermitianMatrix.zeros(X.dim)

    return EtaMap(rule, S, "eta2")


def make_eta3() -> EtaMap:
    """X - Y when X, Y share a sign (both PSD or both NSD), else Y - X."""

    def rule(X, Y):
        both_pos = is_psd(X, SIGN_TOL).holds and is_psd(Y, SIGN_TOL).holds
        both_neg = is_psd(-X, SIGN_TOL).holds and is_psd(-Y, SIGN_TOL).holds
        return X - Y if (both_pos or both_neg) else Y - X

    return EtaMap(rule, OperatorSet.everything(), "eta3")


def _components(S: OperatorSet, X, Y, name) -> tuple[int, int]:
    cx, cy = S.component_of(X), S.component_of(Y)
    if cx is None or cy is None:
        bad = X if cx is None else Y
        raise EtaDomainError(
            f"{name}: argument with spectrum {eigvalsh(bad)} lies in no component of {S.label}"
        )
    return cx, cy


ETA_REGISTRY: dict[str, Callable[[], EtaMap]] = {
    "convex": make_convex_eta,
    "eta1": make_eta1,
    "eta2": make_eta2,
    "eta3": make_eta3,
}


def get_eta(name: str) -> EtaMap:
    try:
        return ETA_REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown eta {name!r}; known: {', '.join(sorted(ETA_REGISTRY))}") from None


def sample_pair(S: OperatorSet, rng: np.random.Generator, dim: int, mode: str = "any") -> Pair:
    """Draw (X, Y) from S. ``mode`` is "any", "same" or "cross" component."""
    if S.components is None or len(S.components) == 1 or mode == "any":
        return S.sample(rng, dim), S.sample(rng, dim)
    k = len(S.components)
    cx = int(rng.integers(k))
    if mode == "same":
        cy = cx
    elif mode == "cross":
        cy = (cx + 1 + int(rng.integers(k - 1))) % k
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    return S.sample(rng, dim, cx), S.sample(rng, dim, cy)


# --- checkers ----------------------------------------------------------------

@dataclass
class InvexViolation:
    pair_index: int
    t: float
    eigenvalue: float
    boundary: bool  # fails strict membership only; accepted under closure


@dataclass
class InvexReport:
    samples: int = 0
    violations: list[InvexViolation] = field(default_factory=list)
    boundary_hits: list[InvexViolation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def check_invex(S: OperatorSet, eta: EtaMap, pairs: Iterable[Pair],
                t_grid: Sequence[float] | None = None, margin: float = CLOSURE_TOL) -> InvexReport:
    """Test that y + t*eta(x, y) stays in S for sampled pairs and t."""
    t_grid = default_t_grid() if t_grid is None else t_grid
    closure_set = OperatorSet(S.components, S.label, margin)
    report = InvexReport()
    for i, (x, y) in enumerate(pairs):
        d = eta(x, y)
        for t in t_grid:
            z = y + float(t) * d
            report.samples += 1
            if closure_set.contains(z):
                continue
            v = InvexViolation(i, float(t), closure_set.offending_eigenvalue(z), False)
            if closure_set.contains_closure(z):
                v.boundary = True
                report.boundary_hits.append(v)
            else:
                report.violations.append(v)
    return report


@dataclass
class ConditionCRecord:
    pair_index: int
    t: float
    first: float   # ||eta(y, z) + t eta(x, y)||, z = y + t eta(x, y)
    second: float  # ||eta(x, z) - (1 - t) eta(x, y)||
    scale: float
    boundary: bool


@dataclass
class ConditionCReport:
    tol: float
    records: list[ConditionCRecord] = field(default_factory=list)
    violations: list[ConditionCRecord] = field(default_factory=list)
    inapplicable: list[tuple[int, float, str]] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        """Largest residual relative to its sample scale."""
        return max((max(r.first, r.second) / r.scale for r in self.records), default=0.0)

    @property
    def holds(self) -> bool:
        return not self.violations


def _pair_scale(x, y) -> float:
    return max(1.0, operator_norm(x), operator_norm(y))


def check_condition_C(eta: EtaMap, pairs: Iterable[Pair], t_grid: Sequence[float] | None = None,
                      tol: float = CONDITION_C_TOL) -> ConditionCReport:
    t_grid = default_t_grid() if t_grid is None else t_grid
    S = eta.domain
    report = ConditionCReport(tol)
    for i, (x, y) in enumerate(pairs):
        d = eta(x, y)
        scale = _pair_scale(x, y)
        for t in t_grid:
            t = float(t)
            z = y + t * d
            if not S.contains_closure(z):
                report.inapplicable.append((i, t, "intermediate point outside domain"))
                continue
            try:
                r1 = operator_norm(eta(y, z) + t * d)
                r2 = operator_norm(eta(x, z) - (1.0 - t) * d)
            except EtaDomainError as exc:
                report.inapplicable.append((i, t, str(exc)))
                continue
            rec = ConditionCRecord(i, t, r1, r2, scale, not S.contains(z))
            report.records.append(rec)
            if max(r1, r2) > tol * scale:
                report.violations.append(rec)
    return report


@dataclass
class PathShiftRecord:
    pair_index: int
    t1: float
    t2: float
    residual: float
    scale: float


@dataclass
class PathShiftReport:
    tol: float
    records: list[PathShiftRecord] = field(default_factory=list)
    violations: list[PathShiftRecord] = field(default_factory=list)
    inapplicable: list[tuple[int, float, float, str]] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((r.residual / r.scale for r in self.records), default=0.0)

    @property
    def holds(self) -> bool:
        return not self.violations


def check_eq_2_2(eta: EtaMap, pairs: Iterable[Pair],
                 t_pairs: Sequence[tuple[float, float]] | None = None,
                 tol: float = CONDITION_C_TOL) -> PathShiftReport:
    """eta(y + t2 d, y + t1 d) == (t2 - t1) d with d = eta(x, y)."""
    t_pairs = default_t_pairs() if t_pairs is None else t_pairs
    S = eta.domain
    report = PathShiftReport(tol)
    for i, (x, y) in enumerate(pairs):
        d = eta(x, y)
        scale = _pair_scale(x, y)
        for t1, t2 in t_pairs:
            z1, z2 = y + t1 * d, y + t2 * d
            if not (S.contains_closure(z1) and S.contains_closure(z2)):
                report.inapplicable.append((i, t1, t2, "path point outside domain"))
                continue
            try:
                r = operator_norm(eta(z2, z1) - (t2 - t1) * d)
            except EtaDomainError as exc:
                report.inapplicable.append((i, t1, t2, str(exc)))
                continue
            rec = PathShiftRecord(i, t1, t2, r, scale)
            report.records.append(rec)
            if r > tol * scale:
                report.violations.append(rec)
    return report
