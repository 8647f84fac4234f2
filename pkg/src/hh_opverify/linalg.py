"""Dense Hermitian linear algebra: Jacobi eigensolver, functional calculus,
operator norm and Loewner-order tests.

Matrices are small (dim <= 16) so everything is dense and eager.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

HERMITIAN_ATOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_RTOL = 1e-14
DOMAIN_MARGIN = 1e-9
DEFAULT_PSD_RTOL = 1e-8


class HermitianityError(ValueError):
    """Input matrix is not Hermitian within tolerance."""

    def __init__(self, i: int, j: int, deviation: float):
        self.i, self.j, self.deviation = i, j, deviation
        super().__init__(
            f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) are not conjugate "
            f"(|a_ij - conj(a_ji)| = {deviation:.3e})"
        )


class EigenConvergenceError(RuntimeError):
    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi did not converge after {sweeps} sweeps; "
            f"off-diagonal residual {residual:.3e}"
        )


class DomainError(ValueError):
    """A spectrum (or scalar argument) falls outside a function's domain."""

    def __init__(self, value: float, domain: tuple[float, float], label: str = ""):
        self.value = value
        self.domain = domain
        name = f" of {label}" if label else ""
        super().__init__(f"eigenvalue {value!r} outside domain{name} [{domain[0]}, {domain[1]}]")


class HermitianMatrix:
    """A self-adjoint matrix. Entries are symmetrized on construction."""

    __slots__ = ("data",)

    def __init__(self, entries, atol: float = HERMITIAN_ATOL):
        a = np.array(entries, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        dev = np.abs(a - a.conj().T)
        if dev.max() > atol:
            i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
            raise HermitianityError(int(i), int(j), float(dev[i, j]))
        self.data = _symmetrize(a)

    @classmethod
    def _trusted(cls, a: np.ndarray) -> "HermitianMatrix":
        # Skips validation; used for results that are Hermitian by construction.
        obj = cls.__new__(cls)
        obj.data = _symmetrize(np.asarray(a, dtype=complex))
        return obj

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls._trusted(np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls._trusted(np.zeros((dim, dim)))

    @classmethod
    def diag(cls, values) -> "HermitianMatrix":
        return cls._trusted(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __add__(self, other):
        if isinstance(other, HermitianMatrix):
            _check_dims(self, other)
            return HermitianMatrix._trusted(self.data + other.data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianMatrix):
            _check_dims(self, other)
            return HermitianMatrix._trusted(self.data - other.data)
        return NotImplemented

    def __neg__(self):
        return HermitianMatrix._trusted(-self.data)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return HermitianMatrix._trusted(float(scalar) * self.data)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __matmul__(self, other):
        # products of Hermitian matrices are not Hermitian in general
        if isinstance(other, HermitianMatrix):
            return self.data @ other.data
        return self.data @ other

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim}, data={self.data!r})"

    def quadratic_form(self, x: np.ndarray) -> complex:
        """<Ax, x> for a column vector x."""
        x = np.asarray(x, dtype=complex)
        return complex(np.vdot(x, self.data @ x))

    def allclose(self, other: "HermitianMatrix", atol: float) -> bool:
        return operator_norm(self - other) <= atol


def _symmetrize(a: np.ndarray) -> np.ndarray:
    out = 0.5 * (a + a.conj().T)
    np.fill_diagonal(out, out.diagonal().real)
    return out


def _check_dims(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def as_hermitian(a) -> HermitianMatrix:
    return a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray   # ascending, real
    eigenvectors: np.ndarray  # columns orthonormal
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


@dataclass(frozen=True)
class ScalarFunction:
    """Real continuous function on the interval ``domain``.

    ``eval`` must accept numpy arrays of reals. ``derivative`` is optional
    and only used by the scalar trapezoid oracle.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (-math.inf, math.inf)
    label: str = "f"
    derivative: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        lo, hi = self.domain
        if np.any(arr < lo) or np.any(arr > hi) or np.any(np.isnan(arr)):
            bad = arr[(arr < lo) | (arr > hi) | np.isnan(arr)].flat[0]
            raise DomainError(float(bad), self.domain, self.label)
        out = np.asarray(self.eval(arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    def clamp(self, values: np.ndarray, margin: float) -> np.ndarray:
        """Clamp values lying within ``margin`` of the domain onto it."""
        lo, hi = self.domain
        values = np.asarray(values, dtype=float)
        out_lo = values < lo - margin
        out_hi = values > hi + margin
        if np.any(out_lo | out_hi):
            raise DomainError(float(values[out_lo | out_hi][0]), self.domain, self.label)
        return np.clip(values, lo, hi)

    def __mul__(self, other: "ScalarFunction") -> "ScalarFunction":
        lo = max(self.domain[0], other.domain[0])
        hi = min(self.domain[1], other.domain[1])
        f, g = self.eval, other.eval
        return ScalarFunction(lambda t: f(t) * g(t), (lo, hi), f"({self.label})*({other.label})")

    def linear_combination(self, alpha: float, other: "ScalarFunction", beta: float) -> "ScalarFunction":
        lo = max(self.domain[0], other.domain[0])
        hi = min(self.domain[1], other.domain[1])
        f, g = self.eval, other.eval
        return ScalarFunction(
            lambda t: alpha * f(t) + beta * g(t), (lo, hi),
            f"{alpha}*({self.label})+{beta}*({other.label})",
        )


# --- eigensolver -------------------------------------------------------------

def _jacobi(a_in: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    # Plain Python complex arithmetic: for dim <= 16 this beats per-rotation
    # numpy calls by several times.
    n = a_in.shape[0]
    a = [[complex(z) for z in row] for row in a_in.tolist()]
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    if n == 1:
        return np.array([a[0][0].real]), np.array(v), 0
    fro = math.sqrt(sum(z.real * z.real + z.imag * z.imag for row in a for z in row))
    target = JACOBI_RTOL * fro
    off = _offdiag_mass(a)
    sweeps = 0
    while off > target:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise EigenConvergenceError(off, sweeps)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r == 0.0:
                    continue
                ph = apq / r
                cph = ph.conjugate()
                theta = (a[q][q].real - a[p][p].real) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(ph)) @ [[c, s], [-s, c]] on columns p, q; A <- J* A J
                sc, cc = s * cph, c * cph
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x - sc * y
                    row[q] = s * x + cc * y
                rp, rq = a[p], a[q]
                sp, cp = s * ph, c * ph
                for k in range(n):
                    x, y = rp[k], rq[k]
                    rp[k] = c * x - sp * y
                    rq[k] = s * x + cp * y
                rp[q] = rq[p] = 0j
                rp[p] = complex(rp[p].real)
                rq[q] = complex(rq[q].real)
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x - sc * y
                    row[q] = s * x + cc * y
        off = _offdiag_mass(a)
    return np.array([a[i][i].real for i in range(n)]), np.array(v, dtype=complex), sweeps


def _offdiag_mass(a: list[list[complex]]) -> float:
    # summed directly: total-minus-trace cancels catastrophically
    return math.sqrt(sum(
        z.real * z.real + z.imag * z.imag
        for i, row in enumerate(a) for j, z in enumerate(row) if i != j
    ))


def _fix_phases(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            z = col[nz[0]]
            v[:, k] = col * (abs(z) / z)
    return v


def eigh(A: HermitianMatrix) -> SpectralDecomposition:
    """Eigendecomposition by cyclic complex Jacobi rotations.

    Eigenvalues come back ascending (stable sort), and each eigenvector's first
    nonzero component is made real positive, so the output is deterministic.
    """
    w, v, sweeps = _jacobi(A.data)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = _fix_phases(v[:, order])
    return SpectralDecomposition(w, v, sweeps)


def eigvalsh(A: HermitianMatrix) -> np.ndarray:
    return eigh(A).eigenvalues


# --- functional calculus -----------------------------------------------------

def scale_of(*mats: HermitianMatrix) -> float:
    return max([1.0] + [operator_norm(m) for m in mats])


def spectral_apply(
    f: ScalarFunction, A: HermitianMatrix, decomposition: SpectralDecomposition | None = None
) -> tuple[HermitianMatrix, np.ndarray]:
    """f(A) together with the values f(lambda) on the spectrum."""
    dec = decomposition or eigh(A)
    lam = dec.eigenvalues
    margin = DOMAIN_MARGIN * max(1.0, float(np.max(np.abs(lam))))
    lam = f.clamp(lam, margin)
    fvals = np.asarray(f(lam), dtype=float).reshape(-1)
    u = dec.eigenvectors
    return HermitianMatrix._trusted((u * fvals) @ u.conj().T), fvals


def apply_function(f: ScalarFunction, A: HermitianMatrix) -> HermitianMatrix:
    """f(A) = U f(Lambda) U* via the spectral decomposition."""
    return spectral_apply(f, A)[0]


def operator_norm(A: HermitianMatrix) -> float:
    """Largest |eigenvalue|, i.e. the spectral norm."""
    w = eigh(A).eigenvalues
    return float(np.max(np.abs(w)))


@dataclass(frozen=True)
class PSDResult:
    holds: bool
    min_eigenvalue: float
    witness: np.ndarray | None = None  # unit x with <Ax,x> < -tol when holds is False

    def __bool__(self):
        return self.holds


def is_psd(A: HermitianMatrix, tol: float | None = None) -> PSDResult:
    dec = eigh(A)
    lam_min = float(dec.eigenvalues[0])
    if tol is None:
        tol = DEFAULT_PSD_RTOL * max(1.0, float(np.max(np.abs(dec.eigenvalues))))
    if lam_min >= -tol:
        return PSDResult(True, lam_min)
    return PSDResult(False, lam_min, dec.eigenvectors[:, 0].copy())


def loewner_leq(A: HermitianMatrix, B: HermitianMatrix, tol: float | None = None) -> PSDResult:
    """A <= B in the Loewner order, i.e. B - A is positive semidefinite."""
    _check_dims(A, B)
    return is_psd(B - A, tol)


@dataclass(frozen=True)
class PropertyPReport:
    pointwise: bool          # f >= g on Sp(A)
    loewner: bool            # g(A) <= f(A)
    pointwise_gap: float     # min over Sp(A) of f - g
    loewner_gap: float       # lambda_min(f(A) - g(A))

    @property
    def violation(self) -> bool:
        return self.pointwise and not self.loewner


def check_property_P(f: ScalarFunction, g: ScalarFunction, A: HermitianMatrix,
                     tol: float | None = None) -> PropertyPReport:
    """Pointwise dominance on the spectrum must imply Loewner dominance."""
    dec = eigh(A)
    fA, fv = spectral_apply(f, A, dec)
    gA, gv = spectral_apply(g, A, dec)
    diff = fv - gv
    if tol is None:
        tol = DEFAULT_PSD_RTOL * scale_of(fA, gA)
    psd = loewner_leq(gA, fA, tol)
    return PropertyPReport(
        pointwise=bool(np.all(diff >= -tol)),
        loewner=psd.holds,
        pointwise_gap=float(diff.min()),
        loewner_gap=psd.min_eigenvalue,
    )
