"""Seeded random matrices and vectors."""
from __future__ import annotations

import numpy as np

from .linalg import HermitianMatrix

EDGE_FRACTION = 0.05


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar unitary from QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def hermitian_with_spectrum(rng: np.random.Generator, eigenvalues) -> HermitianMatrix:
    lam = np.asarray(eigenvalues, dtype=float)
    u = random_unitary(rng, lam.size)
    return HermitianMatrix._trusted((u * lam) @ u.conj().T)


def hermitian_in_interval(rng: np.random.Generator, dim: int, lo: float, hi: float) -> HermitianMatrix:
    """Matrix with spectrum drawn uniformly from [lo + d, hi - d], d = 5% of the width."""
    delta = EDGE_FRACTION * (hi - lo)
    lam = rng.uniform(lo + delta, hi - delta, size=dim)
    return hermitian_with_spectrum(rng, lam)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianMatrix:
    """GUE-style sample; entries have standard deviation ``scale``."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix._trusted(scale * (z + z.conj().T) / 2.0)


def dyadic_hermitian(rng: np.random.Generator, dim: int, bits: int = 8, bound: int = 4) -> HermitianMatrix:
    """Hermitian matrix whose entries are multiples of 2**-bits in [-bound, bound].

    Sums and products by dyadic scalars are then exact in binary floating point.
    """
    q = 2 ** bits
    re = rng.integers(-bound * q, bound * q + 1, size=(dim, dim)) / q
    im = rng.integers(-bound * q, bound * q + 1, size=(dim, dim)) / q
    a = np.triu(re + 1j * im, 1)
    a = a + a.conj().T + np.diag(np.diagonal(re))
    return HermitianMatrix._trusted(a)


def unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform on the complex unit sphere (normalized complex Gaussian)."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)
