"""Plain-text matrix files.

Line 1 is ``dim n``; then n lines of n whitespace-separated entries written
as ``a``, ``a+bi`` or ``a-bi`` with decimal reals. Blank lines and lines
starting with ``#`` are ignored.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .linalg import HERMITIAN_ATOL, HermitianityError, HermitianMatrix

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_ENTRY = re.compile(rf"^([+-]?{_REAL})(?:([+-])({_REAL})i)?$")


class MatrixFormatError(ValueError):
    def __init__(self, msg: str, line: int, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{where}: {msg}")


def parse_entry(token: str) -> complex:
    m = _ENTRY.match(token)
    if not m:
        raise ValueError(f"malformed entry {token!r}")
    re_part, sign, im_part = m.groups()
    im = 0.0 if im_part is None else float(im_part) * (-1.0 if sign == "-" else 1.0)
    return complex(float(re_part), im)


def format_entry(z: complex) -> str:
    if z.imag == 0.0:
        return f"{z.real:.17g}"
    sign = "-" if np.signbit(z.imag) else "+"
    return f"{z.real:.17g}{sign}{abs(z.imag):.17g}i"


def parse_matrix(text: str) -> HermitianMatrix:
    lines = [(k + 1, ln.strip()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, ln) for k, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty file", 1)
    k0, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "dim":
        raise MatrixFormatError(f"expected 'dim n', got {header!r}", k0, 1)
    try:
        n = int(parts[1])
    except ValueError:
        raise MatrixFormatError(f"dimension {parts[1]!r} is not an integer", k0, 2) from None
    if n < 1:
        raise MatrixFormatError(f"dimension must be positive, got {n}", k0, 2)
    rows = lines[1:]
    if len(rows) != n:
        last = rows[-1][0] if rows else k0
        raise MatrixFormatError(f"expected {n} rows, found {len(rows)}", last)
    a = np.zeros((n, n), dtype=complex)
    for i, (k, ln) in enumerate(rows):
        tokens = ln.split()
        if len(tokens) != n:
            raise MatrixFormatError(f"expected {n} entries, found {len(tokens)}", k)
        for j, tok in enumerate(tokens):
            try:
                a[i, j] = parse_entry(tok)
            except ValueError as exc:
                raise MatrixFormatError(str(exc), k, j + 1) from None
    return HermitianMatrix(a, atol=HERMITIAN_ATOL)


def load_matrix(path) -> HermitianMatrix:
    return parse_matrix(Path(path).read_text())


def dump_matrix(A: HermitianMatrix) -> str:
    out = [f"dim {A.dim}"]
    out += [" ".join(format_entry(complex(z)) for z in row) for row in A.data]
    return "\n".join(out) + "\n"


def save_matrix(path, A: HermitianMatrix) -> None:
    Path(path).write_text(dump_matrix(A))


__all__ = [
    "HermitianityError",
    "MatrixFormatError",
    "dump_matrix",
    "format_entry",
    "load_matrix",
    "parse_entry",
    "parse_matrix",
    "save_matrix",
]
