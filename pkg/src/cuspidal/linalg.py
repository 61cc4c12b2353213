"""Exact linear algebra for small dense systems.

The rational fast path clears denominators row by row and runs fraction-free
(Bareiss) elimination over the integers, so no floating point ever enters a
rank decision.  A plain Gaussian path over any exact field backs the number
field computations and doubles as an independent oracle for the integer path.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from math import lcm as int_lcm
from typing import Sequence

Matrix = Sequence[Sequence[Fraction]]


def _int_rows(rows: Matrix) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for c in row:
            den = int_lcm(den, Fraction(c).denominator)
        out.append([int(Fraction(c) * den) for c in row])
    return out


def _bareiss(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.  Returns (echelon rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    prev = 1
    prow = 0
    for col in range(ncols):
        if prow >= len(m):
            break
        sel = next((i for i in range(prow, len(m)) if m[i][col]), None)
        if sel is None:
            continue
        m[prow], m[sel] = m[sel], m[prow]
        piv = m[prow][col]
        for i in range(prow + 1, len(m)):
            for j in range(col + 1, ncols):
                m[i][j] = (m[i][j] * piv - m[i][col] * m[prow][j]) // prev
            m[i][col] = 0
        prev = piv
        pivots.append(col)
        prow += 1
    return m, pivots


def rank(rows: Matrix) -> int:
    if not rows:
        return 0
    _, pivots = _bareiss(_int_rows(rows))
    return len(pivots)


def canonical_vector(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale to primitive integer entries with the first nonzero entry positive."""
    den = 1
    for c in vec:
        den = int_lcm(den, c.denominator)
    ints = [int(c * den) for c in vec]
    g = 0
    for c in ints:
        g = int_gcd(g, c)
    if g:
        ints = [c // g for c in ints]
        lead = next(c for c in ints if c)
        if lead < 0:
            ints = [-c for c in ints]
    return tuple(Fraction(c) for c in ints)


def nullspace(rows: Matrix, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel, canonicalized, one vector per free column."""
    rows = [list(r) for r in rows]
    if not rows:
        if ncols is None:
            raise ValueError("empty matrix needs an explicit column count")
        basis = []
        for j in range(ncols):
            v = [Fraction(0)] * ncols
            v[j] = Fraction(1)
            basis.append(tuple(v))
        return basis
    ncols = len(rows[0])
    ech, pivots = _bareiss(_int_rows(rows))
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for k in range(len(pivots) - 1, -1, -1):
            pc = pivots[k]
            row = ech[k]
            acc = sum((Fraction(row[j]) * x[j] for j in range(pc + 1, ncols)), Fraction(0))
            x[pc] = -acc / row[pc]
        basis.append(canonical_vector(x))
    return basis


def nullspace_plain(rows: Matrix, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Independent kernel oracle: textbook Gauss-Jordan over Fraction."""
    rows = [[Fraction(c) for c in r] for r in rows]
    if not rows:
        return nullspace(rows, ncols)
    ncols = len(rows[0])
    pivots: list[int] = []
    prow = 0
    for col in range(ncols):
        sel = next((i for i in range(prow, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        piv = rows[prow][col]
        rows[prow] = [c / piv for c in rows[prow]]
        for i in range(len(rows)):
            if i != prow and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[prow])]
        pivots.append(col)
        prow += 1
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for k, pc in enumerate(pivots):
            x[pc] = -rows[k][f]
        basis.append(canonical_vector(x))
    return basis


def in_span(vectors: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> bool:
    """Exact membership of target in the row span of vectors."""
    vecs = [list(v) for v in vectors]
    base = rank(vecs)
    return rank(vecs + [list(target)]) == base


# Generic field elimination (duck-typed entries: Fraction or number field
# elements).  Used where coefficients live in an extension of the rationals.

def nullspace_field(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    rows = [list(r) for r in rows]
    if not rows:
        if ncols is None:
            raise ValueError("empty matrix needs an explicit column count")
        return []
    ncols = len(rows[0])
    pivots: list[int] = []
    prow = 0
    for col in range(ncols):
        sel = next((i for i in range(prow, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        piv = rows[prow][col]
        rows[prow] = [c / piv for c in rows[prow]]
        for i in range(len(rows)):
            if i != prow and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[prow])]
        pivots.append(col)
        prow += 1
    if not pivots:
        raise ValueError("zero matrix over a field needs explicit handling")
    one = rows[0][pivots[0]]
    zero = one - one
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [zero] * ncols
        x[f] = one
        for k, pc in enumerate(pivots):
            x[pc] = zero - rows[k][f]
        basis.append(tuple(x))
    return basis


def rank_field(rows: Sequence[Sequence]) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    pivots = 0
    prow = 0
    for col in range(ncols):
        sel = next((i for i in range(prow, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        piv = rows[prow][col]
        for i in range(prow + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / piv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[prow])]
        pivots += 1
        prow += 1
    return pivots


def solve(rows: Matrix, rhs: Sequence) -> list | None:
    """One exact solution of rows * x = rhs, or None if inconsistent.

    Free variables are set to zero.  Works over Fraction and over any exact
    field type (duck-typed).
    """
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return []
    ncols = len(rows[0])
    pivots: list[int] = []
    prow = 0
    for col in range(ncols):
        sel = next((i for i in range(prow, len(aug)) if aug[i][col]), None)
        if sel is None:
            continue
        aug[prow], aug[sel] = aug[sel], aug[prow]
        piv = aug[prow][col]
        aug[prow] = [c / piv for c in aug[prow]]
        for i in range(len(aug)):
            if i != prow and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[prow])]
        pivots.append(col)
        prow += 1
    for i in range(prow, len(aug)):
        if aug[i][ncols]:
            return None
    rhs0 = rhs[0] if len(list(rhs)) else None
    zero = None
    if pivots:
        r0 = aug[0][pivots[0]]
        zero = r0 - r0
    elif rhs0 is not None:
        zero = rhs0 - rhs0
    x = [zero] * ncols
    for k, pc in enumerate(pivots):
        x[pc] = aug[k][ncols]
    return x
