"""Irreducible factorization of univariate rational polynomials.

The factorization itself is delegated to sympy (the one place the package
leans on a computer algebra system); everything else consumes and returns
plain low-to-high Fraction coefficient lists, so callers never see sympy
objects.  Results are cached: scheme bookkeeping tends to refactor the same
small polynomials repeatedly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import univar


@lru_cache(maxsize=4096)
def _factor_cached(coeffs: tuple[int, ...]) -> tuple[tuple[tuple[Fraction, ...], int], ...]:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain=sympy.QQ)
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        cs = [Fraction(c.p, c.q) for c in reversed(fac.all_coeffs())]
        out.append((tuple(univar.monic(cs)), int(mult)))
    out.sort(key=lambda fm: (len(fm[0]), fm[0]))
    return tuple(out)


def irreducible_factors(p: Sequence[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Monic irreducible factors with multiplicities; the constant is dropped.

    The zero polynomial is rejected; constants factor into nothing.
    """
    q = univar.trim(list(p))
    if not q:
        raise ValueError("factorization of the zero polynomial")
    if len(q) == 1:
        return []
    ints = tuple(univar.to_int_primitive(q))
    return [(list(fac), m) for fac, m in _factor_cached(ints)]


def rational_roots(p: Sequence[Fraction]) -> list[tuple[Fraction, int]]:
    """All rational roots with multiplicities, from the linear factors."""
    out = []
    for fac, m in irreducible_factors(p):
        if len(fac) == 2:
            out.append((-fac[0], m))
    out.sort()
    return out


def is_irreducible(p: Sequence[Fraction]) -> bool:
    facs = irreducible_factors(p)
    return len(facs) == 1 and facs[0][1] == 1 and len(facs[0][0]) == len(univar.trim(list(p)))
