"""Dense univariate polynomial arithmetic over exact fields.

Coefficient lists run from degree 0 upward and are kept trimmed (no trailing
zeros; the zero polynomial is the empty list).  Entries may be
``fractions.Fraction`` or any exact field type implementing ``+ - * /``,
equality and truthiness; the needed 0 and 1 elements are derived from the
inputs, so no field object is threaded through.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from math import lcm as int_lcm
from typing import Sequence


def trim(p: Sequence) -> list:
    q = list(p)
    while q and not q[-1]:
        q.pop()
    return q


def is_zero(p: Sequence) -> bool:
    return all(not c for c in p)


def degree(p: Sequence) -> int:
    q = trim(p)
    return len(q) - 1


def add(p: Sequence, q: Sequence) -> list:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return trim(out)


def neg(p: Sequence) -> list:
    return [-c for c in p]


def sub(p: Sequence, q: Sequence) -> list:
    return add(p, neg(q))


def scale(p: Sequence, c) -> list:
    return trim([ci * c for ci in p])


def mul(p: Sequence, q: Sequence) -> list:
    p, q = trim(p), trim(q)
    if not p or not q:
        return []
    zero = p[0] - p[0]
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def pow_(p: Sequence, k: int) -> list:
    if k < 0:
        raise ValueError("negative exponent")
    p = trim(p)
    if k == 0:
        if not p:
            raise ValueError("0**0 for polynomials")
        one = p[-1] / p[-1]
        return [one]
    out = list(p)
    for _ in range(k - 1):
        out = mul(out, p)
    return out


def divmod_(p: Sequence, q: Sequence) -> tuple[list, list]:
    """Polynomial division with remainder; q must be nonzero."""
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    zero = q[-1] - q[-1]
    rem = list(p)
    if len(rem) < len(q):
        return [], trim(rem)
    quot = [zero] * (len(rem) - len(q) + 1)
    lead = q[-1]
    for k in range(len(rem) - len(q), -1, -1):
        c = rem[k + len(q) - 1]
        if not c:
            continue
        c = c / lead
        quot[k] = c
        for j, b in enumerate(q):
            rem[k + j] = rem[k + j] - c * b
    return trim(quot), trim(rem)


def div_exact(p: Sequence, q: Sequence) -> list:
    quot, rem = divmod_(p, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return quot


def monic(p: Sequence) -> list:
    p = trim(p)
    if not p:
        return []
    lead = p[-1]
    return [c / lead for c in p]


def gcd(p: Sequence, q: Sequence) -> list:
    """Monic gcd by the Euclidean algorithm (exact field coefficients)."""
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def xgcd(p: Sequence, q: Sequence) -> tuple[list, list, list]:
    """Extended Euclid: (g, s, t) with s*p + t*q = g and g monic.

    Both inputs zero gives three empty lists.
    """
    r0, r1 = trim(p), trim(q)
    if not r0 and not r1:
        return [], [], []
    lead = (r0 or r1)[-1]
    one = lead / lead
    s0, s1 = [one], []
    t0, t1 = [], [one]
    while r1:
        quot, rem = divmod_(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub(s0, mul(quot, s1))
        t0, t1 = t1, sub(t0, mul(quot, t1))
    inv = one / r0[-1]
    return scale(r0, inv), scale(s0, inv), scale(t0, inv)


def derivative(p: Sequence) -> list:
    return trim([c * i for i, c in enumerate(p)][1:])


def evaluate(p: Sequence, x):
    acc = None
    for c in reversed(trim(p)):
        acc = c if acc is None else acc * x + c
    return acc


def squarefree_part(p: Sequence) -> list:
    p = trim(p)
    if degree(p) <= 0:
        return monic(p)
    return monic(div_exact(p, gcd(p, derivative(p))))


def yun(p: Sequence) -> list[tuple[list, int]]:
    """Square-free decomposition (Yun, characteristic 0).

    Returns [(g_i, m_i), ...] with p = const * prod g_i**m_i, the g_i monic,
    square-free, pairwise coprime, deg g_i >= 1.
    """
    p = monic(p)
    if degree(p) <= 0:
        return []
    dp = derivative(p)
    g = gcd(p, dp)
    w = div_exact(p, g)
    z = sub(div_exact(dp, g), derivative(w))
    out: list[tuple[list, int]] = []
    i = 1
    while degree(w) > 0:
        gi = gcd(w, z)
        if degree(gi) > 0:
            out.append((gi, i))
        w = div_exact(w, gi)
        z = sub(div_exact(z, gi), derivative(w))
        i += 1
    return out


# Rational-specific helpers.

def to_int_primitive(p: Sequence[Fraction]) -> list[int]:
    """Clear denominators and content; sign fixed so the leading entry is positive."""
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = int_lcm(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = int_gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


