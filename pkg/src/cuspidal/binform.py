"""Binary forms of one fixed degree with exact rational coefficients.

A form of degree d is stored by its monomial coefficients (c_0, ..., c_d),
where c_i multiplies u**(d-i) * t**i.  The apolar coefficients a_i = c_i /
binomial(d, i) drive the catalecticant machinery downstream.  Everything here
is exact; the only numerics are the certified root approximations at the end
of the module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import mpmath

from . import ratfactor, univar


class GrammarError(ValueError):
    """Malformed textual form input."""


class ZeroFormError(ValueError):
    """The zero form was supplied where a nonzero one is required."""


class PrecisionError(ArithmeticError):
    """Working precision could not certify separated root clusters."""


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")
_FORM_RE = re.compile(r"^\s*d\s*=\s*(\d+)\s*;\s*\[(.*)\]\s*$")


def _as_fraction(text: str) -> Fraction:
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise GrammarError(f"malformed rational {text!r}")
    return Fraction(text)


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous binary form sum(c_i * u**(d-i) * t**i)."""

    degree: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != self.degree + 1:
            raise ValueError(
                f"degree {self.degree} needs {self.degree + 1} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def du(self) -> "BinaryForm":
        """Partial derivative in u."""
        d = self.degree
        if d == 0:
            return BinaryForm(0, (Fraction(0),))
        return BinaryForm(d - 1, tuple((d - i) * self.coeffs[i] for i in range(d)))

    def dt(self) -> "BinaryForm":
        """Partial derivative in t."""
        d = self.degree
        if d == 0:
            return BinaryForm(0, (Fraction(0),))
        return BinaryForm(d - 1, tuple((i + 1) * self.coeffs[i + 1] for i in range(d)))

    def evaluate(self, a: Fraction, b: Fraction) -> Fraction:
        a, b = Fraction(a), Fraction(b)
        acc = Fraction(0)
        for i, c in enumerate(self.coeffs):
            if c:
                acc += c * a ** (self.degree - i) * b ** i
        return acc

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return BinaryForm(self.degree, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return BinaryForm(self.degree, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "BinaryForm") -> "BinaryForm":
        cs = [Fraction(0)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                cs[i + j] += a * b
        return BinaryForm(self.degree + other.degree, tuple(cs))

    def scaled(self, c) -> "BinaryForm":
        c = Fraction(c)
        return BinaryForm(self.degree, tuple(c * x for x in self.coeffs))

    def power(self, k: int) -> "BinaryForm":
        out = BinaryForm(0, (Fraction(1),))
        for _ in range(k):
            out = out * self
        return out

    def normalized(self) -> "BinaryForm":
        """Primitive integer coefficients, first nonzero coefficient positive."""
        if self.is_zero():
            return self
        from math import gcd as _gcd, lcm as _lcm

        den = 1
        for c in self.coeffs:
            den = _lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for c in ints:
            g = _gcd(g, c)
        ints = [c // g for c in ints]
        lead = next(c for c in ints if c)
        if lead < 0:
            ints = [-c for c in ints]
        return BinaryForm(self.degree, tuple(Fraction(c) for c in ints))

    # -- chart bookkeeping -------------------------------------------------

    def tau_poly(self) -> tuple[int, list[Fraction]]:
        """Write f = u**k * p(t/u) * u**deg(p); returns (k, p) with p(tau) dense.

        p carries every root of f of the shape (1:tau); the factor u**k
        carries the root (0:1) with multiplicity k.
        """
        p = univar.trim(list(self.coeffs))
        k = self.degree - univar.degree(p) if p else 0
        return k, p

    @staticmethod
    def from_tau_poly(k: int, p: Sequence[Fraction]) -> "BinaryForm":
        p = univar.trim(list(p))
        if not p:
            raise ZeroFormError("zero polynomial part")
        deg = k + len(p) - 1
        coeffs = list(p) + [Fraction(0)] * k
        return BinaryForm(deg, tuple(coeffs[: deg + 1]))

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        return f"d={self.degree}; [{','.join(str(c) for c in self.coeffs)}]"

    def pretty(self) -> str:
        if self.is_zero():
            return "0"
        parts: list[str] = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            a, b = self.degree - i, i
            mono = "*".join(
                s
                for s in (
                    "u" if a == 1 else f"u^{a}" if a else "",
                    "t" if b == 1 else f"t^{b}" if b else "",
                )
                if s
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+{body}" if c > 0 else f"-{body}")
        return "".join(parts)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [str(c) for c in self.coeffs],
            "basis": "monomial",
        }

    @staticmethod
    def from_json(data: dict) -> "BinaryForm":
        try:
            degree = int(data["degree"])
            coeffs = [_as_fraction(str(c)) for c in data["coeffs"]]
        except (KeyError, TypeError) as exc:
            raise GrammarError(f"bad form object: {exc}") from exc
        if data.get("basis", "monomial") != "monomial":
            raise GrammarError(f"unsupported basis {data.get('basis')!r}")
        if len(coeffs) != degree + 1:
            raise GrammarError(f"degree {degree} needs {degree + 1} coefficients")
        return BinaryForm(degree, tuple(coeffs))


def parse_form(text: str) -> BinaryForm:
    """Parse the grammar ``d=<int>; [<q0>,<q1>,...,<qd>]`` with rational entries."""
    m = _FORM_RE.match(text)
    if not m:
        raise GrammarError(f"malformed form {text!r}")
    degree = int(m.group(1))
    body = m.group(2).strip()
    items = [s for s in (part.strip() for part in body.split(","))] if body else []
    if len(items) != degree + 1:
        raise GrammarError(
            f"degree {degree} needs {degree + 1} coefficients, got {len(items)}"
        )
    return BinaryForm(degree, tuple(_as_fraction(s) for s in items))


@dataclass(frozen=True)
class ApolarCoeffs:
    """Coefficients divided by binomials: a_i = c_i / binomial(d, i)."""

    degree: int
    entries: tuple[Fraction, ...]

    def to_form(self) -> BinaryForm:
        d = self.degree
        return BinaryForm(d, tuple(self.entries[i] * comb(d, i) for i in range(d + 1)))


def apolar_coeffs(f: BinaryForm) -> ApolarCoeffs:
    d = f.degree
    return ApolarCoeffs(d, tuple(f.coeffs[i] / comb(d, i) for i in range(d + 1)))


@dataclass(frozen=True)
class P1Point:
    """Point (a:b) of the projective line, normalized so the first nonzero
    coordinate is 1."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        a, b = Fraction(self.a), Fraction(self.b)
        if a == 0 and b == 0:
            raise ValueError("(0:0) is not a point")
        if a != 0:
            a, b = Fraction(1), b / a
        else:
            a, b = Fraction(0), Fraction(1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @staticmethod
    def from_tau(tau: Fraction) -> "P1Point":
        return P1Point(Fraction(1), Fraction(tau))

    @property
    def tau(self) -> Fraction | None:
        """Chart value for points (1:tau); None for (0:1)."""
        return None if self.a == 0 else self.b

    def linear_form(self) -> BinaryForm:
        """The degree-1 form vanishing exactly at this point."""
        return BinaryForm(1, (self.b, -self.a)).normalized()

    def __str__(self) -> str:
        return f"({self.a}:{self.b})"


POINT_A = P1Point(Fraction(1), Fraction(0))


def linear_form_at(p: P1Point) -> BinaryForm:
    return p.linear_form()


@dataclass(frozen=True)
class ZeroScheme:
    """Zero scheme of a form: factors with multiplicities.

    Construction canonicalizes: every factor is split into irreducible pieces
    over the rationals and multiplicities of coinciding pieces accumulate, so
    two schemes are structurally equal (dataclass ``==``) exactly when they
    agree as schemes.  The scheme always means the vanishing of
    ``prod g_i^{m_i}``.
    """

    factors: tuple[tuple[BinaryForm, int], ...]

    def __post_init__(self) -> None:
        acc: dict[BinaryForm, int] = {}
        for g, m in self.factors:
            if m <= 0:
                raise ValueError("multiplicities must be positive")
            if g.is_zero():
                raise ValueError("zero factor in a zero scheme")
            if g.degree < 1:
                raise ValueError("constant factor in a zero scheme")
            k, p = g.tau_poly()
            if k:
                ufac = BinaryForm(1, (Fraction(1), Fraction(0)))
                acc[ufac] = acc.get(ufac, 0) + k * int(m)
            for q, e in ratfactor.irreducible_factors(p):
                piece = BinaryForm(len(q) - 1, tuple(q)).normalized()
                acc[piece] = acc.get(piece, 0) + e * int(m)
        canon = sorted(acc.items(), key=lambda fm: (fm[0].degree, fm[0].coeffs))
        object.__setattr__(self, "factors", tuple(canon))

    def validate(self) -> None:
        for g, _ in self.factors:
            if not is_square_free(g):
                raise ValueError(f"factor {g.pretty()} is not square-free")
        for i, (g, _) in enumerate(self.factors):
            for h, _ in self.factors[i + 1:]:
                if gcd_forms(g, h).degree > 0:
                    raise ValueError("factors are not pairwise coprime")

    @property
    def degree(self) -> int:
        return sum(g.degree * m for g, m in self.factors)

    def is_reduced(self) -> bool:
        return all(m == 1 for _, m in self.factors)

    def is_empty(self) -> bool:
        return not self.factors

    def product_form(self) -> BinaryForm:
        out = BinaryForm(0, (Fraction(1),))
        for g, m in self.factors:
            out = out * g.power(m)
        return out

    def multiplicity_at(self, p: P1Point) -> int:
        total = 0
        for g, m in self.factors:
            if g.evaluate(p.a, p.b) == 0:
                total += m  # factors are square-free: each root is simple
        return total

    def reduced(self) -> "ZeroScheme":
        return ZeroScheme(tuple((g, 1) for g, _ in self.factors))

    def remove_point(self, p: P1Point, k: int) -> "ZeroScheme":
        """Scheme difference: drop k from the multiplicity at the rational point p."""
        lin = p.linear_form()
        out: list[tuple[BinaryForm, int]] = []
        hit = False
        for g, m in self.factors:
            if g.evaluate(p.a, p.b) != 0:
                out.append((g, m))
                continue
            hit = True
            if m < k:
                raise ValueError(f"multiplicity at {p} is {m} < {k}")
            rest = divide_forms(g, lin)
            assert rest is not None
            if rest.degree > 0:
                out.append((rest, m))
            if m - k > 0:
                out.append((lin, m - k))
        if not hit and k > 0:
            raise ValueError(f"{p} does not lie on the scheme")
        return ZeroScheme(tuple(out))

    def add_point(self, p: P1Point, k: int) -> "ZeroScheme":
        lin = p.linear_form()
        out: list[tuple[BinaryForm, int]] = []
        added = False
        for g, m in self.factors:
            if g.evaluate(p.a, p.b) != 0:
                out.append((g, m))
                continue
            rest = divide_forms(g, lin)
            assert rest is not None
            if rest.degree > 0:
                out.append((rest, m))
            out.append((lin, m + k))
            added = True
        if not added:
            out.append((lin, k))
        return ZeroScheme(tuple(out))

    def rational_points(self) -> list[tuple[P1Point, int]] | None:
        """Points with multiplicities when every factor splits into rational
        linear pieces; None when an irrational factor is present."""
        pts: list[tuple[P1Point, int]] = []
        for g, m in self.factors:
            if g.degree == 1:
                pts.append((P1Point(-g.coeffs[1], g.coeffs[0]), m))
                continue
            k, p = g.tau_poly()
            roots = ratfactor.rational_roots(p)
            if sum(mult for _, mult in roots) + k != g.degree:
                return None
            if k:
                pts.append((P1Point(Fraction(0), Fraction(1)), m))
            for root, _ in roots:
                pts.append((P1Point(Fraction(1), root), m))
        pts.sort(key=lambda pm: (pm[0].a, pm[0].b))
        return pts

    def maximal_proper_subschemes(self) -> list["ZeroScheme"]:
        """All degree-(w-1) subschemes; requires rational linear factors only."""
        pts = self.rational_points()
        if pts is None or any(g.degree > 1 for g, _ in self.factors):
            raise ValueError("subscheme enumeration needs rational points")
        return [self.remove_point(p, 1) for p, _ in pts]

    def to_json(self) -> dict:
        return {
            "factors": [[g.pretty(), m] for g, m in self.factors],
            "degree": self.degree,
            "reduced": self.is_reduced(),
        }

    def __str__(self) -> str:
        if not self.factors:
            return "(empty scheme)"
        return " * ".join(
            g.pretty() if m == 1 else f"({g.pretty()})^{m}" for g, m in self.factors
        )


def gcd_forms(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Greatest common divisor of two nonzero forms, normalized."""
    if f.is_zero() or g.is_zero():
        raise ZeroFormError("gcd of the zero form")
    kf, pf = f.tau_poly()
    kg, pg = g.tau_poly()
    core = univar.gcd(pf, pg)
    return BinaryForm.from_tau_poly(min(kf, kg), core).normalized()


def divide_forms(f: BinaryForm, g: BinaryForm) -> BinaryForm | None:
    """Exact quotient f / g, or None when g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero form")
    if f.is_zero():
        raise ZeroFormError("division of the zero form")
    kf, pf = f.tau_poly()
    kg, pg = g.tau_poly()
    if kg > kf:
        return None
    quot, rem = univar.divmod_(pf, pg)
    if rem:
        return None
    return BinaryForm.from_tau_poly(kf - kg, quot)


def is_square_free(f: BinaryForm) -> bool:
    """True iff gcd(df/du, df/dt) is a nonzero constant.

    This catches repeated factors everywhere on the projective line,
    including at the point (0:1) where the dehomogenized chart degenerates.
    """
    if f.is_zero():
        raise ZeroFormError("square-free test on the zero form")
    if f.degree == 0:
        return True
    fu, ft = f.du(), f.dt()
    if fu.is_zero() and ft.is_zero():
        return False  # cannot happen in characteristic 0 for degree >= 1
    if fu.is_zero() or ft.is_zero():
        # One variable missing: f = c*u^d or c*t^d, square-free only at d = 1.
        return f.degree == 1
    return gcd_forms(fu, ft).degree == 0


def squarefree_decompose(f: BinaryForm) -> ZeroScheme:
    """Yun-style decomposition f = const * prod g_i**m_i with square-free,
    pairwise coprime g_i.  A factor supported at (0:1) appears explicitly."""
    if f.is_zero():
        raise ZeroFormError("decomposition of the zero form")
    k, p = f.tau_poly()
    factors: list[tuple[BinaryForm, int]] = []
    if k:
        factors.append((BinaryForm(1, (Fraction(1), Fraction(0))), k))
    for q, m in univar.yun(p):
        factors.append((BinaryForm.from_tau_poly(0, q), m))
    return ZeroScheme(tuple(factors))


def multiplicity_at(obj: BinaryForm | ZeroScheme, p: P1Point) -> int:
    """Vanishing order at a rational point."""
    if isinstance(obj, ZeroScheme):
        return obj.multiplicity_at(p)
    if obj.is_zero():
        raise ZeroFormError("multiplicity of the zero form")
    lin = p.linear_form()
    count = 0
    cur = obj
    while True:
        nxt = divide_forms(cur, lin)
        if nxt is None:
            return count
        cur = nxt
        count += 1
        if cur.degree == 0:
            return count


@dataclass(frozen=True)
class NumericRoot:
    """Projective root (a:b), either exact rational or certified numeric.

    Numeric roots come normalized to (1:tau); the error radius bounds the
    distance from tau to the true root in its chart.  Exact roots have
    radius 0.
    """

    a: object
    b: object
    multiplicity: int
    radius: object
    exact: bool
    precision_bits: int

    def point(self) -> P1Point | None:
        if not self.exact:
            return None
        return P1Point(Fraction(self.a), Fraction(self.b))


def numeric_roots(f: BinaryForm, precision_bits: int = 192) -> list[NumericRoot]:
    """All projective roots with multiplicities.

    Multiplicities come from the exact square-free decomposition; rational
    roots are reported exactly; the rest are approximated at the requested
    precision with a certified isolation radius (deg * |p(z)/p'(z)| around
    each approximation, disks pairwise disjoint within each factor).
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    scheme = squarefree_decompose(f)
    out: list[NumericRoot] = []
    numeric: list[NumericRoot] = []
    for g, m in scheme.factors:
        k, p = g.tau_poly()
        if k:
            out.append(
                NumericRoot(Fraction(0), Fraction(1), m, Fraction(0), True, precision_bits)
            )
        for root, _ in ratfactor.rational_roots(p):
            out.append(NumericRoot(Fraction(1), root, m, Fraction(0), True, precision_bits))
            lin = [-root, Fraction(1)]
            p = univar.div_exact(p, lin)
        if univar.degree(p) < 1:
            continue
        numeric.extend(
            _certified_roots(p, m, precision_bits)
        )
    # Cluster criterion across the whole form: every numeric disk must be
    # disjoint from every other disk and from every exact chart root.
    with mpmath.workprec(precision_bits + 64):
        for i, r in enumerate(numeric):
            zi, ri = mpmath.mpc(r.b), mpmath.mpf(r.radius)
            for s in numeric[i + 1:]:
                if abs(zi - mpmath.mpc(s.b)) <= ri + mpmath.mpf(s.radius):
                    raise PrecisionError(
                        "precision insufficient for cluster separation; retry higher"
                    )
            for s in out:
                if s.a == 0:
                    continue
                tau = mpmath.mpf(s.b.numerator) / mpmath.mpf(s.b.denominator)
                if abs(zi - tau) <= ri:
                    raise PrecisionError(
                        "precision insufficient for cluster separation; retry higher"
                    )
    out.sort(key=lambda r: (r.a, r.b))
    numeric.sort(key=lambda r: (mpmath.mpf(r.b.real), mpmath.mpf(r.b.imag)))
    return out + numeric


def _certified_roots(p: list[Fraction], mult: int, precision_bits: int) -> list[NumericRoot]:
    """Certified approximations for a square-free rational-root-free factor."""
    deg = univar.degree(p)
    with mpmath.workprec(precision_bits + 64):
        coeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in p]
        try:
            roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=precision_bits)
        except mpmath.libmp.NoConvergence as exc:  # pragma: no cover
            raise PrecisionError(f"root finding did not converge: {exc}") from exc
        dp = univar.derivative(p)
        dcoeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in dp]

        def horner(cs, z):
            acc = mpmath.mpc(0)
            for c in reversed(cs):
                acc = acc * z + c
            return acc

        entries = []
        for z in roots:
            z = mpmath.mpc(z)
            val = horner(coeffs, z)
            der = horner(dcoeffs, z)
            if der == 0:
                raise PrecisionError("derivative vanished at an approximate root")
            radius = deg * abs(val / der)
            entries.append((z, radius))
        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                zi, ri = entries[i]
                zj, rj = entries[j]
                if abs(zi - zj) <= ri + rj:
                    raise PrecisionError(
                        "precision insufficient for cluster separation; retry higher"
                    )
        out = []
        for z, radius in entries:
            out.append(
                NumericRoot(
                    mpmath.mpc(1),
                    +z,
                    mult,
                    +radius,
                    False,
                    precision_bits,
                )
            )
    return out


def random_form(degree: int, rng, bound: int = 100) -> BinaryForm:
    """Nonzero random form; numerators in [-bound, bound], denominators in [1, bound]."""
    while True:
        coeffs = tuple(
            Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            for _ in range(degree + 1)
        )
        if any(coeffs):
            return BinaryForm(degree, coeffs)
