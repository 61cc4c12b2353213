"""Independent numeric verification paths for the exact machinery.

Three oracles, none of which shares code with the exact pipeline:

* xrank_upper_search runs a multi-start nonlinear least-squares search for a
  small set of curve points whose span hits a projected point.  Success
  certifies an upper bound on the rank with respect to the cuspidal curve
  (numerically, to the configured tolerance); failure certifies nothing.
  Exact lower bounds only ever come from the fiber scan: the cuspidal curve
  is singular, so catalecticant-style lower bounds for smooth curves do not
  transfer.

* secant_dimension_probe measures the dimension of a secant variety of the
  cuspidal curve as the rank of the parametrization Jacobian at a random
  point, computed in floats and confirmed in exact rational arithmetic.

* dichotomy_fuzz hammers the rank dichotomy on random forms and aborts with
  a serialized counterexample on any violation.

The search works in the chart of real parameters tau for curve points
(1:tau); the cusp tau=0 is an ordinary rank-1 point and needs no special
handling.  Restarts rescale the target through the curve's torus action
(coordinate j scales by s^slot(j)), which rebalances coordinates the way a
change of affine chart does; parameters found in the scaled frame map back
by tau -> tau/s.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .apolarity import rank as sylvester_rank
from .binform import random_form
from . import linalg
from .projection import ProjectedPoint

CLUSTER_RADIUS = 1e-8


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the span search; tolerance is relative residual."""

    r: int
    starts: int = 24
    precision_bits: int = 192
    tolerance: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("target cardinality must be at least 1")
        if self.starts < 1:
            raise ValueError("at least one start")
        if self.precision_bits < 53:
            raise ValueError("precision below double width")
        floor = 2.0 ** (-self.precision_bits / 2)
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", floor)
        elif self.tolerance < floor:
            raise ValueError("tolerance finer than half the working precision")


@dataclass(frozen=True)
class SpanWitness:
    """Numeric evidence that the matched point lies in the span of the
    curve points at the given parameters.

    residual is the relative distance achieved at full working precision;
    parameters are pairwise distinct beyond the cluster radius.
    """

    parameters: tuple[float, ...]
    residual: float
    matched: ProjectedPoint

    def __post_init__(self) -> None:
        ps = self.parameters
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if abs(ps[i] - ps[j]) <= CLUSTER_RADIUS:
                    raise ValueError("parameters collapse within the cluster radius")

    def to_json(self) -> dict:
        return {
            "r": len(self.parameters),
            "parameters": list(self.parameters),
            "residual": self.residual,
            "matched": self.matched.to_json(),
        }


def _slots(n: int) -> tuple[int, ...]:
    return (0,) + tuple(range(2, n + 2))


def _float_target(P: ProjectedPoint) -> np.ndarray:
    v = np.array([float(c) for c in P.coords], dtype=float)
    v = v / np.abs(v).max()
    return v / np.linalg.norm(v)


def _design(taus: np.ndarray, slots: tuple[int, ...]) -> np.ndarray:
    cols = [np.array([t**k for k in slots]) for t in taus]
    return np.stack(cols, axis=1)


def _residual_vec(taus: np.ndarray, v: np.ndarray, slots) -> np.ndarray:
    A = _design(taus, slots)
    # column equilibration leaves the column span (and so the residual)
    # unchanged while taming the Vandermonde-style conditioning
    A = A / np.linalg.norm(A, axis=0)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    return v - A @ coef


def _lm_float(taus: np.ndarray, v: np.ndarray, slots, max_iter: int = 80):
    """Levenberg-Marquardt with a finite-difference Jacobian of the
    variable-projection residual; scalars are eliminated by least squares."""
    taus = taus.astype(float)
    mu = 1e-3
    res = _residual_vec(taus, v, slots)
    best = float(res @ res)
    for _ in range(max_iter):
        J = np.empty((len(v), len(taus)))
        for i in range(len(taus)):
            h = 1e-6 * max(1.0, abs(taus[i]))
            bumped = taus.copy()
            bumped[i] += h
            J[:, i] = (_residual_vec(bumped, v, slots) - res) / h
        g = J.T @ res
        H = J.T @ J
        stepped = False
        for _ in range(8):
            try:
                delta = np.linalg.solve(H + mu * np.eye(len(taus)), -g)
            except np.linalg.LinAlgError:
                mu *= 10
                continue
            cand = taus + delta
            cres = _residual_vec(cand, v, slots)
            cval = float(cres @ cres)
            if cval < best:
                taus, res, best = cand, cres, cval
                mu = max(mu / 3, 1e-12)
                stepped = True
                break
            mu *= 10
        if not stepped or best < 1e-26:
            break
    return taus, best


def _mp_target(P: ProjectedPoint):
    v = [
        mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in P.coords
    ]
    norm = mpmath.sqrt(mpmath.fsum(x * x for x in v))
    return [x / norm for x in v]


def _mp_residual(taus, v, slots):
    r = len(taus)
    cols = [[t**k for k in slots] for t in taus]
    for i in range(r):
        norm = mpmath.sqrt(mpmath.fsum(x * x for x in cols[i]))
        if norm == 0:
            return None
        cols[i] = [x / norm for x in cols[i]]
    # normal equations; r is tiny and the precision is high
    G = mpmath.matrix(r, r)
    rhs = mpmath.matrix(r, 1)
    for i in range(r):
        for j in range(r):
            G[i, j] = mpmath.fsum(cols[i][k] * cols[j][k] for k in range(len(v)))
        rhs[i] = mpmath.fsum(cols[i][k] * v[k] for k in range(len(v)))
    try:
        coef = mpmath.lu_solve(G, rhs)
    except (ZeroDivisionError, ValueError):
        return None
    res = []
    for k in range(len(v)):
        res.append(v[k] - mpmath.fsum(coef[i] * cols[i][k] for i in range(r)))
    return res


def _polish(P: ProjectedPoint, taus0, precision_bits: int, tolerance: float):
    """Gauss-Newton refinement at full precision; returns (taus, residual)."""
    with mpmath.workprec(precision_bits):
        v = _mp_target(P)
        slots = _slots(P.n)
        taus = [mpmath.mpf(t) for t in taus0]
        res = _mp_residual(taus, v, slots)
        if res is None:
            return None
        best = mpmath.sqrt(mpmath.fsum(x * x for x in res))
        target = mpmath.mpf(tolerance) / 4
        h = mpmath.mpf(2) ** (-(precision_bits // 3))
        mu = mpmath.mpf(10) ** (-12)
        mu_floor = mpmath.mpf(2) ** (-precision_bits)
        for _ in range(72):
            m = len(v)
            r = len(taus)
            J = [[mpmath.mpf(0)] * r for _ in range(m)]
            for i in range(r):
                bumped = list(taus)
                step = h * max(mpmath.mpf(1), abs(taus[i]))
                bumped[i] += step
                bres = _mp_residual(bumped, v, slots)
                if bres is None:
                    return None
                for k in range(m):
                    J[k][i] = (bres[k] - res[k]) / step
            G = mpmath.matrix(r, r)
            g = mpmath.matrix(r, 1)
            for i in range(r):
                for j in range(r):
                    G[i, j] = mpmath.fsum(J[k][i] * J[k][j] for k in range(m))
                g[i] = mpmath.fsum(J[k][i] * res[k] for k in range(m))
            stepped = False
            for _ in range(10):
                Greg = mpmath.matrix(G)
                for i in range(r):
                    Greg[i, i] += mu
                try:
                    delta = mpmath.lu_solve(Greg, -g)
                except (ZeroDivisionError, ValueError):
                    mu *= 100
                    continue
                cand = [taus[i] + delta[i] for i in range(r)]
                cres = _mp_residual(cand, v, slots)
                if cres is None:
                    mu *= 100
                    continue
                cval = mpmath.sqrt(mpmath.fsum(x * x for x in cres))
                if cval < best:
                    taus, res, best = cand, cres, cval
                    mu = max(mu / 10, mu_floor)
                    stepped = True
                    break
                mu *= 100
            if not stepped:
                break
            if best < target:
                break
        return [float(t) for t in taus], float(best)


def _moment_seeds(P: ProjectedPoint, r: int):
    """Parameter seeds from the moment structure of the coordinates.

    The coordinates of P are power sums sum_i alpha_i t_i^k with the k=1
    entry missing, so the moment matrix rows (a_{j+k})_k for j >= 2 avoid the
    unknown entry entirely.  Its float null space carries candidate root
    polynomials; their real roots seed the optimizer.  Returns the null
    basis (rows of V^T) or None when too few rows are known.
    """
    d = P.n + 1
    known = {0: float(P.coords[0])}
    for k in range(2, d + 1):
        known[k] = float(P.coords[k - 1])
    if d - r - 1 < 1:
        return None
    rows = [[known[j + k] for k in range(r + 1)] for j in range(2, d - r + 1)]
    A = np.array(rows, dtype=float)
    scale = np.abs(A).max()
    if not np.isfinite(scale) or scale == 0:
        return None
    _, _, vt = np.linalg.svd(A / scale)
    null_dim = max(1, (r + 1) - len(rows))
    return vt[-null_dim:]


def _roots_of(poly_ascending: np.ndarray) -> list[float]:
    """Real roots of a polynomial given by ascending coefficients."""
    coeffs = np.array(poly_ascending, dtype=float)
    top = np.abs(coeffs).max()
    if top == 0:
        return []
    coeffs = coeffs / top
    # drop numerically-zero leading coefficients (roots at infinity)
    k = len(coeffs)
    while k > 1 and abs(coeffs[k - 1]) < 1e-10:
        k -= 1
    if k <= 1:
        return []
    roots = np.roots(coeffs[:k][::-1])
    out = []
    for z in roots:
        if abs(z.imag) <= 1e-6 * (1.0 + abs(z)):
            out.append(float(z.real))
    return out


def xrank_upper_search(P: ProjectedPoint, cfg: SearchConfig) -> SpanWitness | None:
    """Search for r real curve points whose span hits P.

    Multi-start least squares in the parameter chart.  Starts are seeded
    from the moment structure of the coordinates where the degree allows it
    (pure random otherwise), perturbed progressively, and each start picks
    its own torus rescale so the rescaled parameters stay O(1).  Promising
    starts are polished at cfg.precision_bits and accepted when the
    relative residual drops below cfg.tolerance with parameters separated
    beyond the cluster radius.  Returns the first acceptance in start
    order, or None when every start fails; None proves nothing about the
    rank.
    """
    if not 1 <= cfg.r <= P.n:
        raise ValueError("target cardinality outside 1..n")
    rng = random.Random(f"span-search:{cfg.seed}:{cfg.r}")
    slots = _slots(P.n)
    base = np.array([float(c) for c in P.coords], dtype=float)
    null_basis = _moment_seeds(P, cfg.r)

    polish_budget = 8
    for start in range(cfg.starts):
        taus0: list[float] = []
        if null_basis is not None and start % 4 != 3:
            if len(null_basis) == 1:
                poly = null_basis[0]
            else:
                combo = np.array([rng.gauss(0.0, 1.0) for _ in null_basis])
                poly = combo @ null_basis
            taus0 = _roots_of(poly)[: cfg.r]
            # grow the perturbation with the start index so repeated seeds
            # explore around a near-miss instead of repeating it
            wiggle = 0.02 * min(start, 8)
            if wiggle:
                taus0 = [
                    t + rng.gauss(0.0, wiggle * (1.0 + abs(t))) for t in taus0
                ]
        while len(taus0) < cfg.r:
            taus0.append(rng.uniform(-2.8, 2.8))
        spread = max(1.0, max(abs(t) for t in taus0))
        s = (1.0 / spread) * float(np.exp(rng.uniform(-0.15, 0.15)))
        if rng.random() < 0.5:
            s = -s
        scaled = base * np.array([s**k for k in slots])
        big = np.abs(scaled).max()
        if not np.isfinite(big) or big == 0:
            continue
        v = scaled / big
        v = v / np.linalg.norm(v)
        taus, val = _lm_float(np.array(taus0) * s, v, slots)
        if val >= 1e-18:
            continue
        # polish on hit; the first acceptance in start order is the
        # witness, so the reduction over starts is deterministic
        if polish_budget == 0:
            break
        polish_budget -= 1
        polished = _polish(P, [t / s for t in taus], cfg.precision_bits, cfg.tolerance)
        if polished is None:
            continue
        ptaus, resid = polished
        if resid >= cfg.tolerance:
            continue
        ps = sorted(ptaus)
        if any(
            abs(ps[i] - ps[i + 1]) <= CLUSTER_RADIUS for i in range(len(ps) - 1)
        ):
            continue
        return SpanWitness(tuple(ps), resid, P)
    return None


def secant_dimension_probe(s: int, n: int, seed=0) -> int:
    """Observed projective dimension of the s-th secant variety of the curve.

    Rank of the Jacobian of (parameters, scalars) -> sum of scaled curve
    points at a random sample, computed numerically and confirmed exactly;
    degenerate samples retry with a derived seed.
    """
    if not 1 <= s <= n:
        raise ValueError("cardinality outside 1..n")
    slots = _slots(n)
    for attempt in range(6):
        rng = random.Random(f"secant-probe:{seed}:{attempt}")
        taus = set()
        while len(taus) < s:
            t = Fraction(rng.randint(1, 60), rng.randint(1, 7)) * (
                1 if rng.random() < 0.5 else -1
            )
            taus.add(t)
        taus = sorted(taus)
        alphas = [Fraction(rng.randint(1, 9)) for _ in range(s)]
        cols = []
        for t, a in zip(taus, alphas):
            cols.append([t**k for k in slots])
            cols.append([a * k * t ** (k - 1) if k else Fraction(0) for k in slots])
        exact_rank = linalg.rank(cols)
        M = np.array([[float(x) for x in col] for col in cols], dtype=float)
        sv = np.linalg.svd(M, compute_uv=False)
        tol = max(M.shape) * np.finfo(float).eps * sv[0]
        numeric_rank = int((sv > tol).sum())
        if numeric_rank == exact_rank:
            return exact_rank - 1
    raise RuntimeError("persistently degenerate secant samples")


def dichotomy_fuzz(degree: int, samples: int, seed=0) -> dict:
    """Hammer the rank dichotomy on random forms; violations abort."""
    if degree < 2:
        raise ValueError("fuzzing needs degree at least 2")
    rng = random.Random(f"dichotomy-fuzz:{degree}:{seed}")
    counts: Counter[int] = Counter()
    done = 0
    while done < samples:
        f = random_form(degree, rng, bound=120)
        if f.is_zero():
            continue
        cert = sylvester_rank(f)
        w, r = cert.border_rank, cert.rank
        if r not in (w, degree + 2 - w) or w > r:
            raise AssertionError(
                "dichotomy violated: "
                + json.dumps({"degree": degree, "coeffs": [str(c) for c in f.coeffs],
                              "border": w, "rank": r})
            )
        counts[r] += 1
        done += 1
    return {
        "degree": degree,
        "samples": samples,
        "violations": 0,
        "rank_counts": {str(k): counts[k] for k in sorted(counts)},
    }
