"""Closed-form hitting-time distributions and success-curve planning.

Two first-passage quantities drive everything: the time T1 for the ladder
walk to first reach the top origin (odd support) and the full return time
T1 + T2 back to the bottom origin (even support). Both have explicit
alternating-binomial formulas; this module evaluates them exactly over
rationals, and in float mode through exact dyadic accumulation or, for long
horizons, through the numerically stable product form of the generating
function

    f(alpha) = (A - sqrt((1 - alpha^2) (1 - (2p-1)^2 alpha^2))) / (2 p alpha),
    A = 1 + (2p-1) alpha^2,

whose square-root factor satisfies a four-term holonomic recurrence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

GENFUNC_SERIES_GUARD = 10**3
REQUIRED_M_CAP = 10**7


def is_rational_prob(p) -> bool:
    """True when p was supplied as an exact rational (int or Fraction)."""
    return isinstance(p, (int, Fraction)) and not isinstance(p, bool)


def _as_exact(p) -> Fraction:
    q = Fraction(p)  # exact also for floats (dyadic)
    if q < 0 or q > 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return q


@lru_cache(maxsize=None)
def gen_binomial(r, k: int) -> Fraction:
    """Generalized binomial coefficient r (r-1) ... (r-k+1) / k!, exact."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = Fraction(r)
    out = Fraction(1)
    for i in range(k):
        out *= r - i
    return out / math.factorial(k)


@lru_cache(maxsize=None)
def _half_binomial(n: int) -> Fraction:
    return gen_binomial(Fraction(1, 2), n)


def _pow_zero_safe(base: Fraction, exp: int) -> Fraction:
    # 0^0 = 1 by convention, keeping the formulas continuous at p = 1/2.
    if exp == 0:
        return Fraction(1)
    return base ** exp


@lru_cache(maxsize=None)
def _first_passage_exact(p: Fraction, t: int) -> Fraction:
    if t % 2 == 0:
        return Fraction(0)
    m = (t + 1) // 2
    two_p = 2 * p
    skew = 2 * p - 1
    total = Fraction(0)
    for n in range(1, m + 1):
        sign = 1 if (n + 1) % 2 == 0 else -1
        term = sign * _half_binomial(n) * gen_binomial(1 - 2 * n, m - n)
        term *= two_p ** (2 * n - 1)
        term *= _pow_zero_safe(skew, m - n)
        total += term
    return total


@lru_cache(maxsize=None)
def _return_exact(p: Fraction, t: int) -> Fraction:
    if t % 2 == 1:
        return Fraction(0)
    m = t // 2
    two_p = 2 * p
    skew = 2 * p - 1
    total = Fraction(0)
    for k in range(1, m + 1):
        for i in range(1, k + 1):
            ci = _half_binomial(i) * gen_binomial(1 - 2 * i, k - i)
            for j in range(1, m - k + 2):
                sign = 1 if (i + j) % 2 == 0 else -1
                term = sign * ci * _half_binomial(j)
                term *= gen_binomial(1 - 2 * j, m - k + 1 - j)
                term *= two_p ** (2 * (i + j - 1))
                term *= _pow_zero_safe(skew, m + 1 - (i + j))
                total += term
    return total


def first_passage_pmf(p, t: int):
    """P(T1 = t): probability the walk first reaches the top origin at step t.

    Even t gives exactly 0. Rational p (int/Fraction) returns an exact
    Fraction; float p is evaluated exactly over its dyadic value and rounded
    once, so float mode agrees with the rational route to the last bit.
    """
    if t < 1:
        raise ValueError("step count must be positive")
    exact = _first_passage_exact(_as_exact(p), t)
    return exact if is_rational_prob(p) else float(exact)


def return_pmf(p, t: int):
    """P(T1 + T2 = t): probability the full protocol closes at step t.

    Odd t gives exactly 0. Equals the self-convolution of first_passage_pmf;
    evaluated here through its own triple-sum formula so the two routes stay
    independent.
    """
    if t < 1:
        raise ValueError("step count must be positive")
    exact = _return_exact(_as_exact(p), t)
    return exact if is_rational_prob(p) else float(exact)


# ── Stable float series (product form of the generating function) ────────

def _sqrt_series(p: float, t_max: int) -> np.ndarray:
    """Coefficients h_0..h_t_max of sqrt((1-a^2)(1-(2p-1)^2 a^2)).

    Only even indices are nonzero. From 2 g h' = g' h with the quartic
    g = 1 - (1+c^2) a^2 + c^2 a^4 one gets
        h_M = ((1+c^2)(M-3) h_{M-2} - c^2 (M-6) h_{M-4}) / M.
    """
    c = 2.0 * p - 1.0
    c2 = c * c
    h = np.zeros(t_max + 1)
    h[0] = 1.0
    for m in range(2, t_max + 1, 2):
        acc = (1.0 + c2) * (m - 3) * h[m - 2]
        if m >= 4:
            acc -= c2 * (m - 6) * h[m - 4]
        h[m] = acc / m
    return h


def _as_float_prob(p) -> float:
    p = float(p)
    if not -1e-12 <= p <= 1.0 + 1e-12:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return min(max(p, 0.0), 1.0)  # forgive accumulated grid roundoff


def first_passage_profile(p: float, t_max: int) -> np.ndarray:
    """Float pmf values P(T1 = t) for t = 1..t_max (index 0 unused)."""
    p = _as_float_prob(p)
    out = np.zeros(t_max + 1)
    if p == 0.0 or t_max < 1:
        return out
    c = 2.0 * p - 1.0
    h = _sqrt_series(p, t_max + 1)
    out[1] = (c - h[2]) / (2.0 * p)
    for t in range(3, t_max + 1, 2):
        out[t] = -h[t + 1] / (2.0 * p)
    return out


def return_profile(p: float, t_max: int) -> np.ndarray:
    """Float pmf values P(T1 + T2 = t) for t = 1..t_max (index 0 unused)."""
    p = _as_float_prob(p)
    out = np.zeros(t_max + 1)
    if p == 0.0 or t_max < 2:
        return out
    c = 2.0 * p - 1.0
    h = _sqrt_series(p, t_max + 2)
    denom = 2.0 * p * p
    out[2] = (c * c - h[4] - c * h[2]) / denom
    for t in range(4, t_max + 1, 2):
        out[t] = -(h[t + 2] + c * h[t]) / denom
    return out


def cumulative_profile(p: float, t_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(cumulative first-passage, cumulative return) for budgets 0..t_max."""
    return (np.cumsum(first_passage_profile(p, t_max)),
            np.cumsum(return_profile(p, t_max)))


def cumulative_success(p, m: int, mode: str = "full"):
    """Probability of success within a budget of m gate uses.

    mode "commutator": P(T1 <= m), the first phase alone.
    mode "full": P(T1 + T2 <= m), the complete rewinding protocol.
    Exact Fraction for rational p, float otherwise.
    """
    if m < 0:
        raise ValueError("gate budget must be nonnegative")
    if mode not in ("commutator", "full"):
        raise ValueError(f"unknown mode {mode!r}")
    if is_rational_prob(p):
        q = _as_exact(p)
        pmf = _first_passage_exact if mode == "commutator" else _return_exact
        start = 1 if mode == "commutator" else 2
        return sum((pmf(q, t) for t in range(start, m + 1, 2)), Fraction(0))
    fp, ret = cumulative_profile(float(p), max(m, 1))
    return float((fp if mode == "commutator" else ret)[m])


# ── Generating function ──────────────────────────────────────────────────

def genfunc_closed(p, alpha: float) -> float:
    """Closed-form generating function E[alpha^T1] on 0 < alpha < 1.

    Minus-root branch of the quadratic, evaluated in the rationalized form
    2 p alpha / (lin + sqrt(lin^2 - 4 p^2 alpha^2)) with
    lin = 1 + 2 p alpha^2 - alpha^2, which avoids cancellation for small
    alpha. p = 0 returns the limit 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    p = float(p)
    if p == 0.0:
        return 0.0
    a2 = alpha * alpha
    lin = 1.0 + 2.0 * p * a2 - a2
    disc = lin * lin - 4.0 * p * p * a2
    return 2.0 * p * alpha / (lin + math.sqrt(max(disc, 0.0)))


def genfunc_series(p, t_max: int) -> list:
    """Taylor coefficients c_1..c_t_max of the generating function at 0.

    Obtained by substituting a power series into the defining quadratic
    alpha p f^2 + (alpha^2 - 2 p alpha^2 - 1) f + p alpha = 0, which gives
    c_1 = p and c_N = p * sum_{i+j=N-1} c_i c_j + (1 - 2p) c_{N-2}.
    Exact Fractions for rational p, floats otherwise.
    """
    if t_max < 1 or t_max > GENFUNC_SERIES_GUARD:
        raise ValueError(f"t_max must lie in [1, {GENFUNC_SERIES_GUARD}]")
    rational = is_rational_prob(p)
    q = _as_exact(p) if rational else float(p)
    zero = Fraction(0) if rational else 0.0
    coeffs = [zero] * (t_max + 1)
    coeffs[1] = q
    for n in range(2, t_max + 1):
        conv = sum((coeffs[i] * coeffs[n - 1 - i] for i in range(1, n - 1)), zero)
        coeffs[n] = q * conv + (1 - 2 * q) * coeffs[n - 2]
    return coeffs[1:]


# ── Trim-bound planning ──────────────────────────────────────────────────

@dataclass(frozen=True)
class TrimPlan:
    """Smallest even gate budget meeting a target success probability."""

    m: int
    worst_grid_p: float
    worst_grid_prob: float
    t_prime: float | None = None


def required_m(p_min, q, dt: float | None = None, tau: float | None = None,
               s: int = 0, grid_step: float = 0.001,
               m_cap: int = REQUIRED_M_CAP) -> TrimPlan:
    """Smallest even m with full-protocol success >= q across [p_min, 1].

    The minimum is taken over a probability grid of the given step rather
    than assuming monotonicity in p. When both timing constants are given,
    the running-time bound T' = m (dt + tau) + s dt is reported too.
    """
    p_min = float(p_min)
    q = float(q)
    if not 0.0 < p_min <= 1.0:
        raise ValueError("p_min must lie in (0, 1]")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    n_steps = int(math.floor((1.0 - p_min) / grid_step + 1e-9))
    grid = p_min + grid_step * np.arange(n_steps + 1)
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    grid = np.clip(grid, 0.0, 1.0)

    c = 2.0 * grid - 1.0
    c2 = c * c
    denom = 2.0 * grid * grid
    # rolling window of the sqrt-series coefficients h_{M-4}..h_M per grid p
    h4 = np.zeros_like(grid)   # h_{M-4}
    h2 = np.zeros_like(grid)   # h_{M-2}
    h2[:] = 1.0                # seeds as h_0 when M = 2
    cum = np.zeros_like(grid)
    for m in range(2, m_cap + 1, 2):
        h0 = ((1.0 + c2) * (m - 3) * h2 - c2 * (m - 6) * h4) / m  # h_m
        if m == 4:
            r = (c2 - h0 - c * h2) / denom           # return pmf at t = 2
        elif m >= 6:
            r = -(h0 + c * h2) / denom               # return pmf at t = m - 2
        else:
            r = np.zeros_like(grid)
        cum += r
        budget = m - 2
        if budget >= 2:
            k = int(np.argmin(cum))
            if cum[k] >= q:
                t_prime = None
                if dt is not None and tau is not None:
                    t_prime = budget * (dt + tau) + s * dt
                return TrimPlan(m=budget, worst_grid_p=float(grid[k]),
                                worst_grid_prob=float(cum[k]), t_prime=t_prime)
        h4, h2 = h2, h0
    raise RuntimeError(f"no gate budget up to {m_cap} reaches success {q} "
                       f"for p_min = {p_min}")


# ── Distribution containers ──────────────────────────────────────────────

@dataclass
class HittingDist:
    """Probability mass function over step counts t = 1..t_max.

    probs[i] holds P(T = i + 1); entries on the wrong parity are stored as
    explicit zeros so convolution stays index-exact. backing is "rational"
    (Fraction entries) or "float".
    """

    probs: list
    backing: str = "float"

    def __post_init__(self):
        if self.backing not in ("rational", "float"):
            raise ValueError(f"unknown backing {self.backing!r}")

    def __len__(self) -> int:
        return len(self.probs)

    def prob(self, t: int):
        if not 1 <= t <= len(self.probs):
            raise IndexError(f"t must lie in [1, {len(self.probs)}]")
        return self.probs[t - 1]

    def rows(self):
        for i, value in enumerate(self.probs):
            yield i + 1, value

    def cumulative(self) -> list:
        total = Fraction(0) if self.backing == "rational" else 0.0
        out = []
        for value in self.probs:
            total += value
            out.append(total)
        return out

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.probs])


def first_passage_dist(p, t_max: int) -> HittingDist:
    """HittingDist of T1 from the closed formula, matching p's backing."""
    if is_rational_prob(p):
        q = _as_exact(p)
        return HittingDist([_first_passage_exact(q, t) for t in range(1, t_max + 1)],
                           backing="rational")
    profile = first_passage_profile(float(p), t_max)
    return HittingDist([float(v) for v in profile[1:]], backing="float")


@dataclass
class SuccessCurve:
    """Success probability as a function of the gate budget m."""

    m: list[int] = field(default_factory=list)
    prob_commutator: list[float] = field(default_factory=list)
    prob_full: list[float] = field(default_factory=list)

    def rows(self):
        return zip(self.m, self.prob_commutator, self.prob_full)
