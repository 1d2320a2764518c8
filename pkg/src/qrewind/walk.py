"""The two-row ladder walk underlying the protocol's word problem.

Nodes are (row, position); a vertical move toggles the row in place, a
horizontal move runs rightward on the lower row and leftward on the upper
row. Phase 1 starts at the lower origin and ends on first arrival at the
upper origin (the accumulated operator word has then been reduced to the
commutator); phase 2 continues the same graph until the walk closes back at
the lower origin. This module provides the node algebra, word bookkeeping,
exact DP oracles for both hitting times, Monte Carlo samplers, and the
trimmed two-phase controller at the classical level.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .analytics import HittingDist, is_rational_prob

DP_HORIZON_GUARD = 10**4
DEFAULT_SAMPLE_CAP = 10**5


class Row(Enum):
    LOWER = "lower"
    UPPER = "upper"


class Move(Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


class WalkNode(NamedTuple):
    row: Row
    position: int


ORIGIN = WalkNode(Row.LOWER, 0)
TOP_ORIGIN = WalkNode(Row.UPPER, 0)


def step_node(node: WalkNode, move: Move) -> WalkNode:
    """One edge of the ladder graph."""
    if move is Move.VERTICAL:
        row = Row.UPPER if node.row is Row.LOWER else Row.LOWER
        return WalkNode(row, node.position)
    if node.row is Row.LOWER:
        return WalkNode(Row.LOWER, node.position + 1)
    return WalkNode(Row.UPPER, node.position - 1)


class WordKind(Enum):
    Y_POW = "y_pow"     # word y^n
    XY_POW = "xy_pow"   # word x y^n


@dataclass(frozen=True)
class WordDescriptor:
    """Canonical reduced form of the accumulated operator word."""

    kind: WordKind
    power: int


def node_word(node: WalkNode, moves: list[Move]) -> WordDescriptor:
    """Reduced word reached by a phase-1 move sequence from the lower origin.

    Left-multiplying by y (horizontal) or x (vertical) and reducing with
    the proportionalities x^2 ~ 1 and y x y ~ x keeps the word in the form
    y^n or x y^n, mirroring the node coordinates exactly: (lower, n) <-> y^n and
    (upper, n) <-> x y^n. Raises if the sequence leaves the phase-1 region
    or does not end at the stated node.
    """
    current = ORIGIN
    for move in moves:
        if move is Move.HORIZONTAL and current.row is Row.UPPER and current.position == 0:
            raise ValueError("horizontal move from the upper origin leaves "
                             "the phase-1 word forms")
        current = step_node(current, move)
    if current != node:
        raise ValueError(f"move sequence ends at {current}, not {node}")
    kind = WordKind.Y_POW if node.row is Row.LOWER else WordKind.XY_POW
    return WordDescriptor(kind=kind, power=node.position)


# ── Monte Carlo sampling ─────────────────────────────────────────────────

def sample_first_passage(p: float, rng: np.random.Generator,
                         cap: int = DEFAULT_SAMPLE_CAP) -> int | None:
    """Steps until the walk from the lower origin first hits the top origin.

    Returns None on timeout (more than cap steps). The p = 0 walk drifts
    right forever and always times out.
    """
    p = float(p)
    row, pos = 0, 0  # 0 = lower, 1 = upper
    for t in range(1, cap + 1):
        if rng.random() < p:
            row ^= 1
        else:
            pos += 1 - 2 * row
        if row == 1 and pos == 0:
            return t
    return None


@dataclass
class FirstPassageSample:
    """Histogram of sampled first-passage times, times over cap censored."""

    counts: np.ndarray  # counts[t] for t = 1..cap (index 0 unused)
    timeouts: int
    runs: int

    def empirical_pmf(self) -> np.ndarray:
        return self.counts / self.runs


def sample_first_passage_batch(p: float, runs: int, cap: int, seed: int,
                               workers: int = 1) -> FirstPassageSample:
    """Vectorized batch sampler with per-worker derived RNG streams.

    Deterministic for a fixed (seed, workers) pair; chunks are assigned to
    workers in index order.
    """
    p = float(p)
    if runs < 1 or workers < 1:
        raise ValueError("runs and workers must be positive")
    counts = np.zeros(cap + 1, dtype=np.int64)
    timeouts = 0
    streams = np.random.SeedSequence(seed).spawn(workers)
    base, extra = divmod(runs, workers)
    for w, stream in enumerate(streams):
        n = base + (1 if w < extra else 0)
        if n == 0:
            continue
        rng = np.random.default_rng(stream)
        row = np.zeros(n, dtype=np.int8)
        pos = np.zeros(n, dtype=np.int64)
        alive = np.arange(n)
        for t in range(1, cap + 1):
            if alive.size == 0:
                break
            vert = rng.random(alive.size) < p
            pos[alive] += np.where(vert, 0, 1 - 2 * row[alive].astype(np.int64))
            row[alive] ^= vert
            hit = (row[alive] == 1) & (pos[alive] == 0)
            counts[t] += int(hit.sum())
            alive = alive[~hit]
        timeouts += int(alive.size)
    return FirstPassageSample(counts=counts, timeouts=timeouts, runs=runs)


# ── Exact DP oracles ─────────────────────────────────────────────────────

def _check_horizon(t_max: int):
    if t_max < 1 or t_max > DP_HORIZON_GUARD:
        raise ValueError(f"t_max must lie in [1, {DP_HORIZON_GUARD}]")


def dp_first_passage(p, t_max: int) -> HittingDist:
    """Exact pmf of the first passage to the top origin, by forward DP.

    The top origin is absorbing; positions are confined to [0, t_max],
    which is lossless for this horizon since each step moves one position.
    Rational p (int/Fraction) propagates exact Fractions.
    """
    _check_horizon(t_max)
    if is_rational_prob(p):
        return _dp_first_passage_exact(Fraction(p), t_max)
    return _dp_first_passage_float(float(p), t_max)


def _dp_first_passage_exact(p: Fraction, t_max: int) -> HittingDist:
    if p < 0 or p > 1:
        raise ValueError("probability must lie in [0, 1]")
    q = 1 - p
    lower = [Fraction(0)] * (t_max + 2)
    upper = [Fraction(0)] * (t_max + 2)
    lower[0] = Fraction(1)
    pmf = []
    for _ in range(t_max):
        pmf.append(p * lower[0] + q * upper[1])
        new_lower = [Fraction(0)] * (t_max + 2)
        new_upper = [Fraction(0)] * (t_max + 2)
        for k in range(t_max + 1):
            if lower[k]:
                new_lower[k + 1] += q * lower[k]
                if k >= 1:
                    new_upper[k] += p * lower[k]
            if k >= 1 and upper[k]:
                new_lower[k] += p * upper[k]
                if k >= 2:
                    new_upper[k - 1] += q * upper[k]
        lower, upper = new_lower, new_upper
    return HittingDist(pmf, backing="rational")


def _dp_first_passage_float(p: float, t_max: int) -> HittingDist:
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    q = 1.0 - p
    lower = np.zeros(t_max + 2)
    upper = np.zeros(t_max + 2)
    lower[0] = 1.0
    pmf = np.zeros(t_max)
    for t in range(t_max):
        pmf[t] = p * lower[0] + q * upper[1]
        new_lower = np.zeros(t_max + 2)
        new_upper = np.zeros(t_max + 2)
        new_lower[1:] = q * lower[:-1]
        new_lower[1:-1] += p * upper[1:-1]
        new_upper[1:-1] = p * lower[1:-1]
        new_upper[1:-1] += q * upper[2:]
        lower, upper = new_lower, new_upper
    return HittingDist([float(v) for v in pmf], backing="float")


def dp_return_time(p, t_max: int) -> HittingDist:
    """Exact pmf of the full return to the lower origin, by forward DP.

    Runs on the whole graph (positions in [-t_max, t_max]) with the lower
    origin absorbing at positive times; every closing trajectory passes
    through the top origin, so this independently cross-checks the
    convolution route to the return distribution.
    """
    _check_horizon(t_max)
    rational = is_rational_prob(p)
    pf = Fraction(p) if rational else float(p)
    if pf < 0 or pf > 1:
        raise ValueError("probability must lie in [0, 1]")
    zero = Fraction(0) if rational else 0.0
    one = Fraction(1) if rational else 1.0
    q = 1 - pf
    off = t_max  # position k stored at index k + off
    size = 2 * t_max + 2
    lower = [zero] * size
    upper = [zero] * size
    lower[off] = one
    pmf = []
    for _ in range(t_max):
        pmf.append(q * lower[off - 1] + pf * upper[off])
        new_lower = [zero] * size
        new_upper = [zero] * size
        for idx in range(size):
            lv = lower[idx]
            if lv:
                if idx + 1 < size:
                    new_lower[idx + 1] += q * lv
                new_upper[idx] += pf * lv
            uv = upper[idx]
            if uv:
                new_lower[idx] += pf * uv
                if idx >= 1:
                    new_upper[idx - 1] += q * uv
        # inflow to the lower origin was just recorded as pmf of the next
        # step; the walk is absorbed there, so it leaves the live mass
        # (edge overflow is lossless: that mass cannot close within horizon)
        new_lower[off] = zero
        lower, upper = new_lower, new_upper
    return HittingDist(pmf, backing="rational" if rational else "float")


# ── Trimmed two-phase controller ─────────────────────────────────────────

@dataclass(frozen=True)
class TrimmedOutcome:
    """Result of one trimmed protocol run at the classical walk level."""

    success: bool
    q_count: int
    phase1_steps: int
    phase2_steps: int
    aborted: bool = False


def run_walk_protocol(p: float, m: int, rng: np.random.Generator) -> TrimmedOutcome:
    """Run the two-phase walk with a total budget of m gate uses.

    Phase 1 walks from the lower origin until absorption at the top origin;
    phase 2 continues the same graph until the walk closes at the lower
    origin. Success means both phases complete within m steps in total (the
    rewind waiting period costs no gates).
    """
    if m < 2:
        raise ValueError("gate budget must be at least 2")
    p = float(p)
    steps = 0
    row, pos = 0, 0
    phase1 = None
    while steps < m:
        steps += 1
        if rng.random() < p:
            row ^= 1
        else:
            pos += 1 - 2 * row
        if phase1 is None:
            if row == 1 and pos == 0:
                phase1 = steps
        elif row == 0 and pos == 0:
            return TrimmedOutcome(success=True, q_count=steps,
                                  phase1_steps=phase1,
                                  phase2_steps=steps - phase1)
    phase1_steps = phase1 if phase1 is not None else m
    return TrimmedOutcome(success=False, q_count=m, phase1_steps=phase1_steps,
                          phase2_steps=m - phase1_steps)
