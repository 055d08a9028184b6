"""Batched loser-takes-all argmin over match-line currents.

The comparator sees at most 8 currents at a time. Longer row sets run
serially: the first batch's winner is carried into the next batch together
with 7 fresh rows, so one block serves any class count. Finite resolution is
modeled by treating any candidate within `resolution` of the batch minimum
as indistinguishable; such batches resolve by a seeded uniform draw and are
flagged ambiguous. Currents below the sensing floor read as zero.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class SensingSpec:
    """Comparator resolution, sensing floor and batch width."""

    resolution: float = 0.2e-6
    floor: float = 1e-9
    batch: int = 8

    def __post_init__(self):
        if not self.resolution > self.floor > 0:
            raise ValueError("need resolution > floor > 0")
        if self.batch < 2:
            raise ValueError("batch width must be at least 2")


@dataclass
class BatchComparison:
    """One comparator pass: the rows seen, the chosen row, and ambiguity."""

    rows: tuple
    winner: int
    ambiguous: bool


@dataclass
class LtaDecision:
    """Final winner with the full comparison trace."""

    winner: int
    trace: list
    ambiguous_flags: int


def _resolve(currents, spec, rng):
    c = np.asarray(currents, dtype=np.float64)
    c = np.where(c < spec.floor, 0.0, c)
    m = c.min()
    candidates = np.flatnonzero(c <= m + spec.resolution)
    if len(candidates) > 1:
        return int(rng.generator.choice(candidates)), True
    return int(candidates[0]), False


def compare_batch(currents, spec, rng):
    """Index of the lowest current in one batch of 2..batch values."""
    n = len(currents)
    if not 2 <= n <= spec.batch:
        raise ValueError(f"batch must hold 2..{spec.batch} currents, got {n}")
    idx, _ = _resolve(currents, spec, rng)
    return idx


def argmin_serial(currents, spec, rng):
    """Serial LTA argmin over any number of rows, carrying each winner forward."""
    c = np.asarray(currents, dtype=np.float64)
    n = c.size
    if n < 1:
        raise ValueError("need at least one current")
    if n == 1:
        return LtaDecision(winner=0, trace=[], ambiguous_flags=0)
    trace = []
    flags = 0
    first = min(spec.batch, n)
    rows = list(range(first))
    pos = first
    while True:
        idx, ambiguous = _resolve(c[rows], spec, rng)
        winner = rows[idx]
        trace.append(BatchComparison(rows=tuple(rows), winner=winner, ambiguous=ambiguous))
        flags += int(ambiguous)
        if pos >= n:
            break
        rows = [winner] + list(range(pos, min(pos + spec.batch - 1, n)))
        pos = min(pos + spec.batch - 1, n)
    return LtaDecision(winner=winner, trace=trace, ambiguous_flags=flags)
