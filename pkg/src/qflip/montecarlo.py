"""Exact simulation of the three coin-simulation procedures.

The state q is kept as an exact rational throughout, and every biased flip is
realized by comparing random bits against the binary expansion of p, so the
simulated distributions match the recurrences exactly.

Random bits come from numpy's Philox-4x64 counter-based generator keyed by
``SeedSequence(seed, spawn_key=(stream,))``; each block of
:data:`TRIALS_PER_STREAM` trials uses its own stream, which makes results
independent of how trials are distributed over worker processes. Bits are
consumed least-significant first from successive 64-bit words.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .errors import InvalidBias, NonTermination, OutOfDomain
from .intervals import ONE, ZERO, to_rational
from .process import PiecewiseRecurrence, compile_map, make_builtin

MAX_ITERATIONS = 1_000_000
TRIALS_PER_STREAM = 10_000

# variant -> recurrence family whose map the procedure follows
VARIANT_FAMILY = {0: "E0", 1: "E1", 2: "E2"}

# piece tag -> (continue on heads?, result when halting)
BRANCHES = {
    "low": (True, False),        # q <= p: heads rescales q/p, tails returns false
    "rest": (False, True),       # q > p (first procedure)
    "mid": (False, True),        # p < q (<= 1/2 or < 1-p): heads returns true
    "mid_right": (False, False), # q > 1/2 (third procedure): heads returns false
    "high": (True, True),        # q >= 1-p: heads rescales, tails returns true
}


@dataclass(frozen=True)
class SimOutcome:
    heads: bool
    flips: int
    states: Optional[tuple] = None


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int


class BitSource:
    """Uniform random bits from a Philox stream."""

    def __init__(self, seed: int, stream: int = 0, block: int = 512):
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
        self._gen = np.random.Generator(np.random.Philox(ss))
        self._block = block
        self._words: list = []
        self._word = 0
        self._left = 0

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        if self._left == 0:
            if not self._words:
                self._words = self._gen.integers(
                    0, 2**64, size=self._block, dtype=np.uint64).tolist()[::-1]
            self._word = self._words.pop()
            self._left = 64
        bit = self._word & 1
        self._word >>= 1
        self._left -= 1
        return bit


def bernoulli_exact(p, bit_source) -> bool:
    """True with probability exactly p.

    The uniform variate U = 0.b1 b2 ... is compared digit by digit with the
    binary expansion of p; the first differing digit decides ``U < p``.
    """
    p = to_rational(p)
    if not (ZERO < p < ONE):
        raise ValueError("p must lie in (0, 1)")
    return _pflip(p.numerator, p.denominator, iter(bit_source))


class _Program:
    """A recurrence's compiled map plus the coin outcome that continues each piece.

    Stepping goes through :class:`qflip.process.CompiledMap`, the same integer
    form ``series_eval`` uses, so simulator and recurrence share one map.
    """

    def __init__(self, rec: PiecewiseRecurrence):
        p = rec.p
        self.p_num, self.p_den = p.numerator, p.denominator
        self.map = compile_map(rec)
        self.flags = []
        for pc in rec.pieces:
            cont_heads, halt_value = BRANCHES[pc.tag]
            expected_r = p if cont_heads else 1 - p
            if pc.r != expected_r:
                raise AssertionError(f"piece {pc.tag}: weight {pc.r} != {expected_r}")
            self.flags.append((cont_heads, halt_value))


_PROGRAMS: dict = {}


def _program(variant: int, p: Fraction) -> _Program:
    key = (variant, p)
    if key not in _PROGRAMS:
        if variant not in VARIANT_FAMILY:
            raise ValueError(f"variant must be 0, 1 or 2, got {variant}")
        _PROGRAMS[key] = _Program(make_builtin(VARIANT_FAMILY[variant], p))
    return _PROGRAMS[key]


def _pflip(p_num: int, p_den: int, bits) -> bool:
    num = p_num
    for bit in bits:
        num <<= 1
        digit = 1 if num >= p_den else 0
        num -= digit * p_den
        if bit != digit:
            return bit < digit
        if num == 0:  # remaining digits of p are all 0, so U >= p
            return False
    raise RuntimeError("bit source exhausted")


def _run(prog: _Program, n: int, d: int, bits, trace: bool):
    states = [Fraction(n, d)] if trace else None
    cm = prog.map
    for flips in range(1, MAX_ITERATIONS + 1):
        i = cm.locate(n, d)
        cont_heads, halt_value = prog.flags[i]
        heads = _pflip(prog.p_num, prog.p_den, bits)
        if heads != cont_heads:
            return SimOutcome(halt_value, flips, tuple(states) if trace else None)
        n, d = cm.step(n, d, i)
        if trace:
            states.append(Fraction(n, d))
    raise NonTermination(f"no halt after {MAX_ITERATIONS} flips")


def run_qflip(variant: int, p, q, rng, *, trace: bool = False) -> SimOutcome:
    """Simulate one call of procedure ``variant`` on input q.

    ``rng`` is any iterator of bits (e.g. :class:`BitSource`). With
    ``trace=True`` the outcome records every state visited.
    """
    p, q = to_rational(p), to_rational(q)
    if not (ZERO < p <= Fraction(1, 2)):
        raise InvalidBias(f"bias p must satisfy 0 < p <= 1/2, got {p}")
    if not (ZERO <= q <= ONE):
        raise OutOfDomain(f"q={q} is outside [0, 1]")
    return _run(_program(variant, p), q.numerator, q.denominator, rng, trace)


def _simulate_stream(args) -> tuple:
    variant, p, q, seed, stream, count = args
    prog = _program(variant, p)
    bits = BitSource(seed, stream)
    h_sum = f_sum = f_sq = 0
    for _ in range(count):
        out = _run(prog, q.numerator, q.denominator, bits, False)
        h_sum += out.heads
        f_sum += out.flips
        f_sq += out.flips * out.flips
    return h_sum, f_sum, f_sq


def _estimates(variant: int, p, q, trials: int, seed: int, workers: int = 1) -> tuple:
    p, q = to_rational(p), to_rational(q)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not (ZERO < p <= Fraction(1, 2)):
        raise InvalidBias(f"bias p must satisfy 0 < p <= 1/2, got {p}")
    if not (ZERO <= q <= ONE):
        raise OutOfDomain(f"q={q} is outside [0, 1]")
    jobs = []
    for stream, start in enumerate(range(0, trials, TRIALS_PER_STREAM)):
        jobs.append((variant, p, q, seed, stream, min(TRIALS_PER_STREAM, trials - start)))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_simulate_stream, jobs))
    else:
        parts = [_simulate_stream(j) for j in jobs]
    h = sum(x[0] for x in parts)
    fs = sum(x[1] for x in parts)
    fq = sum(x[2] for x in parts)
    return _estimate(h, h, trials, seed), _estimate(fs, fq, trials, seed)


def _estimate(total: int, total_sq: int, n: int, seed: int) -> MCEstimate:
    mean = total / n
    if n > 1:
        var = max((total_sq - total * total / n) / (n - 1), 0.0)
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return MCEstimate(mean, stderr, n, seed)


def estimate_both(variant: int, p, q, trials: int, seed: int, workers: int = 1) -> tuple:
    """(heads estimate, flips estimate) from one shared set of simulations."""
    return _estimates(variant, p, q, trials, seed, workers)


def estimate_heads(variant: int, p, q, trials: int, seed: int, workers: int = 1) -> MCEstimate:
    return _estimates(variant, p, q, trials, seed, workers)[0]


def estimate_flips(variant: int, p, q, trials: int, seed: int, workers: int = 1) -> MCEstimate:
    return _estimates(variant, p, q, trials, seed, workers)[1]
