"""Maxwell-Boltzmann shaping and constant-composition distribution matching.

A Maxwell-Boltzmann (MB) family assigns prior exp(-nu * a^2) to a point
of amplitude a, normalized over the alphabet.  nu = 0 recovers the
uniform distribution; nu -> inf concentrates on the smallest amplitude.
The family maximizes entropy subject to a mean-energy constraint, which
is what makes it the right shaping target for the average-power-limited
AWGN channel.

The distribution matcher (DM) realizes such a prior operationally: it
maps a block of uniform input symbols to a fixed-composition output
block by arithmetic-coding-style interval subdivision, exactly and
invertibly, using big-integer rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .field import Prime, FpSymbol, ask_point


@dataclass(frozen=True, eq=False, slots=True)
class MaxwellBoltzmann:
    """An MB-shaped prior over an amplitude alphabet.

    probs[i] is proportional to exp(-nu * amplitudes[i]^2); entries are
    kept in the caller's alphabet order (not sorted).
    """

    nu: float
    amplitudes: np.ndarray = dataclass_field(repr=False)
    probs: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=float)
        probs = np.array(self.probs, dtype=float)
        if amps.shape != probs.shape or amps.ndim != 1:
            raise ValueError("amplitudes and probs must be 1-D with equal length")
        if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be a normalized PMF")
        amps.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_amplitudes(cls, nu: float, amplitudes: Sequence[float]) -> "MaxwellBoltzmann":
        if nu < 0.0:
            raise ValueError("shaping parameter nu must be nonnegative")
        amps = np.asarray(amplitudes, dtype=float)
        if amps.size == 0:
            raise ValueError("amplitude alphabet must be nonempty")
        # subtract the minimum exponent before exponentiating for stability
        expo = -nu * amps**2
        expo -= expo.max()
        weights = np.exp(expo)
        return cls(nu, amps, weights / weights.sum())

    def entropy_bits(self) -> float:
        p = self.probs[self.probs > 0.0]
        return float(-(p * np.log2(p)).sum())


def mb_ask_prior(field: Prime, nu: float) -> MaxwellBoltzmann:
    """MB prior over the p-ASK alphabet, indexed by symbol value 0..p-1.

    Entry s carries the amplitude |ask_point(s)|, so opposite-sign
    amplitudes automatically receive equal probability.
    """
    amps = np.array(
        [abs(ask_point(FpSymbol(s, field))) for s in range(field.p)], dtype=float
    )
    return MaxwellBoltzmann.from_amplitudes(nu, amps)


def ask_energy(prior: MaxwellBoltzmann) -> float:
    """Mean symbol energy sum_i probs[i] * amplitudes[i]^2."""
    return float(np.dot(prior.probs, prior.amplitudes**2))


def cqam_prior(shell_prior: MaxwellBoltzmann, field: Prime) -> np.ndarray:
    """Per-point prior for a p^2-point circular constellation.

    Shell i (radius amplitudes[i]) carries total probability probs[i],
    split uniformly over its p phases; point index = shell * p + phase.
    """
    p = field.p
    if shell_prior.probs.shape != (p,):
        raise ValueError(
            f"shell prior must have {p} entries, got {shell_prior.probs.shape[0]}"
        )
    return np.repeat(shell_prior.probs / p, p)


# ---------------------------------------------------------------------------
# constant-composition distribution matching
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CompositionPlan:
    """A target composition for fixed-length shaped blocks.

    counts[s] is the number of occurrences of symbol s in every output
    block; sum(counts) == block_length.  The number of admissible blocks
    is the multinomial coefficient M, and the matcher consumes
    floor(log_p M) uniform input symbols per block.
    """

    field: Prime
    block_length: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.block_length < 1:
            raise ValueError("block length must be positive")
        if len(self.counts) != self.field.p:
            raise ValueError(
                f"need one count per symbol of F_{self.field.p}, "
                f"got {len(self.counts)}"
            )
        if any(c < 0 for c in self.counts):
            raise ValueError("composition counts must be nonnegative")
        if sum(self.counts) != self.block_length:
            raise ValueError(
                f"counts sum to {sum(self.counts)}, expected {self.block_length}"
            )

    @classmethod
    def from_distribution(
        cls, field: Prime, probs: Sequence[float], block_length: int
    ) -> "CompositionPlan":
        """Quantize a PMF to integer counts by largest-remainder rounding.

        Ties in the fractional parts are broken toward the lower symbol
        index, which keeps the plan deterministic.
        """
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (field.p,):
            raise ValueError("PMF length must equal the field size")
        if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probs must be a normalized PMF")
        ideal = probs * block_length
        counts = np.floor(ideal).astype(int)
        remainder = ideal - counts
        shortfall = block_length - int(counts.sum())
        # stable sort: descending remainder, ascending index on ties
        order = np.lexsort((np.arange(field.p), -remainder))
        for idx in order[:shortfall]:
            counts[idx] += 1
        return cls(field, block_length, tuple(int(c) for c in counts))

    def num_sequences(self) -> int:
        """Multinomial coefficient: number of blocks with this composition."""
        m = math.factorial(self.block_length)
        for c in self.counts:
            m //= math.factorial(c)
        return m

    def input_length(self) -> int:
        """Uniform input symbols consumed per block: floor(log_p M)."""
        m = self.num_sequences()
        p = self.field.p
        d = 0
        while p ** (d + 1) <= m:
            d += 1
        return d

    def rate_bits(self) -> float:
        """Matching rate in bits per shaped symbol, (d log2 p) / N."""
        return self.input_length() * math.log2(self.field.p) / self.block_length


def _subdivide(
    low: Fraction, width: Fraction, remaining: list[int], total: int, point: Fraction
) -> tuple[int, Fraction, Fraction]:
    """One interval-subdivision step: pick the symbol whose slot holds point.

    The current interval [low, low + width) is split into consecutive
    slots of width proportional to the remaining symbol counts.  Returns
    (symbol, slot_low, slot_width).
    """
    cum = 0
    for s, c in enumerate(remaining):
        if c == 0:
            continue
        slot_low = low + width * Fraction(cum, total)
        slot_width = width * Fraction(c, total)
        if slot_low <= point < slot_low + slot_width:
            return s, slot_low, slot_width
        cum += c
    raise RuntimeError("interval subdivision failed to locate the input point")


def ccdm_encode(plan: CompositionPlan, uniform_symbols: Sequence[int]) -> list[int]:
    """Map uniform input symbols to one constant-composition block.

    Consumes exactly plan.input_length() symbols (each in 0..p-1), reads
    them as a base-p integer u, and walks the interval subdivision that
    assigns each admissible block a subinterval of [0, 1) of width 1/M:
    the output is the block whose subinterval contains u / p^d.  Exact
    rational arithmetic makes the map invertible with no precision loss.
    """
    p = plan.field.p
    d = plan.input_length()
    if len(uniform_symbols) < d:
        raise ValueError(
            f"matcher needs {d} input symbols per block, got {len(uniform_symbols)}"
        )
    consumed = list(uniform_symbols[:d])
    for s in consumed:
        if not 0 <= s < p:
            raise ValueError(f"input symbol {s} outside F_{p}")
    u = 0
    for s in consumed:
        u = u * p + s
    point = Fraction(u, p**d)

    remaining = list(plan.counts)
    total = plan.block_length
    low, width = Fraction(0), Fraction(1)
    block: list[int] = []
    for _ in range(plan.block_length):
        s, low, width = _subdivide(low, width, remaining, total, point)
        block.append(s)
        remaining[s] -= 1
        total -= 1
    return block


def ccdm_decode(plan: CompositionPlan, shaped: Sequence[int]) -> list[int]:
    """Invert ccdm_encode: recover the uniform input symbols of a block.

    Replays the subdivision along the given block to find its interval
    [L, L + 1/M), then returns the unique grid point u / p^d inside it.
    Blocks of the wrong composition, or blocks whose interval contains
    no grid point (compositions with M not a power of p have M - p^d
    such unreachable blocks), are rejected with ValueError.
    """
    p = plan.field.p
    shaped = list(shaped)
    if len(shaped) != plan.block_length:
        raise ValueError(
            f"block length {len(shaped)} does not match plan ({plan.block_length})"
        )
    observed = [0] * p
    for s in shaped:
        if not 0 <= s < p:
            raise ValueError(f"symbol {s} outside F_{p}")
        observed[s] += 1
    if tuple(observed) != plan.counts:
        raise ValueError(
            f"block composition {tuple(observed)} does not match plan {plan.counts}"
        )

    remaining = list(plan.counts)
    total = plan.block_length
    low, width = Fraction(0), Fraction(1)
    for s in shaped:
        cum = sum(remaining[:s])
        low = low + width * Fraction(cum, total)
        width = width * Fraction(remaining[s], total)
        remaining[s] -= 1
        total -= 1

    d = plan.input_length()
    scale = p**d
    # smallest grid point >= low
    u = -((-low.numerator * scale) // low.denominator)
    if not Fraction(u, scale) < low + width:
        raise ValueError("block is not in the matcher image (no input maps to it)")
    digits = []
    for _ in range(d):
        digits.append(u % p)
        u //= p
    return digits[::-1]
