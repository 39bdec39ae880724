"""Systematic shaping chains: distribution matcher + linear code + mapper.

A frame of n channel uses over a p^2-point circular constellation is
assembled from n/2 shell symbols and n/2 phase symbols, all in F_p:

* the n/2 shell symbols come from the distribution matcher and carry
  the shaped (Maxwell-Boltzmann) distribution;
* a systematic rate k/n code with generator [I | P] encodes the
  information vector [shell symbols | k - n/2 uniform source symbols];
  its n - k parity symbols, together with the source symbols, fill the
  n/2 phase slots;
* point index = shell_symbol * p + phase_symbol.

Because each parity symbol is a dense F_p-linear combination of many
information symbols, the parity (and hence phase) distribution is
driven to uniform even though the shell symbols are heavily shaped;
that is what makes the phase slots usable for uniform payload without
disturbing the shell shaping.  k >= n/2 (R_c >= 1/2) is required so the
shaped symbols all fit in the systematic part.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import chi2

from .constellations import Constellation
from .field import Prime
from .shaping import CompositionPlan, MaxwellBoltzmann, ccdm_encode


@dataclass(frozen=True, eq=False, slots=True)
class CodeSpec:
    """A systematic linear code over F_p with generator [I_k | P].

    parity is the k x (n - k) matrix P.  Codes with k < n - k cannot
    host a half-shaped frame and are rejected.
    """

    field: Prime
    n: int
    k: int
    parity: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        if not 0 < self.k < self.n:
            raise ValueError("need 0 < k < n")
        if 2 * self.k < self.n:
            raise ValueError(
                f"coding rate {Fraction(self.k, self.n)} below 1/2; "
                "shaped symbols would spill into the parity part"
            )
        parity = np.array(self.parity, dtype=np.int64)
        if parity.shape != (self.k, self.n - self.k):
            raise ValueError(
                f"parity matrix must be {self.k} x {self.n - self.k}, "
                f"got {parity.shape}"
            )
        if parity.size and (parity.min() < 0 or parity.max() >= self.field.p):
            raise ValueError("parity entries must lie in 0..p-1")
        parity.flags.writeable = False
        object.__setattr__(self, "parity", parity)

    @property
    def coding_rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @classmethod
    def random_dense(
        cls,
        field: Prime,
        n: int,
        k: int,
        seed: int = 0,
        min_col_weight: int | None = None,
    ) -> "CodeSpec":
        """Draw P uniformly over F_p^(k x (n-k)), resampling any column
        with fewer than min_col_weight (default ceil(k/2)) nonzeros.

        Dense columns are what pushes each parity symbol's distribution
        to uniform; see the module docstring.
        """
        if min_col_weight is None:
            min_col_weight = -(-k // 2)
        if min_col_weight > k:
            raise ValueError("min_col_weight cannot exceed k")
        rng = np.random.default_rng(seed)
        parity = rng.integers(0, field.p, size=(k, n - k))
        for _ in range(1000):
            weak = np.flatnonzero((parity != 0).sum(axis=0) < min_col_weight)
            if weak.size == 0:
                return cls(field, n, k, parity)
            parity[:, weak] = rng.integers(0, field.p, size=(k, weak.size))
        raise RuntimeError("failed to draw dense parity columns")


def encode(code: CodeSpec, info: Sequence[int] | np.ndarray) -> np.ndarray:
    """Systematic encoding [info | info @ P mod p]; batch-friendly.

    info may be a length-k vector or an (m, k) matrix of symbols.
    """
    info = np.asarray(info, dtype=np.int64)
    if info.shape[-1] != code.k:
        raise ValueError(f"information block must have length {code.k}")
    if info.size and (info.min() < 0 or info.max() >= code.field.p):
        raise ValueError("information symbols must lie in 0..p-1")
    parity = info @ code.parity % code.field.p
    return np.concatenate([info, parity], axis=-1)


@dataclass(frozen=True, slots=True)
class PasFrame:
    """One mapped frame: inputs, derived parity, and the point indices."""

    dm_symbols: tuple[int, ...]
    source_symbols: tuple[int, ...]
    parity_symbols: tuple[int, ...]
    point_indices: tuple[int, ...]

    @property
    def shell_symbols(self) -> tuple[int, ...]:
        return self.dm_symbols

    @property
    def phase_symbols(self) -> tuple[int, ...]:
        return self.source_symbols + self.parity_symbols


def map_frame(
    code: CodeSpec,
    cqam: Constellation,
    dm_out: Sequence[int],
    src: Sequence[int],
) -> PasFrame:
    """Assemble one frame from matcher output and uniform source symbols.

    dm_out must hold n/2 shell symbols and src the k - n/2 source
    symbols; distinct inputs yield distinct frames (the frame embeds
    both verbatim).
    """
    p = code.field.p
    if code.n % 2:
        raise ValueError("frame mapping needs an even code length")
    if cqam.size != p * p:
        raise ValueError(
            f"constellation has {cqam.size} points, expected {p * p}"
        )
    half = code.n // 2
    if len(dm_out) != half:
        raise ValueError(f"need {half} matcher symbols per frame, got {len(dm_out)}")
    if len(src) != code.k - half:
        raise ValueError(
            f"need {code.k - half} source symbols per frame, got {len(src)}"
        )
    shells = np.asarray(dm_out, dtype=np.int64)
    source = np.asarray(src, dtype=np.int64)
    codeword = encode(code, np.concatenate([shells, source]))
    parity = codeword[code.k:]
    phases = np.concatenate([source, parity])
    indices = shells * p + phases
    return PasFrame(
        dm_symbols=tuple(int(s) for s in dm_out),
        source_symbols=tuple(int(s) for s in src),
        parity_symbols=tuple(int(s) for s in parity),
        point_indices=tuple(int(i) for i in indices),
    )


def generate_frames(
    code: CodeSpec,
    cqam: Constellation,
    shell_prior: MaxwellBoltzmann,
    num_frames: int,
    seed: int,
    dm_block: int = 64,
) -> tuple[list[PasFrame], CompositionPlan]:
    """Run the full chain: matcher blocks feed frames, source is uniform.

    The matcher block length dm_block is independent of the code length;
    shaped symbols are buffered across frame boundaries.  Returns the
    frames and the composition plan actually used (its counts/N are the
    exact shell distribution of full blocks).
    """
    if num_frames < 1:
        raise ValueError("need at least one frame")
    p = code.field.p
    rng = np.random.default_rng(seed)
    plan = CompositionPlan.from_distribution(code.field, shell_prior.probs, dm_block)
    d = plan.input_length()
    half = code.n // 2
    need = num_frames * half

    shaped: list[int] = []
    while len(shaped) < need:
        u = rng.integers(0, p, size=d).tolist() if d else []
        shaped.extend(ccdm_encode(plan, u))
    src_len = code.k - half
    src_all = rng.integers(0, p, size=(num_frames, src_len))
    frames = [
        map_frame(
            code, cqam, shaped[i * half:(i + 1) * half], src_all[i].tolist()
        )
        for i in range(num_frames)
    ]
    return frames, plan


def empirical_distributions(
    frames: Sequence[PasFrame],
    cqam: Constellation,
    shell_target: Sequence[float] | None = None,
    min_frames: int = 10_000,
) -> dict:
    """Measure the symbol statistics a chain actually produced.

    Reports the parity PMF with its uniformity gap, the shell PMF
    against shell_target (default: the empirical shell marginal), and a
    chi-square statistic of the per-point counts against the product
    law target_shell x uniform-phase, with the 0.99 quantile for
    reference.  Fewer than min_frames frames is rejected as
    statistically meaningless.
    """
    if len(frames) < min_frames:
        raise ValueError(
            f"need at least {min_frames} frames for stable statistics, "
            f"got {len(frames)}"
        )
    if cqam.shells is None:
        raise ValueError("constellation has no shell structure")
    p = cqam.shells.num_shells

    parity = np.concatenate([np.array(f.parity_symbols, dtype=int) for f in frames])
    shells = np.concatenate([np.array(f.dm_symbols, dtype=int) for f in frames])
    points = np.concatenate([np.array(f.point_indices, dtype=int) for f in frames])

    parity_pmf = np.bincount(parity, minlength=p) / parity.size
    shell_pmf = np.bincount(shells, minlength=p) / shells.size
    if shell_target is None:
        target = shell_pmf
    else:
        target = np.asarray(shell_target, dtype=float)
        if target.shape != (p,):
            raise ValueError(f"shell target must have {p} entries")

    point_counts = np.bincount(points, minlength=p * p).astype(float)
    expected = np.repeat(target / p, p) * points.size
    if np.any(expected <= 0.0):
        raise ValueError("shell target must be strictly positive")
    stat = float(((point_counts - expected) ** 2 / expected).sum())
    dof = p * p - 1
    return {
        "num_frames": len(frames),
        "num_parity_symbols": int(parity.size),
        "num_points": int(points.size),
        "parity": {
            "pmf": parity_pmf.tolist(),
            "uniformity_gap": float(np.abs(parity_pmf - 1.0 / p).max()),
        },
        "shells": {
            "pmf": shell_pmf.tolist(),
            "target": target.tolist(),
            "max_abs_dev": float(np.abs(shell_pmf - target).max()),
        },
        "points": {
            "chi_square": stat,
            "degrees_of_freedom": dof,
            "chi_square_99pct": float(chi2.ppf(0.99, dof)),
        },
    }
