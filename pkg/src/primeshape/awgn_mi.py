"""Mutual information of finite constellations on the AWGN channel.

All rates are in bits.  The SNR convention throughout is

    gamma = E_s / N_0,

where E_s is the prior-weighted mean symbol energy and N_0 the total
noise power: a real channel has noise variance sigma^2 = N_0 / 2, a
complex channel has circularly symmetric noise of variance N_0
(sigma^2 = N_0 / 2 per real component).  Under this convention the
capacities are (1/2) log2(1 + 2 gamma) per real dimension and
log2(1 + gamma) per complex dimension.

I(X; Y) is evaluated with Gauss-Hermite quadrature.  Substituting
y = x + sqrt(2) sigma t per real noise component turns the Gaussian
weight into the Hermite weight exp(-t^2) and the conditional density
ratio into a numerically benign log-sum-exp; 96 nodes per real
dimension put the quadrature error far below every tolerance used in
this package (doubling the node count moves results by < 1e-7 bits at
operating SNRs).

For shell-uniform priors on a p-fold rotationally symmetric
constellation, conditioning on one point per shell is exact (the output
statistic is invariant under the rotation group), reducing the complex
integral from p^2 conditional terms to p.  A direct p^2-term evaluator
is kept as a cross-check oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.special import logsumexp

from .constellations import Constellation

#: Default Gauss-Hermite node count per real dimension.
DEFAULT_NODES = 96

_LN2 = math.log(2.0)


@dataclass(frozen=True, slots=True)
class ChannelSnr:
    """An operating point gamma = E_s / N_0 on a real or complex channel."""

    gamma: float
    dimension: Literal["real", "complex"]

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if self.dimension not in ("real", "complex"):
            raise ValueError("dimension must be 'real' or 'complex'")


@lru_cache(maxsize=16)
def _hermgauss(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        t, w = np.polynomial.hermite.hermgauss(nodes)
    # the Hermite weight recurrence overflows somewhere above 300 nodes
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
        raise ValueError(f"Hermite weights overflow at {nodes} nodes; use fewer")
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def _log_priors(priors: np.ndarray) -> np.ndarray:
    out = np.full(priors.shape, -np.inf)
    pos = priors > 0.0
    out[pos] = np.log(priors[pos])
    return out


def mi_real_points(
    points: np.ndarray,
    priors: np.ndarray,
    sigma: float,
    nodes: int = DEFAULT_NODES,
) -> float:
    """I(X; Y) in bits for Y = X + N, N ~ Normal(0, sigma^2), X real finite.

    Parameters
    ----------
    points, priors : arrays of equal length; zero-prior points are allowed.
    sigma : noise standard deviation, > 0.
    nodes : Gauss-Hermite node count.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    points = np.asarray(points, dtype=float)
    priors = np.asarray(priors, dtype=float)
    t, w = _hermgauss(nodes)
    logp = _log_priors(priors)
    active = np.flatnonzero(priors > 0.0)

    y = points[active, None] + math.sqrt(2.0) * sigma * t[None, :]
    # log q(y) up to the common Gaussian normalizer, which cancels in the ratio
    d2 = (y[:, :, None] - points[None, None, :]) ** 2 / (2.0 * sigma**2)
    lse = logsumexp(logp[None, None, :] - d2, axis=2)
    integrand = (-t[None, :] ** 2 - lse) / _LN2
    total = float(np.dot(priors[active], integrand @ w) / math.sqrt(math.pi))
    return total


def mi_complex_points(
    points: np.ndarray,
    priors: np.ndarray,
    sigma: float,
    nodes: int = DEFAULT_NODES,
    condition_on: np.ndarray | None = None,
    condition_weights: np.ndarray | None = None,
) -> float:
    """I(X; Y) in bits for a complex alphabet in circular noise.

    sigma is the per-real-component deviation (noise power N_0 = 2 sigma^2).
    By default every positive-prior point contributes a conditional term;
    condition_on/condition_weights restrict the outer expectation to
    representative points (exact whenever the prior and geometry share a
    symmetry group acting transitively on each orbit).
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    points = np.asarray(points, dtype=complex)
    priors = np.asarray(priors, dtype=float)
    if condition_on is None:
        condition_on = points
        condition_weights = priors
    t, w = _hermgauss(nodes)
    w2 = np.outer(w, w)
    shift = math.sqrt(2.0) * sigma * (t[:, None] + 1j * t[None, :])
    t2 = t[:, None] ** 2 + t[None, :] ** 2
    logp = _log_priors(priors)

    total = 0.0
    for x, weight in zip(condition_on, condition_weights):
        if weight == 0.0:
            continue
        y = x + shift
        d2 = np.abs(y[:, :, None] - points[None, None, :]) ** 2 / (2.0 * sigma**2)
        lse = logsumexp(logp[None, None, :] - d2, axis=2)
        integrand = (-t2 - lse) / _LN2
        total += weight * float((w2 * integrand).sum()) / math.pi
    return total


def _shell_priors(c: Constellation) -> np.ndarray:
    """Extract per-shell priors, requiring uniformity within each shell."""
    if c.shells is None:
        raise ValueError("constellation has no shell structure")
    p = c.shells.num_shells
    grid = c.priors.reshape(p, p)
    if np.any(np.abs(grid - grid[:, :1]) > 1e-12):
        raise ValueError("priors are not uniform within shells")
    return grid.sum(axis=1)


def mi_real(c: Constellation, snr: ChannelSnr, nodes: int = DEFAULT_NODES) -> float:
    """I(X; Y) of a real constellation at gamma = E_s / N_0."""
    if snr.dimension != "real":
        raise ValueError("mi_real needs a real-dimension SNR")
    if np.abs(c.points.imag).max() > 0.0:
        raise ValueError("constellation is not real-valued")
    energy = c.mean_energy()
    if energy <= 0.0:
        raise ValueError("zero-energy constellation has no SNR interpretation")
    sigma = math.sqrt(energy / (2.0 * snr.gamma))
    return mi_real_points(c.points.real, c.priors, sigma, nodes)


def mi_complex_cqam(
    c: Constellation, snr: ChannelSnr, nodes: int = DEFAULT_NODES
) -> float:
    """I(X; Y) of a shell-structured complex constellation, shell-uniform priors.

    Exploits the p-fold rotational symmetry: one conditional term per
    shell, weighted by the shell prior.
    """
    if snr.dimension != "complex":
        raise ValueError("mi_complex_cqam needs a complex-dimension SNR")
    shell_pri = _shell_priors(c)
    p = shell_pri.shape[0]
    energy = c.mean_energy()
    if energy <= 0.0:
        raise ValueError("zero-energy constellation has no SNR interpretation")
    sigma = math.sqrt(energy / (2.0 * snr.gamma))
    reps = c.points[np.arange(p) * p]
    return mi_complex_points(
        c.points, c.priors, sigma, nodes,
        condition_on=reps, condition_weights=shell_pri,
    )


def mi_complex_naive(
    c: Constellation, snr: ChannelSnr, nodes: int = DEFAULT_NODES
) -> float:
    """Cross-check oracle: full conditional sum over every point."""
    if snr.dimension != "complex":
        raise ValueError("mi_complex_naive needs a complex-dimension SNR")
    energy = c.mean_energy()
    if energy <= 0.0:
        raise ValueError("zero-energy constellation has no SNR interpretation")
    sigma = math.sqrt(energy / (2.0 * snr.gamma))
    return mi_complex_points(c.points, c.priors, sigma, nodes)


def capacity_gamma(rate: float, dimension: Literal["real", "complex"]) -> float:
    """Smallest gamma at which Gaussian signaling carries `rate`.

    `rate` is expressed in bits per real dimension in both cases (a
    complex channel then carries 2 * rate bits per complex use):
    real, gamma = (2^(2 rate) - 1) / 2; complex, gamma = 2^(2 rate) - 1.
    """
    if rate < 0.0:
        raise ValueError("rate must be nonnegative")
    if dimension == "real":
        return (2.0 ** (2.0 * rate) - 1.0) / 2.0
    if dimension == "complex":
        return 2.0 ** (2.0 * rate) - 1.0
    raise ValueError("dimension must be 'real' or 'complex'")
