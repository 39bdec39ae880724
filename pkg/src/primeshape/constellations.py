"""ASK and circular QAM (CQAM) constellation construction.

A p^2-point CQAM constellation consists of p shells of p points each.
Shell 1 is the unit circle sampled at the p-th roots of unity.  Shell i
is placed at the smallest radius rho_i >= rho_{i-1} admitting a phase
offset phi_i in [-pi/p, pi/p] such that every new point keeps Euclidean
distance at least d = 2 sin(pi/p) from all previously placed points
(d is the intra-shell distance on the unit circle, so the first shell
meets it with equality).  The result is a greedy, deterministic packing
whose minimum distance is exactly d by construction.

Instead of scanning radii in small increments, the builder computes for
every candidate phase the exact break-even radius against each placed
point: for a placed point r*exp(j*theta) and a candidate angle psi, the
squared distance rho^2 - 2*rho*r*cos(psi - theta) + r^2 is nondecreasing
in rho for rho >= r, so the constraint dist >= d holds for all
rho >= a + sqrt(a^2 - r^2 + d^2) with a = r*cos(psi - theta) (and for
every rho when a^2 - r^2 + d^2 < 0).  Maximizing over placed points and
clamping at rho_{i-1} gives the minimal admissible radius per phase in
closed form; the shell takes the phase minimizing it.

An optional radial stretch remaps the shell radii to
rho_i = 1 + (rho_max - 1) * ((i-1)/(p-1))^beta while keeping the phase
offsets of the unstretched packing; it trades minimum distance for a
better energy profile under shaped (nonuniform) shell priors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .field import FpSymbol, Prime, ask_point

#: Hard bound on the outermost shell radius; the greedy packing stays
#: well below it, so hitting the bound indicates a numerical defect.
RADIUS_BOUND = 1.0 + 2.0 * math.pi

#: Absolute tolerance used to detect centroid / prior defects.
GEOMETRY_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Stretch:
    """Radial stretch law: rho_i = 1 + (rho_max - 1) * ((i-1)/(p-1))^beta."""

    rho_max: float
    beta: float

    def __post_init__(self) -> None:
        if self.rho_max <= 1.0:
            raise ValueError("stretch rho_max must exceed 1")
        if self.beta <= 0.0:
            raise ValueError("stretch exponent beta must be positive")


@dataclass(frozen=True, slots=True)
class CqamParams:
    """Construction parameters for build_cqam / build_cqam_stretched.

    delta_rho bounds the radius-search discretization error.  The
    current builder computes exact break-even radii (the delta_rho -> 0
    limit of an incremental radius scan), so results do not depend on
    the value; it is validated and kept for interface stability.
    phase_steps is the size of the uniform phase grid on [-pi/p, pi/p].
    """

    delta_rho: float = 1e-4
    phase_steps: int = 4096
    stretch: Stretch | None = None

    def __post_init__(self) -> None:
        if self.delta_rho <= 0.0:
            raise ValueError("delta_rho must be positive")
        if self.phase_steps < 2:
            raise ValueError("phase grid needs at least 2 steps")


@dataclass(frozen=True, eq=False, slots=True)
class ShellStructure:
    """Shell radii and per-shell phase offsets of a circular constellation."""

    radii: np.ndarray = dataclass_field(repr=False)
    phases: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        radii = np.array(self.radii, dtype=float)
        phases = np.array(self.phases, dtype=float)
        if radii.ndim != 1 or radii.shape != phases.shape:
            raise ValueError("radii and phases must be 1-D with equal length")
        if np.any(np.diff(radii) < 0.0):
            raise ValueError("shell radii must be nondecreasing")
        radii.flags.writeable = False
        phases.flags.writeable = False
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "phases", phases)

    @property
    def num_shells(self) -> int:
        return self.radii.shape[0]


@dataclass(frozen=True, eq=False, slots=True)
class Constellation:
    """A finite point set in the complex plane with point priors.

    The centroid must vanish (zero-mean signaling); point index i*p + l
    addresses phase l of shell i when shell structure is present.
    """

    points: np.ndarray = dataclass_field(repr=False)
    priors: np.ndarray = dataclass_field(repr=False)
    shells: ShellStructure | None = None

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=complex)
        priors = np.array(self.priors, dtype=float)
        if points.ndim != 1 or points.shape != priors.shape:
            raise ValueError("points and priors must be 1-D with equal length")
        if points.shape[0] < 1:
            raise ValueError("constellation must be nonempty")
        if np.any(priors < 0.0) or abs(priors.sum() - 1.0) > 1e-12:
            raise ValueError("priors must be a normalized PMF")
        if abs(points.sum()) > GEOMETRY_TOL * max(1.0, np.abs(points).max()):
            raise ValueError("constellation centroid must be zero")
        if self.shells is not None:
            p = self.shells.num_shells
            if points.shape[0] != p * p:
                raise ValueError(
                    f"shell structure implies {p * p} points, got {points.shape[0]}"
                )
        points.flags.writeable = False
        priors.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "priors", priors)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def with_priors(self, priors: np.ndarray) -> "Constellation":
        """Same geometry under different point priors."""
        return Constellation(self.points, priors, self.shells)

    def mean_energy(self) -> float:
        """Prior-weighted mean symbol energy sum_i priors[i] |x_i|^2."""
        return float(np.dot(self.priors, np.abs(self.points) ** 2))


def build_ask(field: Prime) -> Constellation:
    """Zero-mean p-ASK alphabet {-(p-1)/2, ..., (p-1)/2} in symbol order."""
    pts = np.array(
        [ask_point(FpSymbol(s, field)) for s in range(field.p)], dtype=complex
    )
    return Constellation(pts, np.full(field.p, 1.0 / field.p))


def _shell_points(radius: float, phase: float, p: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(p) / p + phase
    return radius * np.exp(1j * angles)


def _pack_shells(field: Prime, params: CqamParams) -> tuple[np.ndarray, np.ndarray]:
    """Greedy shell placement; returns (radii, phases)."""
    p = field.p
    d2 = (2.0 * math.sin(math.pi / p)) ** 2
    radii = np.empty(p)
    phases = np.empty(p)
    radii[0], phases[0] = 1.0, 0.0
    placed = _shell_points(1.0, 0.0, p)

    # sweep phases from +pi/p down so argmin ties resolve to the largest
    phi_grid = np.linspace(math.pi / p, -math.pi / p, params.phase_steps)
    for i in range(1, p):
        r = np.abs(placed)
        theta = np.angle(placed)
        # by p-fold symmetry it suffices to place the l = 0 point of the
        # new shell against every previously placed point
        a = r[None, :] * np.cos(phi_grid[:, None] - theta[None, :])
        disc = a * a - r[None, :] ** 2 + d2
        need = np.where(disc > 0.0, a + np.sqrt(np.maximum(disc, 0.0)), 0.0)
        rho_by_phi = np.maximum(need.max(axis=1), radii[i - 1])
        best = rho_by_phi.min()
        j = int(np.argmax(rho_by_phi <= best + 1e-12))
        radii[i], phases[i] = rho_by_phi[j], phi_grid[j]
        if radii[i] >= RADIUS_BOUND:
            raise RuntimeError(
                f"shell {i + 1} radius {radii[i]:.6f} exceeded bound {RADIUS_BOUND:.6f}"
            )
        placed = np.concatenate([placed, _shell_points(radii[i], phases[i], p)])
    return radii, phases


def _assemble(radii: np.ndarray, phases: np.ndarray, p: int) -> Constellation:
    pts = np.concatenate(
        [_shell_points(radii[i], phases[i], p) for i in range(p)]
    )
    shells = ShellStructure(radii, phases)
    return Constellation(pts, np.full(p * p, 1.0 / (p * p)), shells)


def build_cqam(field: Prime, params: CqamParams | None = None) -> Constellation:
    """Construct the p^2-point CQAM constellation with uniform priors."""
    params = params or CqamParams()
    if params.stretch is not None:
        raise ValueError("build_cqam does not apply a stretch; use build_cqam_stretched")
    if field.p == 2:
        raise ValueError("CQAM construction requires an odd prime")
    radii, phases = _pack_shells(field, params)
    return _assemble(radii, phases, field.p)


def build_cqam_stretched(field: Prime, params: CqamParams) -> Constellation:
    """CQAM with stretched shell radii and the unstretched phase offsets."""
    if params.stretch is None:
        raise ValueError("build_cqam_stretched requires stretch parameters")
    if field.p == 2:
        raise ValueError("CQAM construction requires an odd prime")
    _, phases = _pack_shells(field, params)
    p = field.p
    frac = np.arange(p) / (p - 1)
    radii = 1.0 + (params.stretch.rho_max - 1.0) * frac**params.stretch.beta
    return _assemble(radii, phases, p)


def min_distance(c: Constellation) -> float:
    """Minimum Euclidean distance over distinct point pairs."""
    if c.size < 2:
        raise ValueError("minimum distance needs at least 2 points")
    diff = np.abs(c.points[:, None] - c.points[None, :])
    dmin = float(diff[np.triu_indices(c.size, k=1)].min())
    if dmin <= 1e-15 * max(1.0, float(np.abs(c.points).max())):
        raise ValueError("constellation contains duplicate points")
    return dmin


def figure_of_merit(c: Constellation) -> float:
    """Packing merit log2(M) * d_min^2 / E, with E the unit-prior mean energy.

    Uses the uniform-prior energy regardless of stored priors, so the
    value reflects geometry alone.  Scale-invariant.
    """
    dmin = min_distance(c)
    energy = float(np.mean(np.abs(c.points) ** 2))
    return math.log2(c.size) * dmin**2 / energy


def point_table(c: Constellation) -> list[tuple[int, int | None, float, float, float]]:
    """Rows (index, shell, re, im, prior) for CSV export."""
    rows = []
    p = c.shells.num_shells if c.shells is not None else None
    for i, (x, pr) in enumerate(zip(c.points, c.priors)):
        shell = i // p if p is not None else None
        rows.append((i, shell, float(x.real), float(x.imag), float(pr)))
    return rows
