"""Random symbol alphabets: construction, moments, classification, sampling.

All alphabets are normalized to unit average power and (except BPSK) are
rotationally symmetric, i.e. ``E[s] = E[s^2] = 0``.  Under those two
conditions the kurtosis is simply ``E|s|^4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateConstellation,
    InvalidGeometry,
    InvalidOrder,
    UnsupportedMomentStructure,
    UnsupportedOrder,
)

MOMENT_TOL = 1e-12
CLASSIFY_EPS = 1e-9

# Radii of the 4-ring, 16-points-per-ring super-Gaussian APSK alphabet.
SG64_APSK_RADII = (4.54e-5, 0.0067, 0.0815, 1.9983)


class GaussianClass(str, Enum):
    SUB = "sub_gaussian"
    GAUSSIAN_LIKE = "gaussian_like"
    SUPER = "super_gaussian"


@dataclass(frozen=True)
class Constellation:
    """Finite complex alphabet with a probability mass function.

    Parameters
    ----------
    points : array_like of complex
        Alphabet points, already power-normalized.
    probabilities : array_like of float
        Probability of each point.
    label : str
        Human-readable tag, echoed into reports.
    rotationally_symmetric : bool
        ``False`` marks alphabets whose pseudo-variance ``E[s^2]`` is
        nonzero (BPSK).  Such alphabets may be sampled but are refused by
        :func:`moment_matrix`.
    """

    points: np.ndarray
    probabilities: np.ndarray
    label: str = ""
    rotationally_symmetric: bool = True
    _kurtosis: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).ravel()
        prob = np.array(self.probabilities, dtype=float).ravel()
        if pts.size == 0 or pts.size != prob.size:
            raise InvalidGeometry("points and probabilities must be non-empty and equal length")
        if np.any(prob < 0) or abs(prob.sum() - 1.0) > MOMENT_TOL:
            raise DegenerateConstellation("probabilities must be non-negative and sum to 1")
        power = float(np.sum(prob * np.abs(pts) ** 2))
        if abs(power - 1.0) > MOMENT_TOL:
            raise DegenerateConstellation(f"average power is {power!r}, expected 1")
        if abs(np.sum(prob * pts)) > MOMENT_TOL:
            raise DegenerateConstellation("constellation mean is not zero")
        if self.rotationally_symmetric and abs(np.sum(prob * pts**2)) > MOMENT_TOL:
            raise DegenerateConstellation(
                "pseudo-variance E[s^2] is not zero; pass rotationally_symmetric=False"
            )
        pts.setflags(write=False)
        prob.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probabilities", prob)
        object.__setattr__(self, "_kurtosis", float(np.sum(prob * np.abs(pts) ** 4)))

    @property
    def kurtosis(self) -> float:
        return self._kurtosis

    @property
    def size(self) -> int:
        return self.points.size

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        idx = rng.choice(self.points.size, size=size, p=self.probabilities)
        return self.points[idx]


@dataclass(frozen=True)
class GaussianSymbols:
    """Standard circularly-symmetric complex Gaussian symbols, CN(0, 1).

    Not a finite alphabet, but it satisfies the same moment assumptions and
    serves as the kurtosis-2 reference.
    """

    label: str = "gaussian"
    rotationally_symmetric: bool = True

    @property
    def kurtosis(self) -> float:
        return 2.0

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


@dataclass(frozen=True)
class MomentMatrix:
    """``E[vec(s s^H) vec(s s^H)^H]`` for ``order`` i.i.d. symbols."""

    order: int
    entries: np.ndarray


def _normalized(points, probabilities):
    points = np.asarray(points, dtype=complex)
    probabilities = np.asarray(probabilities, dtype=float)
    power = np.sum(probabilities * np.abs(points) ** 2)
    return points / np.sqrt(power)


def _clean(points: np.ndarray) -> np.ndarray:
    # Snap trig round-off so that e.g. cos(pi/2) is exactly zero.
    re = np.where(np.abs(points.real) < 1e-15, 0.0, points.real)
    im = np.where(np.abs(points.imag) < 1e-15, 0.0, points.imag)
    return re + 1j * im


def make_psk(order: int) -> Constellation:
    """Equiprobable ``order``-PSK on the unit circle (BPSK is flagged)."""
    if order < 2:
        raise InvalidOrder(f"PSK order must be >= 2, got {order}")
    m = np.arange(order)
    points = _clean(np.exp(2j * np.pi * m / order))
    if order == 4:
        # Conventional QPSK placement (+-1 +- j)/sqrt(2).
        points = _clean(np.exp(1j * (np.pi / 4 + np.pi * m / 2)))
    probs = np.full(order, 1.0 / order)
    return Constellation(points, probs, label=f"psk:{order}", rotationally_symmetric=order != 2)


def make_qam(order: int) -> Constellation:
    """Square ``order``-QAM, scaled to unit average power."""
    side = int(round(np.sqrt(order))) if order > 0 else 0
    if order < 4 or side * side != order or side % 2:
        raise UnsupportedOrder(f"only square QAM with even side is supported, got {order}")
    axis = np.arange(-(side - 1), side, 2, dtype=float)
    grid = (axis[:, None] + 1j * axis[None, :]).ravel()
    points = grid / np.sqrt(2.0 * (order - 1) / 3.0)
    probs = np.full(order, 1.0 / order)
    return Constellation(points, probs, label=f"qam:{order}")


def make_apsk(radii, points_per_ring) -> Constellation:
    """Concentric rings of equally spaced points.

    Odd-indexed rings are rotated by half an angular step.  The alphabet is
    rescaled to unit power after construction.
    """
    radii = [float(r) for r in radii]
    counts = [int(c) for c in points_per_ring]
    if not radii or len(radii) != len(counts):
        raise InvalidGeometry("radii and points_per_ring must be non-empty and equal length")
    if any(r <= 0 for r in radii) or any(c < 1 for c in counts):
        raise InvalidGeometry("radii must be positive and rings non-empty")
    pts = []
    for i, (r, c) in enumerate(zip(radii, counts)):
        offset = 0.5 if i % 2 else 0.0
        pts.append(r * np.exp(2j * np.pi * (np.arange(c) + offset) / c))
    points = np.concatenate(pts)
    probs = np.full(points.size, 1.0 / points.size)
    label = "apsk:r=" + ",".join(f"{r:g}" for r in radii) + ";n=" + ",".join(map(str, counts))
    return Constellation(_clean(_normalized(points, probs)), probs, label=label)


def make_sg64_apsk() -> Constellation:
    """The 64-point super-Gaussian APSK alphabet (kurtosis ~3.9867)."""
    c = make_apsk(SG64_APSK_RADII, [16] * 4)
    return Constellation(c.points, c.probabilities, label="sg64apsk")


def gaussian() -> GaussianSymbols:
    return GaussianSymbols()


def apply_index_modulation(base: Constellation, p0: float) -> Constellation:
    """Add an origin point transmitted with probability ``p0``.

    The remaining mass is scaled by ``1 - p0`` and the result renormalized to
    unit power, which multiplies the kurtosis by ``1 / (1 - p0)``.
    """
    if not 0.0 <= p0 < 1.0:
        raise DegenerateConstellation(f"p0 must lie in [0, 1), got {p0}")
    if p0 == 0.0:
        return base
    points = np.append(base.points / np.sqrt(1.0 - p0), 0.0)
    probs = np.append(base.probabilities * (1.0 - p0), p0)
    return Constellation(
        points,
        probs,
        label=f"im:{base.label}:p0={p0:g}",
        rotationally_symmetric=base.rotationally_symmetric,
    )


def kurtosis(c) -> float:
    return float(c.kurtosis)


def classify(c) -> GaussianClass:
    mu4 = kurtosis(c)
    if mu4 < 2.0 - CLASSIFY_EPS:
        return GaussianClass.SUB
    if mu4 > 2.0 + CLASSIFY_EPS:
        return GaussianClass.SUPER
    return GaussianClass.GAUSSIAN_LIKE


def sample_symbols(c, count, seed=None) -> np.ndarray:
    """Draw ``count`` i.i.d. symbols.

    ``seed`` may be an int, ``None`` or an existing ``numpy`` Generator.
    ``count`` may be a shape tuple.
    """
    if np.ndim(count) == 0 and int(count) < 1:
        raise InvalidOrder("count must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return c.sample(rng, count)


def moment_matrix(c, n: int) -> MomentMatrix:
    """Fourth-order moment matrix of ``n`` i.i.d. symbols.

    Row/column index ``m*n + p`` (0-based) corresponds to the entry
    ``s_m^* s_p`` of ``vec(s s^H)``.  The pattern is ``mu4`` where all four
    indices coincide, 1 where the indices pair up as ``|s_a|^2 |s_b|^2``, and
    zero elsewhere.
    """
    if n < 2:
        raise InvalidOrder("moment matrix needs n >= 2")
    if not c.rotationally_symmetric:
        raise UnsupportedMomentStructure(
            f"{c.label}: pseudo-variance is nonzero, the sparse moment pattern does not apply"
        )
    idx = np.arange(n * n)
    m, p = np.divmod(idx, n)
    # entry (a, b) = E[s_m^* s_p s_k s_q^*] with a=(m,p), b=(k,q)
    ma, pa = m[:, None], p[:, None]
    kb, qb = m[None, :], p[None, :]
    diag_a = ma == pa
    diag_b = kb == qb
    all_equal = diag_a & diag_b & (ma == kb)
    pair_self = diag_a & diag_b & (ma != kb)  # |s_m|^2 |s_k|^2
    pair_cross = (ma == kb) & (pa == qb) & (ma != pa)  # |s_m|^2 |s_p|^2
    s = np.where(all_equal, kurtosis(c), 0.0)
    s[pair_self | pair_cross] = 1.0
    return MomentMatrix(order=n, entries=s)
