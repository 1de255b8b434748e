"""Auto-correlation of random ISAC blocks and Monte Carlo sidelobe profiles.

Lag convention: ``r[k] = sum_i conj(x[i]) * x[i + k]``.  The aperiodic
version drops indices past the block end; the periodic version wraps them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bases import UnitaryBasis
from .errors import InvalidInput

MODES = ("periodic", "aperiodic", "doppler_periodic")

# Sidelobes below this fraction of the mainlobe count as exactly zero.
ZERO_SIDELOBE_REL = 1e-20


def _check_len(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] < 2:
        raise InvalidInput("ACF needs at least two samples")
    return x


def aperiodic_acf(x) -> np.ndarray:
    """Aperiodic ACF at lags ``0..n-1`` along the last axis."""
    x = _check_len(x)
    n = x.shape[-1]
    spec = np.fft.fft(x, n=2 * n, axis=-1)
    return np.fft.ifft(np.abs(spec) ** 2, axis=-1)[..., :n]


def periodic_acf(x) -> np.ndarray:
    """Periodic ACF at lags ``0..n-1`` along the last axis."""
    x = _check_len(x)
    spec = np.fft.fft(x, axis=-1)
    return np.fft.ifft(np.abs(spec) ** 2, axis=-1)


def doppler_slice(x) -> np.ndarray:
    """Zero-delay Doppler cut: the periodic ACF of the unitary spectrum ``F x``."""
    x = _check_len(x)
    return periodic_acf(np.fft.fft(x, axis=-1, norm="ortho"))


_ACF = {
    "periodic": periodic_acf,
    "aperiodic": aperiodic_acf,
    "doppler_periodic": doppler_slice,
}


@dataclass
class AcfProfile:
    """Per-lag expected squared ACF, ``E|r_k|^2`` for ``k = 0..n-1``.

    ``stderr`` is the Monte Carlo standard error of each entry (zeros for
    closed-form profiles).
    """

    n: int
    mode: str
    mean_sq: np.ndarray
    stderr: np.ndarray
    trials: int = 0
    source: str = "empirical"
    meta: dict = field(default_factory=dict)

    @property
    def mainlobe(self) -> float:
        return float(self.mean_sq[0])

    @property
    def sidelobes(self) -> np.ndarray:
        return self.mean_sq[1:]

    def db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10 * np.log10(self.mean_sq)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial; independent of scheduling and chunking."""
    return np.random.default_rng([int(seed), int(trial)])


def draw_blocks(c, n: int, trials: range, seed: int) -> np.ndarray:
    return np.stack([c.sample(trial_rng(seed, t), n) for t in trials])


def _chunks(trials: int, threads: int):
    size = max(1, -(-trials // max(1, threads)))
    return [range(i, min(i + size, trials)) for i in range(0, trials, size)]


def squared_acf_samples(basis: UnitaryBasis, c, mode: str, trials: int, seed: int, threads: int = 1):
    """``|acf|^2`` per trial (rows in trial order) for random blocks ``U s``."""
    if mode not in _ACF:
        raise InvalidInput(f"unknown mode {mode!r}; expected one of {MODES}")
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    acf = _ACF[mode]

    def work(rng_range):
        s = draw_blocks(c, basis.n, rng_range, seed)
        return np.abs(acf(basis.modulate(s))) ** 2

    chunks = _chunks(trials, threads)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]
    return np.concatenate(parts, axis=0)


def monte_carlo_profile(
    basis: UnitaryBasis, c, mode: str, trials: int, seed: int = 0, threads: int = 1
) -> AcfProfile:
    """Average ``|acf|^2`` over ``trials`` independent symbol blocks."""
    sq = squared_acf_samples(basis, c, mode, trials, seed, threads)
    stderr = sq.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros(basis.n)
    return AcfProfile(
        n=basis.n,
        mode=mode,
        mean_sq=sq.mean(axis=0),
        stderr=stderr,
        trials=trials,
        source="empirical",
        meta={"scheme": basis.label, "constellation": c.label, "seed": seed},
    )


def eisl_empirical(p: AcfProfile) -> float:
    """Integrated sidelobe level over the one-sided lags ``1..n-1``."""
    return float(np.sum(p.mean_sq[1:]))


def pslr(p: AcfProfile) -> float:
    """Peak-to-sidelobe ratio in dB; ``inf`` when every sidelobe vanishes."""
    peak_side = float(np.max(p.mean_sq[1:]))
    if peak_side <= ZERO_SIDELOBE_REL * p.mainlobe:
        return float("inf")
    return float(10 * np.log10(p.mainlobe / peak_side))
