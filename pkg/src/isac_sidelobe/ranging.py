"""Two-target matched-filter ranging with random ISAC blocks.

Delays are integer range bins of size ``c / (2 B)``.  With a cyclic prefix
the echo is a circular shift of the block and the matched filter is a
periodic cross-correlation; without it the echo is a zero-padded linear
delay and the matched filter a linear cross-correlation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .acf import trial_rng
from .bases import UnitaryBasis
from .errors import InvalidArgument, InvalidInput, OutOfWindow

SPEED_OF_LIGHT = 299_792_458.0
Z95 = 1.6448536269514722  # one-sided 95% normal quantile


def range_bin_size(bandwidth: float) -> float:
    return SPEED_OF_LIGHT / (2.0 * bandwidth)


def range_to_bin(range_m: float, bandwidth: float, n: int | None = None, cp: bool = False) -> int:
    if range_m < 0:
        raise InvalidArgument("range must be non-negative")
    b = int(round(range_m / range_bin_size(bandwidth)))
    if cp and n is not None and b >= n:
        raise OutOfWindow(f"delay of {b} bins does not fit a CP block of {n} samples")
    return b


@dataclass
class RangingScenario:
    bandwidth: float
    n: int
    targets: list  # [(range_m, relative_power), ...]
    snr_grid: list  # dB
    basis: UnitaryBasis
    constellation: object
    cp: bool = True
    trials: int = 1000
    seed: int = 0
    min_separation: int = 3

    def __post_init__(self):
        if not self.targets:
            raise InvalidArgument("at least one target is required")
        for r, p in self.targets:
            if r < 0 or p <= 0:
                raise InvalidArgument(f"bad target ({r}, {p}): range >= 0 and power > 0 required")
        if self.basis.n != self.n:
            raise InvalidArgument(f"basis size {self.basis.n} != n {self.n}")
        self.bins  # validates the CP window

    @property
    def bin_size(self) -> float:
        return range_bin_size(self.bandwidth)

    @property
    def bins(self) -> list:
        return [range_to_bin(r, self.bandwidth, self.n, self.cp) for r, _ in self.targets]

    @property
    def ranges(self) -> np.ndarray:
        return np.array([r for r, _ in self.targets], dtype=float)

    @property
    def echo_length(self) -> int:
        return self.n if self.cp else self.n + max(self.bins)


def noiseless_echo(x: np.ndarray, scenario: RangingScenario) -> np.ndarray:
    """Sum of delayed, scaled copies of ``x`` (last axis), without noise."""
    x = np.asarray(x, dtype=complex)
    length = scenario.echo_length
    y = np.zeros(x.shape[:-1] + (length,), dtype=complex)
    for b, (_, p) in zip(scenario.bins, scenario.targets):
        if scenario.cp:
            y += np.sqrt(p) * np.roll(x, b, axis=-1)
        else:
            y[..., b : b + scenario.n] += np.sqrt(p) * x
    return y


def unit_noise(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def noise_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial), 1])


def synthesize_echo(x, scenario: RangingScenario, trial_seed: int, snr_db: float | None = None):
    """Echo of one block; ``snr_db=None`` returns the noiseless echo.

    Noise is ``CN(0, 10**(-snr_db/10))`` per sample, drawn from a stream
    keyed on ``(scenario.seed, trial_seed)`` so that every SNR point sees the
    same unit-variance noise realization.
    """
    y = noiseless_echo(x, scenario)
    if snr_db is None:
        return y
    z = unit_noise(noise_rng(scenario.seed, trial_seed), y.shape)
    return y + z * 10 ** (-snr_db / 20)


def matched_filter(y, x, mode: str) -> np.ndarray:
    """``|sum_i conj(x_i) y_{i+d}|^2`` at every non-negative lag ``d``.

    ``mode`` is ``"cp"`` (periodic lags ``0..n-1``) or ``"linear"``
    (lags ``0..len(y)-1`` with zero padding).
    """
    y = np.asarray(y, dtype=complex)
    x = np.asarray(x, dtype=complex)
    n, length = x.shape[-1], y.shape[-1]
    if mode == "cp":
        if length != n:
            raise InvalidInput(f"CP matched filter needs len(y) == len(x), got {length} vs {n}")
        c = np.fft.ifft(np.fft.fft(y, axis=-1) * np.fft.fft(x, axis=-1).conj(), axis=-1)
    elif mode == "linear":
        if length < n:
            raise InvalidInput(f"linear matched filter needs len(y) >= len(x), got {length} < {n}")
        size = length + n
        c = np.fft.ifft(np.fft.fft(y, size, axis=-1) * np.fft.fft(x, size, axis=-1).conj(), axis=-1)
        c = c[..., :length]
    else:
        raise InvalidInput(f"unknown matched-filter mode {mode!r}")
    return np.abs(c) ** 2


def pick_peaks(profiles, n_peaks: int, min_separation: int = 3, periodic: bool = False) -> np.ndarray:
    """Greedy peak picking with suppression, vectorized over leading axes.

    Returns bin indices of shape ``profiles.shape[:-1] + (n_peaks,)``; ``-1``
    marks a missing peak (nothing positive left to pick).
    """
    if n_peaks < 1:
        raise InvalidArgument("n_peaks must be >= 1")
    work = np.array(profiles, dtype=float, copy=True)
    length = work.shape[-1]
    lags = np.arange(length)
    out = np.full(work.shape[:-1] + (n_peaks,), -1, dtype=int)
    for i in range(n_peaks):
        idx = np.argmax(work, axis=-1)
        val = np.take_along_axis(work, idx[..., None], axis=-1)[..., 0]
        found = val > 0
        out[..., i] = np.where(found, idx, -1)
        dist = np.abs(lags - idx[..., None])
        if periodic:
            dist = np.minimum(dist, length - dist)
        work[dist <= min_separation] = -np.inf
    return out


def assign_errors(est_bins, true_ranges, bin_size: float, penalty: float) -> np.ndarray:
    """Per-target absolute range error under the best one-to-one matching.

    ``est_bins`` has shape ``(..., k)`` with ``-1`` for missing estimates,
    which cost ``penalty`` metres.  Returns shape ``(..., n_targets)``.
    """
    est_bins = np.asarray(est_bins)
    true_ranges = np.asarray(true_ranges, dtype=float)
    est = np.where(est_bins >= 0, est_bins * bin_size, np.nan)
    t = true_ranges.size
    best = None
    best_cost = None
    for perm in itertools.permutations(range(est.shape[-1]), t):
        err = np.abs(est[..., list(perm)] - true_ranges)
        err = np.where(np.isnan(err), penalty, err)
        cost = np.sum(err**2, axis=-1)
        if best is None:
            best, best_cost = err, cost
        else:
            better = cost < best_cost
            best = np.where(better[..., None], err, best)
            best_cost = np.where(better, cost, best_cost)
    return best


def estimate_ranges(profile, n_targets: int, min_separation_bins: int = 3, bandwidth: float = 800e6,
                    periodic: bool = False) -> list:
    """Range estimates in metres, strongest peak first (missing peaks omitted)."""
    bins = pick_peaks(np.asarray(profile)[None, :], n_targets, min_separation_bins, periodic)[0]
    size = range_bin_size(bandwidth)
    return [b * size for b in bins if b >= 0]


@dataclass
class RmseTable:
    snr_db: np.ndarray
    rmse: np.ndarray  # (snr, target)
    sq_errors: np.ndarray = field(repr=False)  # (snr, trials, target)
    trials: int = 0
    scheme: str = ""
    constellation: str = ""
    cp: bool = True

    def rows(self) -> list:
        out = []
        for i, snr in enumerate(self.snr_db):
            for t in range(self.rmse.shape[1]):
                out.append((float(snr), t, float(self.rmse[i, t]), self.trials))
        return out

    def mse_bounds(self, target: int, z: float = Z95):
        """One-sided (lower, upper) normal confidence bounds on the MSE per SNR."""
        e = self.sq_errors[:, :, target]
        mean = e.mean(axis=1)
        se = e.std(axis=1, ddof=1) / np.sqrt(e.shape[1])
        return np.maximum(mean - z * se, 0.0), mean + z * se


def rmse_sweep(scenario: RangingScenario) -> RmseTable:
    """Per-target RMSE over the SNR grid; deterministic for a fixed seed."""
    sc = scenario
    trials = range(sc.trials)
    s = np.stack([sc.constellation.sample(trial_rng(sc.seed, t), sc.n) for t in trials])
    x = sc.basis.modulate(s)
    clean = noiseless_echo(x, sc)
    noise = np.stack([unit_noise(noise_rng(sc.seed, t), clean.shape[-1]) for t in trials])
    mode = "cp" if sc.cp else "linear"
    penalty = sc.echo_length * sc.bin_size
    snrs = np.asarray(sc.snr_grid, dtype=float)
    sq = np.empty((snrs.size, sc.trials, len(sc.targets)))
    for i, snr in enumerate(snrs):
        y = clean + noise * 10 ** (-snr / 20)
        prof = matched_filter(y, x, mode)
        bins = pick_peaks(prof, len(sc.targets), sc.min_separation, periodic=sc.cp)
        sq[i] = assign_errors(bins, sc.ranges, sc.bin_size, penalty) ** 2
    return RmseTable(
        snr_db=snrs,
        rmse=np.sqrt(sq.mean(axis=1)),
        sq_errors=sq,
        trials=sc.trials,
        scheme=sc.basis.label,
        constellation=sc.constellation.label,
        cp=sc.cp,
    )


def dominance_points(best: RmseTable, other: RmseTable, target: int, factor: float = 10.0,
                     max_bins: float = 2.0, bin_size: float | None = None) -> np.ndarray:
    """SNR points where ``best`` is accurate and ``other`` is ``factor`` times worse.

    At each SNR the 95% upper bound of ``best``'s RMSE must be within
    ``max_bins`` range bins, and the 95% lower bound of ``other``'s RMSE must
    be at least ``factor`` times that upper bound.
    """
    _, hi = best.mse_bounds(target)
    lo, _ = other.mse_bounds(target)
    ok = np.sqrt(lo) >= factor * np.sqrt(hi)
    if bin_size is not None:
        ok &= np.sqrt(hi) <= max_bins * bin_size
    return best.snr_db[ok]
