"""Numerical checks of the OFDM / CP-SC optimality results.

The stationarity of the OFDM point for the aperiodic EISL is checked with
finite differences along unitary geodesics ``t -> exp(j t H) V0`` rather than
with symbolic gradients.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import bases as B
from .acf import monte_carlo_profile
from .bases import UnitaryBasis, dft_matrix, partial_dft_matrix, unitarity_residual
from .closed_form import eisl_aacf, l4_norm_4
from .constellations import GaussianClass, classify
from .errors import InvalidArgument, InvalidDirection

FIRST_REL_TOL = 1e-6
SECOND_REL_TOL = 1e-8


def is_complex_permutation(m, tol: float = 1e-8) -> bool:
    """True iff every row and column has one unit-modulus entry and zeros elsewhere."""
    a = np.abs(np.asarray(m))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    big = np.abs(a - 1.0) <= tol
    small = a <= tol
    if not np.all(big | small):
        return False
    return bool(np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1))


def verify_ff_reversal(n: int) -> float:
    """Max-abs distance between ``F^H F^H`` and the index-reversal permutation."""
    fh = dft_matrix(n).conj().T
    return float(np.max(np.abs(fh @ fh - B.reversal_permutation(n))))


def aacf_objective(v) -> float:
    """``f(V) = ||F~_2n F^H V^H||_4^4``; the OFDM basis corresponds to ``V = I``."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or unitarity_residual(v) > 1e-8:
        raise InvalidArgument("aacf_objective needs a square unitary matrix")
    n = v.shape[0]
    return l4_norm_4(partial_dft_matrix(n) @ dft_matrix(n).conj().T @ v.conj().T)


def expjh(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(j t H)`` for Hermitian ``H`` via its eigendecomposition."""
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * t * w)) @ q.conj().T


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-Frobenius-norm Hermitian matrix with Gaussian entries."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (a + a.conj().T) / 2
    return h / np.linalg.norm(h)


@dataclass
class GeodesicCheck:
    n: int
    direction: np.ndarray
    first_derivative: float
    second_derivative: float
    step: float
    f0: float


def geodesic_derivatives(n: int, h, step: float = 1e-2, base=None) -> GeodesicCheck:
    """First and second derivative of ``t -> f(exp(j t H) V0)`` at ``t = 0``.

    Central differences at ``step`` and ``step/2`` combined by Richardson
    extrapolation.  ``V0`` defaults to the identity (the OFDM point).
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (n, n) or np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise InvalidDirection("direction must be an n x n Hermitian matrix")
    if not 1e-4 <= step <= 1e-2:
        raise InvalidArgument("step must lie in [1e-4, 1e-2]")
    norm = np.linalg.norm(h)
    if norm == 0:
        raise InvalidDirection("direction must be nonzero")
    h = h / norm
    v0 = np.eye(n) if base is None else np.asarray(base, dtype=complex)
    f0 = aacf_objective(v0)

    def central(d):
        fp = aacf_objective(expjh(h, d) @ v0)
        fm = aacf_objective(expjh(h, -d) @ v0)
        return (fp - fm) / (2 * d), (fp - 2 * f0 + fm) / d**2

    d1_big, d2_big = central(step)
    d1_small, d2_small = central(step / 2)
    first = (4 * d1_small - d1_big) / 3
    second = (4 * d2_small - d2_big) / 3
    return GeodesicCheck(n, h, float(first), float(second), step, f0)


def central_first_derivative(n: int, h, step: float, base=None) -> float:
    """Plain (non-extrapolated) central difference, for step-scaling checks."""
    h = np.asarray(h, dtype=complex)
    v0 = np.eye(n) if base is None else base
    fp = aacf_objective(expjh(h, step) @ v0)
    fm = aacf_objective(expjh(h, -step) @ v0)
    return (fp - fm) / (2 * step)


@dataclass
class LocalOptimalitySummary:
    n: int
    directions: int
    f0: float
    max_abs_first: float
    max_second: float
    first_failures: int
    second_failures: int
    passed: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def verify_local_optimality(
    n: int, directions: int = 100, seed: int = 0, step: float = 1e-2, base=None, threads: int = 1
) -> LocalOptimalitySummary:
    """Check zero slope and non-positive curvature along random geodesics."""
    if directions < 1:
        raise InvalidArgument("directions must be >= 1")
    ss = np.random.SeedSequence(seed)
    rngs = [np.random.default_rng(s) for s in ss.spawn(directions)]

    def one(rng):
        return geodesic_derivatives(n, random_hermitian(n, rng), step, base)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            checks = list(pool.map(one, rngs))
    else:
        checks = [one(r) for r in rngs]
    f0 = checks[0].f0
    firsts = np.array([abs(c.first_derivative) for c in checks])
    seconds = np.array([c.second_derivative for c in checks])
    first_fail = int(np.sum(firsts > FIRST_REL_TOL * f0))
    second_fail = int(np.sum(seconds > SECOND_REL_TOL * f0))
    return LocalOptimalitySummary(
        n=n,
        directions=directions,
        f0=f0,
        max_abs_first=float(firsts.max()),
        max_second=float(seconds.max()),
        first_failures=first_fail,
        second_failures=second_fail,
        passed=first_fail == 0 and second_fail == 0,
    )


def named_bases(n: int, otfs=(16, 8)) -> dict:
    """The fixed competitor set used in comparisons (OTFS only when it fits ``n``)."""
    out = {"sc": B.basis_sc(n), "ofdm": B.basis_ofdm(n), "afdm": B.basis_afdm(n)}
    if n & (n - 1) == 0:
        out["cdma"] = B.basis_cdma(n)
    m, l = otfs
    if m * l == n:
        out["otfs"] = B.basis_otfs(m, l)
    return out


def haar_bases(n: int, count: int = 50, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [UnitaryBasis(B.haar_unitary(n, rng), "haar", {"index": i}) for i in range(count)]


@dataclass
class NeighborhoodScan:
    n: int
    scale: float
    samples: int
    ofdm_eisl: float
    min_sampled_eisl: float
    named_eisl: dict
    ofdm_attains_min: bool


def eisl_neighborhood_scan(
    n: int, perturbation_scale: float = 0.05, samples: int = 200, seed: int = 0, tol: float = 1e-9
) -> NeighborhoodScan:
    """Aperiodic EISL (``mu4 = 1``) of random unitaries near OFDM and of the named schemes.

    ``tol`` is relative to the OFDM value and absorbs round-off in flat
    directions (per-subcarrier phase rotations leave the EISL unchanged).
    """
    if not 0 < perturbation_scale <= 0.5:
        raise InvalidArgument("perturbation_scale must lie in (0, 0.5]")
    rng = np.random.default_rng(seed)
    fh = dft_matrix(n).conj().T
    ofdm = eisl_aacf(B.basis_ofdm(n), 1.0)
    sampled = [
        eisl_aacf(UnitaryBasis(expjh(random_hermitian(n, rng), perturbation_scale) @ fh, "near-ofdm"), 1.0)
        for _ in range(samples)
    ]
    named = {k: eisl_aacf(b, 1.0) for k, b in named_bases(n).items()}
    lowest = min(sampled + list(named.values()))
    return NeighborhoodScan(
        n=n,
        scale=perturbation_scale,
        samples=samples,
        ofdm_eisl=ofdm,
        min_sampled_eisl=float(min(sampled)),
        named_eisl=named,
        ofdm_attains_min=bool(ofdm <= lowest + tol * ofdm),
    )


@dataclass
class DopplerDuality:
    n: int
    trials: int
    sc_doppler: object
    ofdm_pacf: object
    other_doppler: dict
    max_z: float
    dual_ok: bool
    sc_ordering_ok: bool


def doppler_duality_check(n: int, c, trials: int = 1000, seed: int = 0, z: float = 3.0) -> DopplerDuality:
    """Compare the CP-SC Doppler cut with the CP-OFDM range profile.

    Both are estimated by Monte Carlo with independent seeds; the per-lag
    difference is judged against the combined standard error.  The SC
    Doppler profile must also sit below every other scheme's for
    sub-Gaussian symbols and above it for super-Gaussian ones (within the
    same margin); Gaussian-like symbols impose no ordering.
    """
    if trials < 100:
        raise InvalidArgument("duality check needs at least 100 trials")
    sc = monte_carlo_profile(B.basis_sc(n), c, "doppler_periodic", trials, seed)
    ofdm = monte_carlo_profile(B.basis_ofdm(n), c, "periodic", trials, seed + 1)
    floor = 1e-9 * sc.mainlobe
    se = np.sqrt(sc.stderr**2 + ofdm.stderr**2)
    zscores = np.abs(sc.mean_sq - ofdm.mean_sq) / (se + floor)
    others = {
        name: monte_carlo_profile(b, c, "doppler_periodic", trials, seed + 2 + i)
        for i, (name, b) in enumerate(named_bases(n).items())
        if name != "sc"
    }
    sign = {GaussianClass.SUB: 1.0, GaussianClass.SUPER: -1.0}.get(classify(c), 0.0)
    ordering_ok = all(
        np.all(sign * (sc.sidelobes - p.sidelobes) <= z * np.sqrt(sc.stderr[1:] ** 2 + p.stderr[1:] ** 2) + floor)
        for p in others.values()
    )
    return DopplerDuality(
        n=n,
        trials=trials,
        sc_doppler=sc,
        ofdm_pacf=ofdm,
        other_doppler=others,
        max_z=float(zscores.max()),
        dual_ok=bool(np.all(zscores <= z)),
        sc_ordering_ok=bool(ordering_ok),
    )
