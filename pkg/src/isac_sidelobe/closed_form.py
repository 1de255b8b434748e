"""Closed-form expected squared ACF and EISL of randomly modulated bases.

For i.i.d. unit-power, rotationally symmetric symbols with kurtosis ``mu4``
and any quadratic form ``s^H A s``::

    E|s^H A s|^2 = |tr A|^2 + ||A||_F^2 + (mu4 - 2) * sum_m |A_mm|^2

Specializing ``A = U^H J_k U`` gives the per-lag expressions below; the
fourth-moment term is the only place the basis matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acf import AcfProfile, aperiodic_acf
from .bases import UnitaryBasis, dft_matrix
from .errors import InvalidArgument, InvalidLag


def l4_norm_4(m) -> float:
    """Entrywise ``sum |m_ij|^4``."""
    return float(np.sum(np.abs(np.asarray(m)) ** 4))


def spectrum_l4(basis: UnitaryBasis) -> float:
    """``||F U||_4^4``, via an FFT down the columns."""
    return l4_norm_4(np.fft.fft(basis.u, axis=0, norm="ortho"))


def padded_spectrum_l4(basis: UnitaryBasis) -> float:
    """``||F~_2n U||_4^4``: columns zero-padded to ``2n`` before the unitary-scaled FFT."""
    n = basis.n
    return l4_norm_4(np.fft.fft(basis.u, n=2 * n, axis=0) / np.sqrt(2 * n))


def _check_mu4(mu4: float):
    if mu4 < 1.0 - 1e-12:
        raise InvalidArgument(f"kurtosis must be >= 1, got {mu4}")


def b_matrix(basis: UnitaryBasis) -> np.ndarray:
    """All ``b_k`` at once: row ``k`` is the DFT (over columns) of ``|V|^2``.

    Entry ``[k, p] = sum_n |v_pn|^2 exp(-2j*pi*k*n/N)``.
    """
    return np.fft.fft(np.abs(basis.v) ** 2, axis=1).T


def b_vector(basis: UnitaryBasis, k: int) -> np.ndarray:
    if not 0 <= k < basis.n:
        raise InvalidLag(f"lag must lie in [0, {basis.n - 1}], got {k}")
    return b_matrix(basis)[k]


def b_norms_sq(basis: UnitaryBasis) -> np.ndarray:
    """``||b_k||^2`` for ``k = 0..n-1``."""
    return np.sum(np.abs(b_matrix(basis)) ** 2, axis=1)


def column_aacf(basis: UnitaryBasis) -> np.ndarray:
    """``u_m^H J_k u_m`` for every column ``m`` (axis 1) and lag ``k`` (axis 0)."""
    return aperiodic_acf(basis.u.T).T


@dataclass
class ClosedFormReport:
    per_lag: np.ndarray
    eisl: float
    mainlobe: float
    l4_objective: float
    mode: str

    def profile(self, **meta) -> AcfProfile:
        return AcfProfile(
            n=self.per_lag.size,
            mode=self.mode,
            mean_sq=self.per_lag,
            stderr=np.zeros_like(self.per_lag),
            source="closed_form",
            meta=meta,
        )


def mainlobe(n: int, mu4: float) -> float:
    """Expected squared mainlobe, identical for both ACF types."""
    return n * n + (mu4 - 1.0) * n


def expected_pacf(basis: UnitaryBasis, mu4: float) -> ClosedFormReport:
    """``E|r~_k|^2 = n^2 [k=0] + n + (mu4 - 2) ||b_k||^2``."""
    _check_mu4(mu4)
    n = basis.n
    per_lag = n + (mu4 - 2.0) * b_norms_sq(basis)
    per_lag[0] += n * n
    l4 = spectrum_l4(basis)
    return ClosedFormReport(
        per_lag=per_lag,
        eisl=n * (n - 1) + (mu4 - 2.0) * n * (l4 - 1.0),
        mainlobe=mainlobe(n, mu4),
        l4_objective=l4,
        mode="periodic",
    )


def eisl_pacf(basis: UnitaryBasis, mu4: float) -> float:
    """``n(n-1) + (mu4 - 2) n (||F U||_4^4 - 1)``."""
    _check_mu4(mu4)
    n = basis.n
    return n * (n - 1) + (mu4 - 2.0) * n * (spectrum_l4(basis) - 1.0)


def expected_aacf(basis: UnitaryBasis, mu4: float) -> ClosedFormReport:
    """``E|r_k|^2 = n^2 [k=0] + (n - k) + (mu4 - 2) sum_m |u_m^H J_k u_m|^2``."""
    _check_mu4(mu4)
    n = basis.n
    k = np.arange(n)
    col = np.sum(np.abs(column_aacf(basis)) ** 2, axis=1)
    per_lag = (n - k) + (mu4 - 2.0) * col
    per_lag[0] += n * n
    l4 = padded_spectrum_l4(basis)
    return ClosedFormReport(
        per_lag=per_lag.astype(float),
        eisl=n * (n - 1) / 2 + (mu4 - 2.0) * n * (l4 - 0.5),
        mainlobe=mainlobe(n, mu4),
        l4_objective=l4,
        mode="aperiodic",
    )


def eisl_aacf(basis: UnitaryBasis, mu4: float) -> float:
    """``n(n-1)/2 + (mu4 - 2) n (||F~_2n U||_4^4 - 1/2)``."""
    _check_mu4(mu4)
    n = basis.n
    return n * (n - 1) / 2 + (mu4 - 2.0) * n * (padded_spectrum_l4(basis) - 0.5)


def expected_doppler(basis: UnitaryBasis, mu4: float) -> ClosedFormReport:
    """Zero-delay Doppler cut: the periodic formula applied to the basis ``F U``."""
    spectral = UnitaryBasis(dft_matrix(basis.n) @ basis.u, basis.scheme, basis.params)
    rep = expected_pacf(spectral, mu4)
    rep.mode = "doppler_periodic"
    return rep


def expected_profile(basis: UnitaryBasis, mu4: float, mode: str) -> ClosedFormReport:
    if mode == "periodic":
        return expected_pacf(basis, mu4)
    if mode == "aperiodic":
        return expected_aacf(basis, mu4)
    if mode == "doppler_periodic":
        return expected_doppler(basis, mu4)
    raise InvalidArgument(f"unknown mode {mode!r}")


# Closed-form sidelobes are differences of O(n) terms; below this fraction of
# the mainlobe they are round-off and the sidelobe counts as zero.
CLOSED_FORM_ZERO_REL = 1e-12


def pslr_closed_form(basis: UnitaryBasis, mu4: float, mode: str = "periodic") -> float:
    """PSLR in dB of the closed-form profile; ``inf`` when sidelobes vanish."""
    return report_pslr(expected_profile(basis, mu4, mode))


def report_pslr(rep: ClosedFormReport) -> float:
    peak_side = float(np.max(rep.per_lag[1:]))
    if peak_side <= CLOSED_FORM_ZERO_REL * rep.mainlobe:
        return float("inf")
    return float(10 * np.log10(rep.mainlobe / peak_side))
