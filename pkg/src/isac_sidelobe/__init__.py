"""Ranging sidelobes of random communication waveforms.

Closed-form and Monte Carlo auto-correlation statistics for symbol blocks
modulated over an orthonormal basis (SC, OFDM, CDMA, OTFS, AFDM, ...), plus
numerical checks of when OFDM or single-carrier minimizes the sidelobes.
"""

__version__ = "0.1.0"

from .acf import AcfProfile, aperiodic_acf, doppler_slice, eisl_empirical, monte_carlo_profile, periodic_acf, pslr
from .bases import (
    UnitaryBasis,
    basis_afdm,
    basis_cdma,
    basis_generalized_ofdm,
    basis_ofdm,
    basis_ofdm_multi,
    basis_otfs,
    basis_sc,
    dft_matrix,
    shift_matrix,
    verify_lemma1,
    verify_shift_diagonalization,
)
from .closed_form import b_vector, eisl_aacf, eisl_pacf, expected_aacf, expected_pacf, l4_norm_4
from .constellations import (
    Constellation,
    apply_index_modulation,
    classify,
    gaussian,
    kurtosis,
    make_apsk,
    make_psk,
    make_qam,
    make_sg64_apsk,
    moment_matrix,
    sample_symbols,
)
