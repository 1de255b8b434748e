"""Orthonormal signaling bases and shift matrices.

DFT convention: ``F[p, q] = exp(-2j*pi*p*q/n) / sqrt(n)`` (0-based), so
``F @ F.conj().T == I`` and ``F`` equals ``numpy.fft.fft(..., norm="ortho")``.
A basis ``U`` maps a symbol block ``s`` to the time-domain signal ``U @ s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import hadamard

from .errors import InvalidLag, InvalidPhase, UnsupportedSize

UNITARY_TOL = 1e-10


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix of size ``n``."""
    return np.fft.fft(np.eye(n), axis=0, norm="ortho")


def partial_dft_matrix(n: int) -> np.ndarray:
    """First ``n`` columns of the unitary size-``2n`` DFT matrix (``2n x n``)."""
    return np.fft.fft(np.eye(n), n=2 * n, axis=0) / np.sqrt(2 * n)


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


@dataclass(frozen=True)
class UnitaryBasis:
    """An ``n x n`` unitary signaling matrix with its scheme label."""

    u: np.ndarray
    scheme: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise UnsupportedSize(f"basis must be square, got shape {u.shape}")
        res = unitarity_residual(u)
        if res > UNITARY_TOL:
            raise UnsupportedSize(f"basis is not unitary (residual {res:.3g})")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @cached_property
    def v(self) -> np.ndarray:
        """``V = U^H F^H = (F U)^H``, so that the spectrum ``F x`` equals ``V^H s``."""
        v = np.fft.fft(self.u, axis=0, norm="ortho").conj().T
        v.setflags(write=False)
        return v

    def modulate(self, s: np.ndarray) -> np.ndarray:
        """Map symbols (last axis of length ``n``) to time-domain signals."""
        return np.asarray(s) @ self.u.T

    @property
    def label(self) -> str:
        if not self.params:
            return self.scheme
        args = ",".join(f"{k}={v}" for k, v in self.params.items() if k not in ("perm", "phases"))
        return f"{self.scheme}:{args}" if args else self.scheme


def basis_sc(n: int) -> UnitaryBasis:
    return UnitaryBasis(np.eye(n), "sc")


def basis_ofdm(n: int) -> UnitaryBasis:
    return UnitaryBasis(dft_matrix(n).conj().T, "ofdm")


def basis_ofdm_multi(l: int, m: int) -> UnitaryBasis:
    """``l`` consecutive OFDM symbols of ``m`` subcarriers each."""
    u = np.kron(np.eye(l), dft_matrix(m).conj().T)
    return UnitaryBasis(u, "ofdm", {"L": l, "M": m})


def basis_cdma(n: int) -> UnitaryBasis:
    """Walsh codes: Sylvester-Hadamard matrix scaled by ``1/sqrt(n)``."""
    if n < 1 or n & (n - 1):
        raise UnsupportedSize(f"CDMA (Sylvester-Hadamard) needs a power-of-two size, got {n}")
    return UnitaryBasis(hadamard(n) / np.sqrt(n), "cdma")


def basis_otfs(m: int, l: int) -> UnitaryBasis:
    """``F_m^H kron I_l``: ``m`` Doppler bins by ``l`` delay bins."""
    u = np.kron(dft_matrix(m).conj().T, np.eye(l))
    return UnitaryBasis(u, "otfs", {"M": m, "L": l})


def chirp_diag(n: int, c: float) -> np.ndarray:
    """Diagonal of the AFDM chirp matrix, ``exp(-2j*pi*c*m^2)`` for m = 0..n-1."""
    m = np.arange(n)
    return np.exp(-2j * np.pi * c * m**2)


def basis_afdm(n: int, c1: float | None = None, c2: float = 0.0) -> UnitaryBasis:
    """Inverse discrete affine Fourier transform ``L_c1^H F^H L_c2^H``.

    ``c1`` defaults to ``1/(2n)``.
    """
    if c1 is None:
        c1 = 1.0 / (2 * n)
    l1 = chirp_diag(n, c1).conj()
    l2 = chirp_diag(n, c2).conj()
    u = l1[:, None] * dft_matrix(n).conj().T * l2[None, :]
    return UnitaryBasis(u, "afdm", {"c1": c1, "c2": c2})


def permutation_matrix(perm) -> np.ndarray:
    """``P`` with ``P[perm[j], j] = 1`` (column ``j`` is the unit vector ``e_perm[j]``)."""
    perm = np.asarray(perm)
    n = perm.size
    if sorted(perm.tolist()) != list(range(n)):
        raise InvalidPhase(f"not a permutation of 0..{n - 1}: {perm.tolist()}")
    p = np.zeros((n, n))
    p[perm, np.arange(n)] = 1.0
    return p


def basis_generalized_ofdm(n: int, perm=None, phases=None) -> UnitaryBasis:
    """OFDM with permuted subcarriers and per-subcarrier phases, ``F^H P Diag(phases)``."""
    perm = np.arange(n) if perm is None else np.asarray(perm)
    phases = np.ones(n, dtype=complex) if phases is None else np.asarray(phases, dtype=complex)
    if perm.size != n or phases.size != n:
        raise UnsupportedSize("perm and phases must have length n")
    if np.max(np.abs(np.abs(phases) - 1.0)) > 1e-12:
        raise InvalidPhase("phases must have unit modulus")
    u = dft_matrix(n).conj().T @ permutation_matrix(perm) * phases[None, :]
    return UnitaryBasis(u, "gofdm", {"perm": perm.tolist(), "phases": phases.tolist()})


def random_generalized_ofdm(n: int, seed=None) -> UnitaryBasis:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    phases = np.exp(2j * np.pi * rng.random(n))
    return basis_generalized_ofdm(n, perm, phases)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def basis_random(n: int, seed=None) -> UnitaryBasis:
    return UnitaryBasis(haar_unitary(n, np.random.default_rng(seed)), "haar", {"seed": seed})


@dataclass(frozen=True)
class ShiftMatrix:
    """Aperiodic (``J_k``) or periodic (``J~_k``) lag-``k`` shift matrix.

    ``x^H J x`` is the lag-``k`` auto-correlation ``sum_i x_i^* x_{i+k}``,
    with the index wrapping modulo ``n`` in the periodic case.
    """

    n: int
    k: int
    periodic: bool

    def __post_init__(self):
        if not 0 <= self.k <= self.n - 1:
            raise InvalidLag(f"lag must lie in [0, {self.n - 1}], got {self.k}")

    def matrix(self) -> np.ndarray:
        j = np.eye(self.n, k=self.k)
        if self.periodic and self.k:
            j += np.eye(self.n, k=self.k - self.n)
        return j

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``J @ x`` along the last axis without forming ``J``."""
        x = np.asarray(x)
        if self.periodic:
            return np.roll(x, -self.k, axis=-1)
        out = np.zeros_like(x)
        out[..., : self.n - self.k] = x[..., self.k :]
        return out

    def quadratic(self, x: np.ndarray):
        """``x^H J x`` along the last axis."""
        x = np.asarray(x)
        return np.sum(x.conj() * self.apply(x), axis=-1)


def shift_matrix(n: int, k: int, periodic: bool) -> ShiftMatrix:
    return ShiftMatrix(n, k, periodic)


def shift_diagonalization(n: int, k: int) -> np.ndarray:
    """``sqrt(n) F^H Diag(f_{n-k+1}) F``, column index 1-based and wrapping at ``n``."""
    f = dft_matrix(n)
    col = (n - k) % n  # 0-based index of the 1-based column n-k+1
    return np.sqrt(n) * f.conj().T @ np.diag(f[:, col]) @ f


def verify_shift_diagonalization(n: int, k: int) -> float:
    """Max-abs residual of the DFT diagonalization of the periodic shift."""
    j = shift_matrix(n, k, periodic=True).matrix()
    return float(np.max(np.abs(j - shift_diagonalization(n, k))))


verify_lemma1 = verify_shift_diagonalization


def reversal_permutation(n: int) -> np.ndarray:
    """Index 0 fixed, indices 1..n-1 reversed."""
    r = np.zeros((n, n))
    idx = np.arange(n)
    r[idx, (-idx) % n] = 1.0
    return r
