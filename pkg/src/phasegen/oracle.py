"""Truncated Fock-basis reference implementation.

Everything here works with explicit density matrices (numpy arrays) and
shares no code with the generating-function modules, so it can serve as an
independent check of every closed form. Operators that spread amplitude
upward in photon number (squeeze, displacement) are built on a padded space
and cropped, so the cutoff edge does not pollute the retained block.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.linalg import expm

__all__ = [
    "OracleTruncationError",
    "destroy",
    "fock_dm",
    "thermal_dm",
    "squeeze_operator",
    "squeeze_dm",
    "squeezed_thermal_dm",
    "annihilate",
    "beamsplitter_unitary",
    "herald_kraus",
    "beamsplit_and_herald",
    "herald_distribution",
    "loss_channel",
    "displacement",
    "wigner_from_dm",
    "photon_dist_dm",
    "check_density_matrix",
]

DEFAULT_N = 140
PAD = 40


class OracleTruncationError(ArithmeticError):
    """Probability mass leaked past the Fock cutoff."""


def destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def fock_dm(n: int, N: int = DEFAULT_N) -> np.ndarray:
    rho = np.zeros((N + 1, N + 1), dtype=complex)
    rho[n, n] = 1.0
    return rho


def thermal_dm(T: float, N: int = DEFAULT_N) -> np.ndarray:
    """Thermal state of purity ``T``: geometric with mean ``(1 - T) / (2T)``."""
    if not 0 < T <= 1:
        raise ValueError(f"purity must lie in (0, 1], got {T}")
    nbar = (1.0 - T) / (2.0 * T)
    lam = nbar / (nbar + 1.0)
    p = (1.0 - lam) * lam ** np.arange(N + 1)
    return np.diag(p / p.sum()).astype(complex)


@functools.lru_cache(maxsize=16)
def squeeze_operator(xi: complex, dim: int) -> np.ndarray:
    """``exp((xi* a^2 - xi a^dag^2) / 2)`` on a ``dim``-dimensional space."""
    a = destroy(dim)
    ad = a.conj().T
    return expm(0.5 * (np.conj(xi) * (a @ a) - xi * (ad @ ad)))


def _embed(rho: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    n = rho.shape[0]
    out[:n, :n] = rho
    return out


def _crop(rho: np.ndarray, n: int, tail_tol: float) -> np.ndarray:
    tail = float(np.real(np.trace(rho)) - np.real(np.trace(rho[:n, :n])))
    if tail > tail_tol:
        raise OracleTruncationError(f"tail mass {tail:.3g} beyond cutoff {n - 1} exceeds {tail_tol:g}")
    return rho[:n, :n].copy()


def squeeze_dm(rho: np.ndarray, xi: complex, pad: int = 2 * PAD, tail_tol: float = 1e-8) -> np.ndarray:
    """``S rho S^dag`` cropped back to the size of ``rho``."""
    n = rho.shape[0]
    S = squeeze_operator(complex(xi), n + pad)
    out = S @ _embed(rho, n + pad) @ S.conj().T
    return _crop(out, n, tail_tol)


def squeezed_thermal_dm(T: float, A: float, phi: float = 0.0, N: int = DEFAULT_N) -> np.ndarray:
    """Thermal state of purity T squeezed so the vacuum would have ``cosh 2|xi| = A``."""
    xi = 0.5 * math.acosh(A) * np.exp(1j * phi)
    return squeeze_dm(thermal_dm(T, N), xi)


def annihilate(rho: np.ndarray, n: int) -> np.ndarray:
    """Normalized ``a^n rho a^dag^n``."""
    an = np.linalg.matrix_power(destroy(rho.shape[0]), n)
    out = an @ rho @ an.conj().T
    tr = np.real(np.trace(out))
    if tr <= 1e-300:
        raise ArithmeticError(f"cannot subtract {n} photons: zero trace")
    return out / tr


def beamsplitter_unitary(zeta: float, na: int, nb: int) -> np.ndarray:
    """``U = exp(i theta (a^dag b + a b^dag))`` on a truncated two-mode space.

    ``cos theta = sqrt(1 - zeta)``; basis ordering is ``|m>_a (x) |k>_b``.
    """
    a = np.kron(destroy(na), np.eye(nb))
    b = np.kron(np.eye(na), destroy(nb))
    theta = math.acos(math.sqrt(1.0 - zeta))
    return expm(1j * theta * (a.conj().T @ b + a @ b.conj().T))


@functools.lru_cache(maxsize=8)
def herald_kraus(zeta: float, na: int, nb: int) -> np.ndarray:
    """Kraus operators ``M_k = <k|_b U |0>_b`` for ``k < nb``, shape ``(nb, na, na)``.

    With vacuum in the tap port the unitary acts on ``|m>|0>`` as
    ``sum_k sqrt(C(m, k)) t^(m-k) (i r)^k |m-k>|k>``, so the operators are
    exact; ``nb`` only limits which tap outcomes are reported.
    """
    t, r = math.sqrt(1.0 - zeta), math.sqrt(zeta)
    M = np.zeros((nb, na, na), dtype=complex)
    for m in range(na):
        for k in range(min(m, nb - 1) + 1):
            M[k, m - k, m] = math.sqrt(math.comb(m, k)) * t ** (m - k) * (1j * r) ** k
    return M


def herald_distribution(rho: np.ndarray, zeta: float, nb: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized heralded states and probabilities for tap outcomes ``0..nb-1``.

    ``nb`` defaults to the full range ``rho.shape[0]``, which loses nothing.
    """
    na = rho.shape[0]
    M = herald_kraus(float(zeta), na, na if nb is None else nb)
    states = M @ rho @ M.conj().transpose(0, 2, 1)
    probs = np.real(np.einsum("kii->k", states))
    return states, probs


def beamsplit_and_herald(rho: np.ndarray, zeta: float, n_detect: int, nb: int | None = None):
    """Heralded state and its probability after detecting ``n_detect`` tap photons."""
    states, probs = herald_distribution(rho, zeta, nb)
    p = probs[n_detect]
    if p <= 1e-300:
        raise ArithmeticError(f"probability to detect {n_detect} photons is zero")
    return states[n_detect] / p, float(p)


def loss_channel(rho: np.ndarray, t: float) -> np.ndarray:
    """Transmission ``t`` loss: beam splitter with the tap traced out."""
    if t == 1.0:
        return rho.copy()
    states, _ = herald_distribution(rho, 1.0 - t)
    return states.sum(axis=0)


@functools.lru_cache(maxsize=256)
def displacement(alpha: complex, dim: int) -> np.ndarray:
    a = destroy(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def wigner_from_dm(rho, pts, pad: int = PAD) -> np.ndarray:
    """``2 sum_k (-1)^k <k| D^dag rho D |k>`` at each phase-space point.

    ``rho`` may be a single matrix or a list of matrices of equal size; the
    displacement matrices are shared between them.
    """
    single = isinstance(rho, np.ndarray) and rho.ndim == 2
    rhos = [rho] if single else list(rho)
    n = rhos[0].shape[0]
    alphas = np.asarray(pts, dtype=complex)
    keep = n + pad
    parity = (-1.0) ** np.arange(keep)
    out = np.empty((len(rhos), alphas.size))
    for j, alpha in enumerate(alphas.reshape(-1)):
        D = displacement(complex(alpha), n + 2 * pad)[:n, :keep]
        for i, r in enumerate(rhos):
            diag = np.einsum("ik,ik->k", D.conj(), r @ D)
            out[i, j] = 2.0 * np.real(diag @ parity)
    out = out.reshape((len(rhos),) + alphas.shape)
    return out[0][()] if single else out


def photon_dist_dm(rho: np.ndarray):
    from .statistics import PhotonDistribution

    p = np.real(np.diag(rho)).copy()
    k = np.arange(p.size)
    mean = float(p @ k)
    second = float(p @ k**2)
    return PhotonDistribution(p, mean, second)


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Raise if ``rho`` is not hermitian, unit-trace and positive semidefinite."""
    if np.abs(rho - rho.conj().T).max() > 1e-12 * max(1.0, np.abs(rho).max()):
        raise ValueError("density matrix is not hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")
