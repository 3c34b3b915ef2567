"""Dense complex linear algebra with an explicit rank tolerance policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TolerancePolicy:
    """Singular values above ``max(relative * s_max, absolute_floor)`` count toward rank."""

    relative: float = 1e-9
    absolute_floor: float = 1e-14

    def __post_init__(self):
        if not (self.relative > 0 and self.absolute_floor > 0):
            raise ValueError("tolerances must be positive")

    def threshold(self, s_max: float) -> float:
        return max(self.relative * s_max, self.absolute_floor)

    def to_dict(self) -> dict:
        return {"relative": self.relative, "absolute_floor": self.absolute_floor}


DEFAULT_POLICY = TolerancePolicy()


@dataclass(frozen=True)
class SvdSpectrum:
    singular_values: np.ndarray

    def rank_at(self, policy: TolerancePolicy = DEFAULT_POLICY) -> int:
        s = self.singular_values
        if s.size == 0:
            return 0
        return int(np.count_nonzero(s > policy.threshold(s[0])))


def _as_matrix(M) -> np.ndarray:
    A = np.asarray(M)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    if A.size == 0:
        raise ValueError(f"zero-size matrix of shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def hermitian_eig(H, rtol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""
    A = _as_matrix(H)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"hermitian_eig needs a square matrix, got {A.shape}")
    asym = float(np.max(np.abs(A - A.conj().T)))
    scale = float(np.max(np.abs(A))) or 1.0
    if asym > rtol * scale:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dagger| = {asym:.3e}")
    return np.linalg.eigh(A)


def svd_spectrum(M) -> SvdSpectrum:
    return SvdSpectrum(np.linalg.svd(_as_matrix(M), compute_uv=False))


def numeric_rank(M, policy: TolerancePolicy = DEFAULT_POLICY) -> int:
    return svd_spectrum(M).rank_at(policy)


def left_nullspace(M, policy: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Orthonormal columns spanning {eta : eta^t M = 0}.

    Transpose, not conjugate transpose: this is the nullspace of ``M.T``.
    """
    A = _as_matrix(M)
    _, s, vh = np.linalg.svd(A.T, full_matrices=True)
    rank = SvdSpectrum(s).rank_at(policy)
    return vh[rank:].conj().T


def determinant(M) -> complex:
    A = _as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"determinant needs a square matrix, got {A.shape}")
    return complex(np.linalg.det(A))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for ``(seed, *path)``, e.g. a master seed and a trial index.

    Streams depend only on the key, so serial and parallel runs agree.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian entries, E|z|^2 = 1."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hermitian(dim: int, seed) -> np.ndarray:
    """GUE sample (G + G^dagger)/2; ``seed`` may be an int or a Generator."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    G = complex_gaussian(_rng(seed), (dim, dim))
    return (G + G.conj().T) / 2


def random_state(dim: int, seed) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    v = complex_gaussian(_rng(seed), dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    Z = complex_gaussian(_rng(seed), (dim, dim))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
