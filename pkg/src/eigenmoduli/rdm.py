"""Pure states, the state -> m-RDM map, energies, and the bipartite system.

Convention: rho[I, J] = <psi| P_{I,J} |psi>, so rho = conj(A) A^t / C(n, m)
for the unfolding matrix A. The energy of sum_{I,J} H[I, J] P_{I,J} is then
the entrywise pairing sum_{I,J} H[I, J] rho[I, J].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .fock import Basis, Statistics, concat_index, enumerate_basis, sigma
from .numkernel import complex_gaussian
from .operators import ProjectorSet, assemble_hamiltonian


@dataclass(frozen=True)
class PureState:
    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (len(self.basis),):
            raise ValueError(f"state has {amp.shape} amplitudes, basis has {len(self.basis)} sets")
        if not np.all(np.isfinite(amp)):
            raise ValueError("state has non-finite amplitudes")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, basis: Basis, amplitudes) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(basis, amp / norm)

    @property
    def q(self) -> int:
        return self.basis.q

    @property
    def n(self) -> int:
        return self.basis.k

    @property
    def statistics(self) -> Statistics:
        return self.basis.statistics

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def require_unit(self, tol: float = 1e-12) -> None:
        if abs(self.norm - 1.0) > tol:
            raise ValueError(f"state is not normalized: norm = {self.norm:.6g}")


def _coerce(psi, P: ProjectorSet | None = None) -> np.ndarray:
    amp = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    if P is not None:
        if amp.shape != (P.N,):
            raise ValueError(f"state of length {amp.shape[0]} does not match basis size {P.N}")
        if isinstance(psi, PureState) and (psi.q, psi.n, psi.statistics) != (P.q, P.n, P.statistics):
            raise ValueError("state and projector bases differ")
    return amp


def unfold(psi: PureState, m: int) -> np.ndarray:
    """N_A x N_B matrix A[I, K] = sigma(I, K) psi[(IK)]; fermionic overlaps stay exact zeros."""
    n = psi.n
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    bm = enumerate_basis(psi.q, m, psi.statistics)
    bk = enumerate_basis(psi.q, n - m, psi.statistics)
    A = np.zeros((len(bm), len(bk)), dtype=complex)
    for i, I in enumerate(bm):
        for k, K in enumerate(bk):
            c = concat_index(I, K, psi.statistics)
            if c.coefficient == 0.0:
                continue
            A[i, k] = sigma(I, K, psi.statistics) * psi.amplitudes[psi.basis.index(c.sorted)]
    return A


def compute_rdm(psi, P: ProjectorSet) -> np.ndarray:
    """rho[I, J] = <psi|P_{I,J}|psi>, accumulated from the projector triplets."""
    amp = _coerce(psi, P)
    contrib = np.conj(amp[P.alpha]) * P.value * amp[P.beta]
    rho = np.zeros(P.NA * P.NA, dtype=complex)
    np.add.at(rho, P.row_index, contrib)
    return rho.reshape(P.NA, P.NA)


def rdm_from_unfolding(psi: PureState, m: int, physics_trace: bool = False) -> np.ndarray:
    A = unfold(psi, m)
    scale = 1.0 if physics_trace else 1.0 / math.comb(psi.n, m)
    return (A.conj() @ A.T) * scale


def energy(psi, Hm, P: ProjectorSet, atol: float = 1e-10) -> float:
    Hm = np.asarray(Hm)
    if Hm.shape != (P.NA, P.NA):
        raise ValueError(f"m-particle Hamiltonian has shape {Hm.shape}, expected {(P.NA, P.NA)}")
    if np.max(np.abs(Hm - Hm.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(Hm))):
        raise ValueError("m-particle Hamiltonian is not Hermitian")
    e = complex(np.sum(Hm * compute_rdm(psi, P)))
    if abs(e.imag) > atol * max(1.0, abs(e.real)):
        raise ValueError(f"energy has imaginary part {e.imag:.3e}")
    return e.real


def expectation(psi, Hm, P: ProjectorSet) -> float:
    """<psi|H|psi> through the assembled N x N operator; the slow path for cross-checks."""
    amp = _coerce(psi, P)
    return float(np.real(np.vdot(amp, assemble_hamiltonian(Hm, P) @ amp)))


# Bipartite system: psi reshaped to Psi[a, b] with a in subsystem A.

def bipartite_rdm(Psi) -> np.ndarray:
    """rho[i, j] = <psi| e^{ij} (x) I_B |psi> = sum_b conj(Psi[i, b]) Psi[j, b].

    This is the entrywise conjugate (equivalently the transpose) of Psi Psi^dagger.
    """
    Psi = np.asarray(Psi, dtype=complex)
    return Psi.conj() @ Psi.T


def bipartite_jacobian(Psi) -> np.ndarray:
    """N_A^2 x 2N Jacobian of the bipartite map; psi flattened row-major as psi[a * N_B + b]."""
    Psi = np.asarray(Psi, dtype=complex)
    NA, NB = Psi.shape
    N = NA * NB
    J = np.zeros((NA * NA, 2 * N), dtype=complex)
    for i in range(NA):
        for j in range(NA):
            row = i * NA + j
            J[row, j * NB:(j + 1) * NB] = Psi[i].conj()
            J[row, N + i * NB:N + (i + 1) * NB] = Psi[j]
    return J


def planted_rank_state(NA: int, NB: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-Frobenius NA x NB matrix of exact rank ``rank``."""
    if not 1 <= rank <= min(NA, NB):
        raise ValueError(f"rank {rank} infeasible for a {NA}x{NB} matrix")
    Psi = complex_gaussian(rng, (NA, rank)) @ complex_gaussian(rng, (rank, NB))
    return Psi / np.linalg.norm(Psi)


def commutant_dimension(NA: int, NB: int, tol: float = 1e-10) -> int:
    """Dimension of {L : [L, e^{ij} (x) I_B] = 0 for all i, j}, by brute-force nullity.

    Each commutator is linear in vec(L); the stacked constraints are real, so
    the nullity of their Gram matrix equals the complex solution dimension.
    """
    N = NA * NB
    if N > 64:
        raise ValueError(f"N_A * N_B = {N} exceeds the desk-scale cap of 64")
    eye_n = sparse.identity(N, format="csr")
    gram = sparse.csr_matrix((N * N, N * N))
    for i in range(NA):
        for j in range(NA):
            E = sparse.csr_matrix(([1.0], ([i], [j])), shape=(NA, NA))
            P = sparse.kron(E, sparse.identity(NB), format="csr")
            # row-major vec: vec(L P) = (I (x) P^t) vec L, vec(P L) = (P (x) I) vec L
            C = sparse.kron(eye_n, P.T) - sparse.kron(P, eye_n)
            gram = gram + (C.T @ C)
    w = np.linalg.eigvalsh(gram.toarray())
    return int(np.count_nonzero(w <= tol * max(1.0, w[-1])))
