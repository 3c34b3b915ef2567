"""Jacobians of the state -> RDM map and of Hamiltonian families, and their cokernels.

A state psi is an eigenstate of some m-body Hamiltonian exactly when the
Jacobian of psi -> rho^(m) acquires a nontrivial left nullspace; the null
vector, reshaped to N_A x N_A, is H^(m) - E * I up to scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .numkernel import DEFAULT_POLICY, TolerancePolicy, determinant, left_nullspace, svd_spectrum
from .operators import HamiltonianFamily, ProjectorSet, assemble_hamiltonian
from .rdm import PureState, _coerce, energy

MINOR_EXHAUSTIVE_LIMIT = 10_000


@dataclass(frozen=True)
class JacobianMatrix:
    """Rows: (I, J) pairs in lexicographic pair order, or family operators.

    Columns: the psi block then the conj(psi) block (2N), or N for the real
    reduction of a real family.
    """

    matrix: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)
    state: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def build_jacobian(psi, P: ProjectorSet) -> JacobianMatrix:
    """Jacobian of psi -> rho^(m) with rho[I, J] = <psi|P_{I,J}|psi>.

    Row (I, J) is [psi^dagger P_{I,J}, psi^t P_{I,J}^t]: the psi-block entry at
    column (JK) is sigma_{I,K} sigma_{J,K} conj(psi[(IK)]) and the conj(psi)
    block entry at column (IK) is sigma_{I,K} sigma_{J,K} psi[(JK)].
    """
    amp = _coerce(psi, P)
    N = P.N
    J = np.zeros((P.NA * P.NA, 2 * N), dtype=complex)
    rows = P.row_index
    np.add.at(J, (rows, P.beta), P.value * np.conj(amp[P.alpha]))
    np.add.at(J, (rows, N + P.alpha), P.value * amp[P.beta])
    return JacobianMatrix(J, "rdm", P.header(), amp.copy())


def family_jacobian(psi, family: HamiltonianFamily, reduce_real: bool = True,
                    real_tol: float = 1e-12) -> JacobianMatrix:
    """Rows [psi^dagger H_a, psi^t H_a^t] for each family operator.

    When every operator and psi are real the conjugate half is redundant and
    the N_p x N real reduction with rows (H_a psi)^t is returned instead.
    """
    amp = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
    if amp.shape != (family.dim,):
        raise ValueError(f"state of length {amp.shape[0]} does not match family dimension {family.dim}")
    all_real = (np.max(np.abs(np.imag(amp)), initial=0.0) <= real_tol
                and all(np.max(np.abs(np.imag(H)), initial=0.0) <= real_tol for H in family.operators))
    meta = {"names": list(family.names), **family.header}
    if reduce_real and all_real:
        x = np.real(amp)
        J = np.stack([np.real(H) @ x for H in family.operators])
        return JacobianMatrix(J, "family-real", meta, amp.copy())
    amp = amp.astype(complex)
    J = np.stack([np.concatenate([amp.conj() @ H, amp @ H.T]) for H in family.operators])
    return JacobianMatrix(J, "family", meta, amp.copy())


@dataclass
class CokernelReport:
    dim: int
    excess: int
    rows: int
    cols: int
    singular_values: np.ndarray
    basis: np.ndarray
    policy: TolerancePolicy

    @property
    def shape_floor(self) -> int:
        return max(0, self.rows - self.cols)

    def to_dict(self, include_basis: bool = False) -> dict:
        out = {
            "dim": self.dim,
            "excess": self.excess,
            "rows": self.rows,
            "cols": self.cols,
            "singular_values": [float(s) for s in self.singular_values],
            "tolerance": self.policy.to_dict(),
        }
        if include_basis:
            out["basis"] = [[[float(z.real), float(z.imag)] for z in col] for col in self.basis.T]
        return out


def cokernel(J, policy: TolerancePolicy = DEFAULT_POLICY) -> CokernelReport:
    M = np.asarray(J)
    rows, cols = M.shape
    spectrum = svd_spectrum(M)
    rank = spectrum.rank_at(policy)
    dim = rows - rank
    basis = left_nullspace(M, policy)
    return CokernelReport(dim, dim - max(0, rows - cols), rows, cols,
                          spectrum.singular_values, basis, policy)


def subspace_alignment(basis: np.ndarray, target: np.ndarray) -> float:
    """Fraction of ``target``'s norm inside the span of orthonormal columns ``basis``.

    For a one-dimensional span this is |<b, t>| / |t|.
    """
    t = np.ravel(target)
    norm = np.linalg.norm(t)
    if norm == 0 or basis.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(basis.conj().T @ t) / norm)


@dataclass
class EtaRecovery:
    eta: np.ndarray
    alignment: float | None
    action_residual: float
    adjoint_residual: float
    hermiticity_residual: float
    report: CokernelReport


def _hermitian_phase(eta: np.ndarray) -> np.ndarray:
    """Rotate a Hermitian-up-to-phase matrix onto the Hermitian axis."""
    overlap = np.vdot(eta.conj().T, eta)
    if abs(overlap) == 0:
        return eta
    return eta * np.sqrt(np.conj(overlap) / abs(overlap))


def recover_eta(psi, P: ProjectorSet, policy: TolerancePolicy = DEFAULT_POLICY,
                hamiltonian=None, energy_value: float | None = None) -> EtaRecovery:
    """Reshape the left null vector of the Jacobian into an m-body operator.

    If ``hamiltonian`` is given, alignment measures how much of
    vec(H - E * I) lies in the cokernel (1.0 for a perfect match).
    """
    amp = _coerce(psi, P)
    report = cokernel(build_jacobian(amp, P), policy)
    if report.dim < 1:
        raise ValueError("trivial cokernel: the state is not a critical point of the RDM map")
    eta = _hermitian_phase(report.basis[:, 0].reshape(P.NA, P.NA))
    eta = eta / np.linalg.norm(eta)
    op = assemble_hamiltonian(eta, P)
    action = float(np.linalg.norm(op @ amp))
    adjoint = float(np.linalg.norm(amp.conj() @ op))
    herm = float(np.linalg.norm(eta - eta.conj().T))
    alignment = None
    if hamiltonian is not None:
        Hm = np.asarray(hamiltonian)
        E = energy(amp, Hm, P) if energy_value is None else energy_value
        alignment = subspace_alignment(report.basis, Hm - E * np.eye(P.NA))
    return EtaRecovery(eta, alignment, action, adjoint, herm, report)


@dataclass
class MinorSampleReport:
    sample_count: int
    normalized_abs_dets: list[float]
    seed: int | None
    exhaustive: bool = False

    @property
    def max(self) -> float:
        return max(self.normalized_abs_dets)

    @property
    def median(self) -> float:
        return float(np.median(self.normalized_abs_dets))

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "seed": self.seed,
            "exhaustive": self.exhaustive,
            "max": self.max,
            "median": self.median,
            "normalized_abs_dets": [float(v) for v in self.normalized_abs_dets],
        }


def normalized_minor(M: np.ndarray, cols, scale: float, row_floor: float = 1e-12) -> float:
    """|det M[:, cols]| over the product of its row norms (Hadamard ratio, in [0, 1]).

    Sub-rows with norm at most ``row_floor * scale`` count as zero rows and the
    minor as vanishing; ``scale`` is the largest row norm of the full matrix.
    """
    sub = M[:, cols]
    norms = np.linalg.norm(sub, axis=1)
    if np.any(norms <= row_floor * scale) or np.any(norms == 0):
        return 0.0
    return min(1.0, abs(determinant(sub)) / float(np.prod(norms)))


def sample_minors(J, count: int, seed: int, exhaustive: bool = False,
                  row_floor: float = 1e-12) -> MinorSampleReport:
    """Hadamard-normalized maximal minors on column subsets drawn without replacement.

    ``exhaustive=True`` enumerates every subset instead, allowed only when
    there are at most ``MINOR_EXHAUSTIVE_LIMIT`` of them.
    """
    M = np.asarray(J)
    rows, cols = M.shape
    if cols < rows:
        raise ValueError(
            f"no maximal minors: {rows} rows exceed {cols} columns (2N < N_A^2); "
            "use the cokernel excess instead")
    if count < 1:
        raise ValueError("count must be >= 1")
    scale = float(np.max(np.linalg.norm(M, axis=1)))
    if exhaustive:
        total = math.comb(cols, rows)
        if total > MINOR_EXHAUSTIVE_LIMIT:
            raise ValueError(f"{total} minors exceed the exhaustive limit {MINOR_EXHAUSTIVE_LIMIT}")
        subsets = itertools.combinations(range(cols), rows)
        values = [normalized_minor(M, list(c), scale, row_floor) for c in subsets]
        return MinorSampleReport(len(values), values, None, exhaustive=True)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(count):
        chosen = np.sort(rng.choice(cols, size=rows, replace=False))
        values.append(normalized_minor(M, chosen, scale, row_floor))
    return MinorSampleReport(count, values, seed)


def span_inclusion(J_low, J_high, policy: TolerancePolicy = DEFAULT_POLICY) -> float:
    """Max relative residual of rows of ``J_low`` projected onto the row space of ``J_high``."""
    if isinstance(J_low, JacobianMatrix) and isinstance(J_high, JacobianMatrix):
        if (J_low.state is not None and J_high.state is not None
                and not np.array_equal(J_low.state, J_high.state)):
            raise ValueError("Jacobians were built from different states")
    A, B = np.asarray(J_low), np.asarray(J_high)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"column counts differ: {A.shape[1]} vs {B.shape[1]}")
    _, s, vh = np.linalg.svd(B, full_matrices=False)
    rank = int(np.count_nonzero(s > policy.threshold(s[0]))) if s.size else 0
    V = vh[:rank]
    worst = 0.0
    for row in A:
        norm = np.linalg.norm(row)
        if norm == 0:
            continue
        resid = row - (row @ V.conj().T) @ V
        worst = max(worst, float(np.linalg.norm(resid) / norm))
    return worst
