"""Projection operators P_{I,J}, assembled Hamiltonians and Hamiltonian families."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .fock import Basis, Statistics, concat_index, enumerate_basis, sigma


@dataclass(frozen=True)
class ProjectorSet:
    """All P_{I,J} for m-particle index sets I, J acting on the n-particle basis.

    Entries are stored as flat triplet arrays: entry ``e`` contributes
    ``value[e]`` at ``(alpha[e], beta[e])`` of the operator P_{I,J} with
    ``I = basis_m[left[e]]`` and ``J = basis_m[right[e]]``.
    """

    q: int
    n: int
    m: int
    statistics: Statistics
    basis_n: Basis
    basis_m: Basis
    left: np.ndarray
    right: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    value: np.ndarray
    normalization: float
    sigma_convention: str = "trace"
    _by_pair: dict = field(default=None, repr=False, compare=False)

    @property
    def N(self) -> int:
        return len(self.basis_n)

    @property
    def NA(self) -> int:
        return len(self.basis_m)

    @property
    def row_index(self) -> np.ndarray:
        """Row of the (I, J) pair in lexicographic pair order."""
        return self.left * self.NA + self.right

    def header(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "m": self.m,
            "statistics": self.statistics.value,
            "normalization": self.normalization,
            "sigma_convention": self.sigma_convention,
        }

    def triplets(self, I: int, J: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(alpha, beta, value) of P_{I,J}, positions into the m-particle basis."""
        sel = self._by_pair.get((I, J), np.zeros(0, dtype=np.intp))
        return self.alpha[sel], self.beta[sel], self.value[sel]

    def dense(self, I: int, J: int) -> np.ndarray:
        a, b, v = self.triplets(I, J)
        P = np.zeros((self.N, self.N))
        np.add.at(P, (a, b), v)
        return P


def build_projectors(q: int, n: int, m: int, statistics, *, physics_trace: bool = False,
                     sigma_convention: str = "trace") -> ProjectorSet:
    """Sparse P^(m)_{I,J}, scaled so that sum_I P_{I,I} is the identity.

    With ``physics_trace=True`` the 1/C(n, m) scaling is dropped and the
    diagonal projectors sum to C(n, m) times the identity.
    """
    stats = Statistics.parse(statistics)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if stats is Statistics.FERMI and n > q:
        raise ValueError(f"fermionic n={n} exceeds q={q}")
    basis_n = enumerate_basis(q, n, stats)
    basis_m = enumerate_basis(q, m, stats)
    basis_k = enumerate_basis(q, n - m, stats)
    normalization = 1.0 if physics_trace else 1.0 / math.comb(n, m)

    # For each spectator set K, the (I, (IK), sigma) it completes.
    left, right, alpha, beta, value = [], [], [], [], []
    for K in basis_k:
        members = []
        for i, I in enumerate(basis_m):
            c = concat_index(I, K, stats)
            if c.coefficient == 0.0:
                continue
            members.append((i, basis_n.index(c.sorted), sigma(I, K, stats, sigma_convention)))
        for i, a, si in members:
            for j, b, sj in members:
                left.append(i)
                right.append(j)
                alpha.append(a)
                beta.append(b)
                value.append(si * sj * normalization)

    left = np.asarray(left, dtype=np.intp)
    right = np.asarray(right, dtype=np.intp)
    by_pair = defaultdict(list)
    for e, (i, j) in enumerate(zip(left.tolist(), right.tolist())):
        by_pair[(i, j)].append(e)
    return ProjectorSet(
        q, n, m, stats, basis_n, basis_m,
        left, right,
        np.asarray(alpha, dtype=np.intp), np.asarray(beta, dtype=np.intp),
        np.asarray(value, dtype=float),
        normalization, sigma_convention,
        {k: np.asarray(v, dtype=np.intp) for k, v in by_pair.items()},
    )


def _check_hermitian(H: np.ndarray, what: str, atol: float = 1e-12) -> None:
    err = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    if err > atol * max(1.0, float(np.max(np.abs(H)))):
        raise ValueError(f"{what} is not Hermitian: max asymmetry {err:.3e}")


def assemble_hamiltonian(Hm, P: ProjectorSet, order: np.ndarray | None = None) -> np.ndarray:
    """Full N x N operator sum_{I,J} Hm[I, J] P_{I,J}.

    ``order`` optionally permutes the triplet accumulation order.
    """
    Hm = np.asarray(Hm)
    if Hm.shape != (P.NA, P.NA):
        raise ValueError(f"m-particle Hamiltonian has shape {Hm.shape}, expected {(P.NA, P.NA)}")
    sel = slice(None) if order is None else np.asarray(order)
    H = np.zeros((P.N, P.N), dtype=np.result_type(Hm.dtype, float))
    np.add.at(H, (P.alpha[sel], P.beta[sel]), Hm[P.left[sel], P.right[sel]] * P.value[sel])
    return H


@dataclass
class HamiltonianFamily:
    """Hermitian operators H_alpha with H_0 the identity; ``parameters`` optional."""

    names: list[str]
    operators: list[np.ndarray]
    parameters: np.ndarray | None = None
    header: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) != len(self.operators):
            raise ValueError("names and operators differ in length")
        if not self.operators:
            raise ValueError("a family needs at least the identity operator")
        N = self.operators[0].shape[0]
        for name, H in zip(self.names, self.operators):
            if H.shape != (N, N):
                raise ValueError(f"operator {name!r} has shape {H.shape}, expected {(N, N)}")
            _check_hermitian(H, f"operator {name!r}")
        if not np.allclose(self.operators[0], np.eye(N), atol=1e-14, rtol=0):
            raise ValueError("the first family operator must be the identity")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def combine(self, eta) -> np.ndarray:
        return sum(c * H for c, H in zip(eta, self.operators))


def encode_hamiltonian(Hm, NA: int) -> np.ndarray:
    """Real coordinates of a Hermitian m-particle Hamiltonian in the generator basis.

    Order matches :func:`hermitian_generator_basis`: the identity, the first
    N_A - 1 diagonal projectors, then (Re, Im) for each pair I < J.
    """
    Hm = np.asarray(Hm)
    if Hm.shape != (NA, NA):
        raise ValueError(f"m-particle Hamiltonian has shape {Hm.shape}, expected {(NA, NA)}")
    _check_hermitian(Hm, "m-particle Hamiltonian")
    last = Hm[NA - 1, NA - 1].real
    coords = [last] + [Hm[i, i].real - last for i in range(NA - 1)]
    for i in range(NA):
        for j in range(i + 1, NA):
            coords.extend([Hm[i, j].real, Hm[i, j].imag])
    return np.asarray(coords)


def hermitian_generator_basis(P: ProjectorSet) -> HamiltonianFamily:
    """N_A^2 Hermitian operators with the same real span as the P_{I,J}.

    The identity comes first and stands in for the last diagonal projector
    (the diagonals sum to the identity), followed by P_{I,I} for the other
    diagonals and P_{I,J} + P_{J,I}, i(P_{I,J} - P_{J,I}) for each I < J.
    """
    names, ops = ["I"], [np.eye(P.N, dtype=complex)]
    for i in range(P.NA - 1):
        names.append(f"P[{i},{i}]")
        ops.append(P.dense(i, i).astype(complex))
    for i in range(P.NA):
        for j in range(i + 1, P.NA):
            Pij, Pji = P.dense(i, j), P.dense(j, i)
            names.append(f"S[{i},{j}]")
            ops.append((Pij + Pji).astype(complex))
            names.append(f"A[{i},{j}]")
            ops.append(1j * (Pij - Pji))
    return HamiltonianFamily(names, ops, header=P.header())


@dataclass(frozen=True)
class HubbardSpec:
    L: int
    n_electrons: int
    boundary: str = "periodic"
    t: float = 1.0
    U: float = 0.0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("need at least one site")
        if not 0 < self.n_electrons <= 2 * self.L:
            raise ValueError(f"invalid filling: {self.n_electrons} electrons on {self.L} sites")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    def bonds(self) -> list[tuple[int, int]]:
        pairs = {(i, i + 1) for i in range(self.L - 1)}
        if self.boundary == "periodic" and self.L > 2:
            pairs.add((0, self.L - 1))
        return sorted(pairs)


def spin_orbital(site: int, spin: int) -> int:
    """1-based label of a spin-orbital; spin 0 is up, 1 is down."""
    return 2 * site + spin + 1


def hubbard_operators(spec: HubbardSpec) -> tuple[HamiltonianFamily, Basis]:
    """Family {I, T, V} on the fermionic n-electron basis over 2L spin-orbitals."""
    basis = enumerate_basis(2 * spec.L, spec.n_electrons, Statistics.FERMI)
    N = len(basis)
    T = np.zeros((N, N))
    V = np.zeros((N, N))
    for col, occ in enumerate(basis):
        occupied = set(occ)
        V[col, col] = sum(1 for s in range(spec.L)
                          if spin_orbital(s, 0) in occupied and spin_orbital(s, 1) in occupied)
        for i, j in spec.bonds():
            for spin in (0, 1):
                a, b = spin_orbital(i, spin), spin_orbital(j, spin)
                for src, dst in ((a, b), (b, a)):
                    # c_dst^dagger c_src
                    if src not in occupied or dst in occupied:
                        continue
                    lo, hi = min(src, dst), max(src, dst)
                    between = sum(1 for p in occ if lo < p < hi)
                    target = tuple(sorted((occupied - {src}) | {dst}))
                    T[basis.index(target), col] += (-1) ** between
    header = {"L": spec.L, "n_electrons": spec.n_electrons, "boundary": spec.boundary,
              "q": 2 * spec.L, "statistics": "fermi"}
    family = HamiltonianFamily(["I", "T", "V"], [np.eye(N), T, V],
                               parameters=None, header=header)
    return family, basis


def hubbard_hamiltonian(spec: HubbardSpec) -> np.ndarray:
    family, _ = hubbard_operators(spec)
    return spec.t * family.operators[1] + spec.U * family.operators[2]
