"""Slater and symmetric-product embeddings, their quadratic relations, and strata probes."""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .fock import Statistics, concat_index, enumerate_basis
from .moduli import build_jacobian, cokernel
from .numkernel import DEFAULT_POLICY, TolerancePolicy, complex_gaussian, substream
from .operators import build_projectors
from .rdm import PureState


def _orbital_matrix(orbitals) -> np.ndarray:
    Phi = np.asarray(orbitals, dtype=complex)
    if Phi.ndim != 2:
        raise ValueError(f"orbitals must be a q x n matrix of columns, got shape {Phi.shape}")
    return Phi


def orbital_orthogonality_residual(orbitals) -> float:
    """Max |off-diagonal Gram entry| of the orbital columns."""
    Phi = _orbital_matrix(orbitals)
    G = Phi.conj().T @ Phi
    off = G - np.diag(np.diag(G))
    return float(np.max(np.abs(off), initial=0.0))


def slater_embed(orbitals, gram_tol: float = 1e-10) -> PureState:
    """psi[I] = det(Phi[I, :]) for n orthonormal orbital columns of a q x n matrix."""
    Phi = _orbital_matrix(orbitals)
    q, n = Phi.shape
    if n > q:
        raise ValueError(f"{n} orbitals cannot be independent in {q} modes")
    if np.linalg.matrix_rank(Phi) < n:
        raise ValueError("orbitals are rank-deficient")
    gram_err = float(np.max(np.abs(Phi.conj().T @ Phi - np.eye(n))))
    if gram_err > gram_tol:
        raise ValueError(f"orbitals are not orthonormal: max |Gram - I| = {gram_err:.3e}")
    basis = enumerate_basis(q, n, Statistics.FERMI)
    amps = np.array([np.linalg.det(Phi[[i - 1 for i in I], :]) for I in basis])
    return PureState.normalized(basis, amps)


def random_orbitals(q: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n orthonormal columns drawn from a Haar-random unitary."""
    Q, R = np.linalg.qr(complex_gaussian(rng, (q, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _antisym_amplitude(psi: PureState, labels) -> complex:
    c = concat_index(tuple(labels), (), Statistics.FERMI)
    if c.coefficient == 0.0:
        return 0.0
    return c.coefficient * psi.amplitudes[psi.basis.index(c.sorted)]


def plucker_residual(psi: PureState) -> float:
    """Max over I (n-1 labels), J (n+1 labels) of |sum_i (-1)^pos(i) psi[I+i] psi[J-i]|."""
    if psi.statistics is not Statistics.FERMI:
        raise ValueError("Plücker relations apply to fermionic states")
    q, n = psi.q, psi.n
    if n < 1 or n + 1 > q:
        return 0.0
    worst = 0.0
    for I in itertools.combinations(range(1, q + 1), n - 1):
        for J in itertools.combinations(range(1, q + 1), n + 1):
            total = 0.0
            for pos, i in enumerate(J):
                total += (-1) ** pos * _antisym_amplitude(psi, I + (i,)) * \
                    psi.amplitudes[psi.basis.index(J[:pos] + J[pos + 1:])]
            worst = max(worst, abs(total))
    return worst


def multinomial(index_set) -> int:
    counts = Counter(index_set).values()
    return math.factorial(sum(counts)) // math.prod(math.factorial(c) for c in counts)


def permanent(A: np.ndarray) -> complex:
    """Ryser's formula, O(2^n n^2)."""
    A = np.asarray(A)
    n = A.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for size in range(1, n + 1):
        for cols in itertools.combinations(range(n), size):
            total += (-1) ** size * np.prod(A[:, cols].sum(axis=1))
    return (-1) ** n * total


def symmetric_product_state(q: int, orbitals) -> PureState:
    """Normalized bosonic state b_1^dagger ... b_n^dagger |0> for orbital columns (q x n).

    Repeated columns encode multiplicities.
    """
    V = np.asarray(orbitals, dtype=complex)
    n = V.shape[1]
    basis = enumerate_basis(q, n, Statistics.BOSE)
    amps = np.array([math.sqrt(multinomial(I)) * permanent(V[[i - 1 for i in I], :]) / math.factorial(n)
                     for I in basis])
    return PureState.normalized(basis, amps)


def symmetric_product_embed(orbital, n: int) -> PureState:
    """Rank-1 condensate: psi[I] = sqrt(multinomial(I)) * prod_k orbital[i_k], normalized."""
    phi = np.asarray(orbital, dtype=complex).ravel()
    norm = np.linalg.norm(phi)
    if norm == 0:
        raise ValueError("zero orbital")
    phi = phi / norm
    basis = enumerate_basis(phi.size, n, Statistics.BOSE)
    amps = np.array([math.sqrt(multinomial(I)) * np.prod(phi[[i - 1 for i in I]]) for I in basis])
    return PureState.normalized(basis, amps)


def veronese_residual(psi: PureState) -> float:
    """Max |u_I u_J - u_I' u_J'| over pairs with equal merged multisets, u_I = psi_I / sqrt(multinomial(I))."""
    if psi.statistics is not Statistics.BOSE:
        raise ValueError("Veronese relations apply to bosonic states")
    u = np.array([a / math.sqrt(multinomial(I)) for I, a in zip(psi.basis, psi.amplitudes)])
    groups = defaultdict(list)
    sets = psi.basis.sets
    for a in range(len(sets)):
        for b in range(a, len(sets)):
            groups[tuple(sorted(sets[a] + sets[b]))].append(u[a] * u[b])
    worst = 0.0
    for products in groups.values():
        if len(products) > 1:
            p = np.asarray(products)
            worst = max(worst, float(np.max(np.abs(p[:, None] - p[None, :]))))
    return worst


def random_composition(n: int, r: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform composition of n into r positive parts."""
    cuts = np.sort(rng.choice(np.arange(1, n), size=r - 1, replace=False)) if r > 1 else np.array([], int)
    edges = np.concatenate([[0], cuts, [n]])
    return tuple(int(d) for d in np.diff(edges))


@dataclass
class StrataReport:
    q: int
    n: int
    r: int
    seed: int
    multiplicities: list[tuple[int, ...]] = field(default_factory=list)
    coker_dims: list[int] = field(default_factory=list)

    @property
    def expected(self) -> int | None:
        return (self.q - 1) ** 2 if self.r == 1 else None

    @property
    def matches_expected(self) -> bool:
        return self.expected is None or all(d == self.expected for d in self.coker_dims)

    def to_dict(self) -> dict:
        return {
            "q": self.q, "n": self.n, "r": self.r, "seed": self.seed,
            "expected_r1": self.expected,
            "matches_expected": self.matches_expected,
            "samples": [{"multiplicities": list(mu), "coker_dim": d}
                        for mu, d in zip(self.multiplicities, self.coker_dims)],
        }


def rank_r_state(q: int, n: int, r: int, rng: np.random.Generator) -> tuple[PureState, tuple[int, ...]]:
    if not 1 <= r <= min(q, n):
        raise ValueError(f"rank r={r} infeasible for q={q}, n={n}")
    mult = random_composition(n, r, rng)
    orbitals = complex_gaussian(rng, (q, r))
    orbitals /= np.linalg.norm(orbitals, axis=0)
    cols = np.repeat(orbitals, mult, axis=1)
    return symmetric_product_state(q, cols), mult


def strata_probe(q: int, n: int, r: int, seed: int, samples: int = 3,
                 policy: TolerancePolicy = DEFAULT_POLICY) -> StrataReport:
    """Cokernel dimension of the 1-RDM Jacobian on bosonic rank-r product states.

    For r = 1 every sample should give (q - 1)^2; see ``matches_expected``.
    """
    P = build_projectors(q, n, 1, Statistics.BOSE)
    report = StrataReport(q, n, r, seed)
    for s in range(samples):
        psi, mult = rank_r_state(q, n, r, substream(seed, r, s))
        report.multiplicities.append(mult)
        report.coker_dims.append(cokernel(build_jacobian(psi, P), policy).dim)
    return report
