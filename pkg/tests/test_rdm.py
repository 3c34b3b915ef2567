import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigenmoduli.fock import enumerate_basis
from eigenmoduli.moduli import cokernel
from eigenmoduli.numkernel import hermitian_eig, random_hermitian, random_state, substream
from eigenmoduli.operators import assemble_hamiltonian, build_projectors
from eigenmoduli.rdm import (
    PureState,
    bipartite_jacobian,
    bipartite_rdm,
    commutant_dimension,
    compute_rdm,
    energy,
    expectation,
    planted_rank_state,
    rdm_from_unfolding,
    unfold,
)
from oracles import wirtinger_jacobian

CONFIGS = [(2, 4, 2, "bose"), (3, 4, 1, "bose"), (3, 3, 2, "bose"), (4, 2, 1, "fermi"), (6, 3, 2, "fermi")]


def unit(basis, index_set):
    amp = np.zeros(len(basis), dtype=complex)
    amp[basis.index(index_set)] = 1
    return PureState(basis, amp)


def test_unfold_fermi_sign_example():
    A = unfold(unit(enumerate_basis(4, 2, "fermi"), (1, 2)), 1)
    nz = {tuple(int(x) for x in ij): A[ij] for ij in zip(*np.nonzero(A))}
    assert nz == {(0, 1): 1, (1, 0): -1}


def test_unfold_bose_sigma_example():
    A = unfold(unit(enumerate_basis(2, 2, "bose"), (1, 1)), 1)
    assert A[0, 0] == pytest.approx(math.sqrt(2))
    assert np.count_nonzero(A) == 1


@pytest.mark.parametrize("q,n,m,stat", CONFIGS)
def test_rdm_paths_agree_and_trace_one(q, n, m, stat):
    P = build_projectors(q, n, m, stat)
    psi = PureState(P.basis_n, random_state(P.N, substream(1, q, n, m)))
    rho = compute_rdm(psi, P)
    assert np.max(np.abs(rho - rdm_from_unfolding(psi, m))) <= 1e-12
    assert np.trace(rho) == pytest.approx(1, abs=1e-12)
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
    assert np.min(np.linalg.eigvalsh(rho)) >= -1e-12


@pytest.mark.parametrize("q,n,m,stat", CONFIGS)
def test_energy_closure_and_shift(q, n, m, stat):
    P = build_projectors(q, n, m, stat)
    rng = substream(2, q, n, m)
    Hm = random_hermitian(P.NA, rng)
    psi = random_state(P.N, rng)
    E = energy(psi, Hm, P)
    assert abs(E - expectation(psi, Hm, P)) <= 1e-10
    assert energy(psi, np.eye(P.NA), P) == pytest.approx(1, abs=1e-12)
    assert energy(psi, Hm + 0.7 * np.eye(P.NA), P) == pytest.approx(E + 0.7, abs=1e-12)


def test_energy_of_eigenpairs():
    P = build_projectors(2, 6, 2, "bose")
    Hm = random_hermitian(P.NA, 4)
    w, V = hermitian_eig(assemble_hamiltonian(Hm, P))
    for k in range(P.N):
        assert abs(energy(V[:, k], Hm, P) - w[k]) <= 1e-10


def test_energy_rejects_non_hermitian():
    P = build_projectors(2, 2, 1, "bose")
    with pytest.raises(ValueError):
        energy(random_state(3, 0), np.array([[0, 1], [0, 0]]), P)


@pytest.mark.parametrize("q,n,m,stat", CONFIGS)
def test_jacobian_matches_finite_differences(q, n, m, stat):
    from eigenmoduli.moduli import build_jacobian
    P = build_projectors(q, n, m, stat)
    psi = random_state(P.N, substream(3, q, n, m))
    J_fd = wirtinger_jacobian(lambda v: compute_rdm(v, P), psi)
    assert np.max(np.abs(build_jacobian(psi, P).matrix - J_fd)) <= 1e-9


def test_bipartite_examples():
    Psi = np.eye(2) / math.sqrt(2)
    assert np.allclose(bipartite_rdm(Psi), np.eye(2) / 2)
    rng = np.random.default_rng(0)
    Psi = planted_rank_state(3, 4, 2, rng)
    assert np.linalg.matrix_rank(Psi) == 2
    assert cokernel(bipartite_jacobian(Psi)).dim == 1
    prod = planted_rank_state(3, 5, 1, rng)
    assert cokernel(bipartite_jacobian(prod)).dim == 4


def test_bipartite_jacobian_matches_finite_differences():
    Psi = planted_rank_state(2, 3, 2, np.random.default_rng(5))
    J_fd = wirtinger_jacobian(lambda v: bipartite_rdm(v.reshape(2, 3)), Psi.ravel())
    assert np.max(np.abs(bipartite_jacobian(Psi) - J_fd)) <= 1e-9


def test_bipartite_is_the_m_equals_n_case_with_trivial_partner():
    P = build_projectors(3, 2, 2, "bose")
    psi = random_state(P.N, 7)
    from eigenmoduli.moduli import build_jacobian
    assert np.allclose(build_jacobian(psi, P).matrix, bipartite_jacobian(psi.reshape(-1, 1)))


@pytest.mark.parametrize("NA,NB,expected", [(2, 2, 4), (3, 2, 4), (1, 5, 25), (1, 3, 9)])
def test_commutant_examples(NA, NB, expected):
    assert commutant_dimension(NA, NB) == expected


def test_commutant_cap():
    with pytest.raises(ValueError):
        commutant_dimension(8, 9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 6.28), st.floats(0.1, 10))
def test_cokernel_invariant_under_phase_and_scale(seed, phase, scale):
    from eigenmoduli.moduli import build_jacobian
    P = build_projectors(2, 4, 2, "bose")
    w, V = hermitian_eig(assemble_hamiltonian(random_hermitian(P.NA, seed), P))
    psi = V[:, 0]
    base = cokernel(build_jacobian(psi, P)).dim
    assert cokernel(build_jacobian(scale * np.exp(1j * phase) * psi, P)).dim == base == 1


def test_pure_state_validation():
    b = enumerate_basis(2, 2, "bose")
    with pytest.raises(ValueError):
        PureState(b, np.ones(4))
    with pytest.raises(ValueError):
        PureState(b, np.zeros(3)).require_unit()
    P = build_projectors(2, 3, 1, "bose")
    with pytest.raises(ValueError):
        compute_rdm(np.ones(3) / math.sqrt(3), P)
