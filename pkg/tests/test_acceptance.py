"""Acceptance criteria, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""

import json

import numpy as np
import pytest

from eigenmoduli.cli import main
from eigenmoduli.moduli import (
    build_jacobian,
    cokernel,
    family_jacobian,
    sample_minors,
    span_inclusion,
    subspace_alignment,
)
from eigenmoduli.numkernel import (
    complex_gaussian,
    hermitian_eig,
    numeric_rank,
    random_hermitian,
    random_state,
    random_unitary,
    substream,
)
from eigenmoduli.operators import HubbardSpec, assemble_hamiltonian, build_projectors, hubbard_operators
from eigenmoduli.rdm import bipartite_jacobian, commutant_dimension, compute_rdm, energy, expectation, planted_rank_state
from eigenmoduli.scan import eigenstate_scan
from eigenmoduli.selftest import FD_CONFIGS, jacobian_fd_residual
from eigenmoduli.varieties import (
    plucker_residual,
    random_orbitals,
    slater_embed,
    symmetric_product_embed,
    veronese_residual,
)

SEED = 2024
SCAN_CONFIGS = [(2, 4), (2, 6), (2, 8), (3, 6), (3, 8)]


@pytest.fixture(scope="module")
def scans():
    return {(q, n): eigenstate_scan(q, n, 2, "bose", trials=20, seed=SEED, controls=100)
            for q, n in SCAN_CONFIGS}


def test_criterion_1_eigenstate_cokernel(scans, record_property):
    eig_dims, ctl_dims, skipped = set(), set(), 0
    for rep in scans.values():
        for r in rep.records:
            if r["degenerate"]:
                skipped += 1
            else:
                eig_dims.add(r["coker_dim"])
        ctl_dims.update(c["coker_dim"] for c in rep.controls)
    record_property("measured", f"eigenstate dims {sorted(eig_dims)}, control dims {sorted(ctl_dims)}, "
                                f"degenerate skipped {skipped}")
    assert eig_dims == {1}
    assert ctl_dims == {0}


def test_criterion_2_infeasible_baseline(record_property):
    rep = eigenstate_scan(3, 4, 2, "bose", trials=20, seed=SEED, controls=100)
    ctl = sorted({c["coker_dim"] for c in rep.controls})
    min_excess = min(r["excess"] for r in rep.records if not r["degenerate"])
    record_property("measured", f"control dims {ctl} (rows 36, cols 30), eigenstate min excess {min_excess}")
    assert min_excess >= 1
    assert ctl == [36 - 30]


def test_criterion_3_hamiltonian_recovery(scans, record_property):
    worst = min(r["eta_alignment"] for rep in scans.values() for r in rep.records if not r["degenerate"])
    record_property("measured", f"min alignment 1 - {1 - worst:.2e}")
    assert worst >= 1 - 1e-8


def test_criterion_4_minor_conditions(record_property):
    P = build_projectors(2, 6, 2, "bose")
    eig_max = 0.0
    for t in range(5):
        w, V = hermitian_eig(assemble_hamiltonian(random_hermitian(P.NA, substream(SEED, 4, t)), P))
        for k in range(P.N):
            J = build_jacobian(V[:, k], P)
            eig_max = max(eig_max, sample_minors(J, 100, seed=SEED + k).max)
    pooled, per_state = [], []
    for c in range(100):
        rep = sample_minors(build_jacobian(random_state(P.N, substream(SEED, 5, c)), P), 100, seed=SEED + c)
        pooled.extend(rep.normalized_abs_dets)
        per_state.append(rep.median)
    median = float(np.median(pooled))
    record_property("measured", f"eigenstate max {eig_max:.1e}, control median {median:.2e} "
                                f"(lowest per-state median {min(per_state):.2e})")
    assert eig_max <= 1e-8
    assert median >= 1e-3


def test_criterion_5_plucker_and_slater(record_property):
    residual = 0.0
    for q, n in [(4, 2), (5, 2), (6, 3)]:
        for s in range(5):
            residual = max(residual, plucker_residual(slater_embed(random_orbitals(q, n, substream(SEED, 6, q, s)))))
    q, n = 6, 3
    P = build_projectors(q, n, 1, "fermi")
    dims, worst = [], 1.0
    for s in range(5):
        U = random_unitary(q, substream(SEED, 7, s))
        h = U @ np.diag(np.arange(1.0, q + 1)) @ U.conj().T
        psi = slater_embed(U[:, :n])
        rep = cokernel(build_jacobian(psi, P))
        dims.append(rep.dim)
        worst = min(worst, subspace_alignment(rep.basis, h - energy(psi, h, P) * np.eye(q)))
    record_property("measured", f"Plücker residual {residual:.1e}, Slater coker dims {sorted(set(dims))}, "
                                f"1-body alignment 1 - {1 - worst:.1e}")
    assert residual <= 1e-12
    assert min(dims) >= 1
    assert worst >= 1 - 1e-8


def test_criterion_6_veronese_and_strata(record_property):
    residual, dims = 0.0, {}
    for q in (2, 3):
        for n in (4, 6):
            P = build_projectors(q, n, 1, "bose")
            for s in range(5):
                psi = symmetric_product_embed(complex_gaussian(substream(SEED, 8, q, n, s), q), n)
                residual = max(residual, veronese_residual(psi))
                dims.setdefault((q, n), set()).add(cokernel(build_jacobian(psi, P)).dim)
    record_property("measured", f"Veronese residual {residual:.1e}, dims "
                                + ", ".join(f"q={q} n={n}: {sorted(d)}" for (q, n), d in dims.items()))
    assert residual <= 1e-12
    for (q, n), d in dims.items():
        assert d == {(q - 1) ** 2}


def test_criterion_7_bipartite(record_property):
    bad = []
    for NA, NB in [(2, 3), (3, 4)]:
        for r in range(1, NA + 1):
            for s in range(3):
                dim = cokernel(bipartite_jacobian(planted_rank_state(NA, NB, r, substream(SEED, 9, NA, r, s)))).dim
                if dim != (NA - r) ** 2:
                    bad.append((NA, NB, r, dim))
    comm = {(NA, NB): commutant_dimension(NA, NB)
            for NA in range(1, 17) for NB in range(1, 17) if NA * NB <= 16}
    wrong = {k: v for k, v in comm.items() if v != k[1] ** 2}
    record_property("measured", f"corank mismatches {bad}, commutant mismatches {wrong} of {len(comm)}")
    assert not bad
    assert not wrong


def test_criterion_8_hubbard(record_property):
    worst_rank, worst_minor = 0, 0.0
    for U in (0.0, 1.0, 4.0):
        family, basis = hubbard_operators(HubbardSpec(4, 3, "periodic", 1.0, U))
        assert len(basis) == 56
        w, V = hermitian_eig(family.operators[1] + U * family.operators[2])
        for k in range(len(basis)):
            J = family_jacobian(V[:, k], family)
            worst_rank = max(worst_rank, numeric_rank(J.matrix))
            worst_minor = max(worst_minor, sample_minors(J, 100, seed=SEED + k).max)
    family, basis = hubbard_operators(HubbardSpec(4, 3))
    rng = substream(SEED, 10)
    ranks = set()
    for _ in range(100):
        x = rng.standard_normal(len(basis))
        ranks.add(numeric_rank(family_jacobian(x / np.linalg.norm(x), family).matrix))
    record_property("measured", f"max eigenstate rank {worst_rank}, max minor {worst_minor:.1e}, "
                                f"control ranks {sorted(ranks)}")
    assert worst_rank <= 2
    assert worst_minor <= 1e-8
    assert ranks == {3}


def test_criterion_9_structural(record_property):
    fd = 0.0
    for s in range(50):
        q, n, m, stat = FD_CONFIGS[s % len(FD_CONFIGS)]
        P = build_projectors(q, n, m, stat)
        rng = substream(SEED, 11, s)
        fd = max(fd, jacobian_fd_residual(random_state(P.N, rng), P, rng))
    trace, closure = 0.0, 0.0
    for q, n, m, stat in FD_CONFIGS + [(1, 3, 1, "bose"), (3, 6, 2, "bose"), (3, 8, 2, "bose")]:
        P = build_projectors(q, n, m, stat)
        trace = max(trace, float(np.max(np.abs(sum(P.dense(i, i) for i in range(P.NA)) - np.eye(P.N)))))
        rng = substream(SEED, 12, q, n, m)
        Hm, psi = random_hermitian(P.NA, rng), random_state(P.N, rng)
        closure = max(closure, abs(energy(psi, Hm, P) - expectation(psi, Hm, P)))
        rho = compute_rdm(psi, P)
        closure = max(closure, abs(np.sum(Hm * rho) - np.vdot(psi, assemble_hamiltonian(Hm, P) @ psi)))
    span = 0.0
    for q, n in [(2, 4), (2, 6), (3, 4), (3, 6)]:
        psi = random_state(len(build_projectors(q, n, 1, "bose").basis_n), substream(SEED, 13, q, n))
        J1 = build_jacobian(psi, build_projectors(q, n, 1, "bose"))
        J2 = build_jacobian(psi, build_projectors(q, n, 2, "bose"))
        span = max(span, span_inclusion(J1, J2))
    record_property("measured", f"fd {fd:.1e}, trace {trace:.1e}, closure {closure:.1e}, span {span:.1e}")
    assert fd <= 1e-9
    assert trace <= 1e-12
    assert closure <= 1e-10
    assert span <= 1e-10


def test_criterion_10_determinism(tmp_path, capsys, record_property):
    commands = [
        ["scan", "--q", "2", "--n", "6", "--m", "2", "--trials", "3", "--seed", "7"],
        ["scan", "--q", "3", "--n", "4", "--m", "2", "--trials", "2", "--seed", "7", "--workers", "3"],
        ["hubbard", "--U", "4", "--count", "10", "--controls", "5", "--seed", "1"],
        ["strata", "--q", "3", "--n", "4", "--seed", "3"],
        ["diag", "--q", "3", "--n", "4", "--m", "2", "--seed", "5", "--vectors"],
        ["selftest"],
    ]
    identical = 0
    for k, argv in enumerate(commands):
        path = tmp_path / f"r{k}.json"
        first = main(argv + ["-o", str(path)])
        # --check exits 2 on a byte mismatch, otherwise with the report's own status
        assert main(["replay", str(path), "--check", "-o", str(tmp_path / f"r{k}.again.json")]) == first
        identical += (tmp_path / f"r{k}.again.json").read_bytes() == path.read_bytes()
    capsys.readouterr()
    serial = eigenstate_scan(3, 6, 2, "bose", trials=4, seed=SEED, controls=4, workers=1)
    parallel = eigenstate_scan(3, 6, 2, "bose", trials=4, seed=SEED, controls=4, workers=4)
    same = json.dumps(serial.to_dict()) == json.dumps(parallel.to_dict()) \
        and serial.to_csv() == parallel.to_csv()
    record_property("measured", f"{identical}/{len(commands)} replays byte-identical, serial == parallel: {same}")
    assert identical == len(commands)
    assert same
