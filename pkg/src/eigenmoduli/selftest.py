"""Fixed-seed invariant suite behind ``eigenmoduli selftest``."""

from __future__ import annotations

import math

import numpy as np

from .moduli import build_jacobian, cokernel, recover_eta, span_inclusion
from .numkernel import complex_gaussian, random_hermitian, random_state, substream
from .operators import assemble_hamiltonian, build_projectors
from .rdm import (
    PureState,
    bipartite_jacobian,
    commutant_dimension,
    compute_rdm,
    energy,
    planted_rank_state,
)
from .varieties import (
    plucker_residual,
    random_orbitals,
    slater_embed,
    symmetric_product_embed,
    veronese_residual,
)

SEED = 20240611

FD_CONFIGS = [
    (2, 4, 2, "bose"),
    (2, 6, 2, "bose"),
    (3, 4, 1, "bose"),
    (3, 6, 2, "bose"),
    (4, 2, 1, "fermi"),
    (6, 3, 2, "fermi"),
]


def jacobian_fd_residual(psi, P, rng: np.random.Generator, step: float = 1e-6) -> float:
    """|vec(rho(psi + d) - rho(psi)) - J [d; conj d]| for a random d of norm ``step``."""
    amp = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
    d = complex_gaussian(rng, amp.size)
    d *= step / np.linalg.norm(d)
    drho = (compute_rdm(amp + d, P) - compute_rdm(amp, P)).ravel()
    lin = build_jacobian(amp, P).matrix @ np.concatenate([d, d.conj()])
    return float(np.linalg.norm(drho - lin))


def _check_trace_identity(sigma_convention: str) -> tuple[bool, float]:
    worst = 0.0
    for q, n, m, stats in [(2, 4, 2, "bose"), (3, 4, 2, "bose"), (1, 2, 1, "bose"), (4, 2, 1, "fermi")]:
        P = build_projectors(q, n, m, stats, sigma_convention=sigma_convention)
        total = sum(P.dense(i, i) for i in range(P.NA))
        worst = max(worst, float(np.max(np.abs(total - np.eye(P.N)))))
    return worst <= 1e-12, worst


def _check_finite_difference(sigma_convention: str) -> tuple[bool, float]:
    worst = 0.0
    for c, (q, n, m, stats) in enumerate(FD_CONFIGS):
        P = build_projectors(q, n, m, stats, sigma_convention=sigma_convention)
        rng = substream(SEED, 1, c)
        for _ in range(3):
            worst = max(worst, jacobian_fd_residual(random_state(P.N, rng), P, rng))
    return worst <= 1e-9, worst


def _check_energy_closure(sigma_convention: str) -> tuple[bool, float]:
    worst = 0.0
    for c, (q, n, m, stats) in enumerate(FD_CONFIGS):
        P = build_projectors(q, n, m, stats, sigma_convention=sigma_convention)
        rng = substream(SEED, 2, c)
        Hm = random_hermitian(P.NA, rng)
        psi = random_state(P.N, rng)
        H = assemble_hamiltonian(Hm, P)
        worst = max(worst, abs(energy(psi, Hm, P) - np.vdot(psi, H @ psi).real))
    return worst <= 1e-10, worst


def _check_eigenstate_cokernel(sigma_convention: str) -> tuple[bool, float]:
    P = build_projectors(2, 6, 2, "bose", sigma_convention=sigma_convention)
    worst_align = 1.0
    for t in range(3):
        Hm = random_hermitian(P.NA, substream(SEED, 3, t))
        w, V = np.linalg.eigh(assemble_hamiltonian(Hm, P))
        for k in range(P.N):
            if cokernel(build_jacobian(V[:, k], P)).dim != 1:
                return False, float("nan")
            rec = recover_eta(V[:, k], P, hamiltonian=Hm, energy_value=w[k])
            worst_align = min(worst_align, rec.alignment)
    return worst_align >= 1 - 1e-8, worst_align


def _check_plucker() -> tuple[bool, float]:
    worst = 0.0
    for c, (q, n) in enumerate([(4, 2), (5, 2), (6, 3)]):
        psi = slater_embed(random_orbitals(q, n, substream(SEED, 4, c)))
        worst = max(worst, plucker_residual(psi))
    return worst <= 1e-12, worst


def _check_veronese() -> tuple[bool, float]:
    worst = 0.0
    for c, (q, n) in enumerate([(2, 4), (3, 4), (3, 6)]):
        phi = complex_gaussian(substream(SEED, 5, c), q)
        worst = max(worst, veronese_residual(symmetric_product_embed(phi, n)))
    return worst <= 1e-12, worst


def _check_bipartite() -> tuple[bool, float]:
    bad = 0
    for NA, NB in [(2, 3), (3, 4)]:
        for r in range(1, NA + 1):
            Psi = planted_rank_state(NA, NB, r, substream(SEED, 6, NA * 10 + r))
            if cokernel(bipartite_jacobian(Psi)).dim != (NA - r) ** 2:
                bad += 1
    return bad == 0, float(bad)


def _check_commutant() -> tuple[bool, float]:
    bad = sum(commutant_dimension(NA, NB) != NB ** 2
              for NA in range(1, 5) for NB in range(NA, 5) if NA * NB <= 16)
    return bad == 0, float(bad)


def _check_span_inclusion(sigma_convention: str) -> tuple[bool, float]:
    worst = 0.0
    for q, n in [(2, 6), (3, 4)]:
        P1 = build_projectors(q, n, 1, "bose", sigma_convention=sigma_convention)
        P2 = build_projectors(q, n, 2, "bose", sigma_convention=sigma_convention)
        psi = random_state(P1.N, substream(SEED, 7, q))
        worst = max(worst, span_inclusion(build_jacobian(psi, P1), build_jacobian(psi, P2)))
    return worst <= 1e-10, worst


def run_selftest(sigma_convention: str = "trace") -> list[dict]:
    checks = [
        ("trace_identity", lambda: _check_trace_identity(sigma_convention)),
        ("finite_difference_jacobian", lambda: _check_finite_difference(sigma_convention)),
        ("energy_closure", lambda: _check_energy_closure(sigma_convention)),
        ("eigenstate_cokernel", lambda: _check_eigenstate_cokernel(sigma_convention)),
        ("span_inclusion", lambda: _check_span_inclusion(sigma_convention)),
        ("plucker", _check_plucker),
        ("veronese", _check_veronese),
        ("bipartite_corank_squared", _check_bipartite),
        ("commutant_dimension", _check_commutant),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, value = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, value = False, f"{type(exc).__name__}: {exc}"
        if isinstance(value, float) and not math.isfinite(value):
            value = None
        results.append({"check": name, "passed": bool(ok), "value": value})
    return results
