"""Exact-diagonalization scan: cokernel dimensions of eigenstates versus random states."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fock import Statistics, basis_size
from .moduli import build_jacobian, cokernel, subspace_alignment
from .numkernel import DEFAULT_POLICY, TolerancePolicy, hermitian_eig, random_hermitian, random_state, substream
from .operators import ProjectorSet, assemble_hamiltonian, build_projectors

MAX_SCAN_DIM = 500
CSV_FIELDS = ("trial", "index", "energy", "gap", "coker_dim", "excess", "eta_alignment")

# substream keys: (seed, TRIAL_STREAM, t) for Hamiltonians, (seed, CONTROL_STREAM, c) for controls
TRIAL_STREAM = 0
CONTROL_STREAM = 1


@dataclass
class ScanReport:
    config: dict
    records: list[dict] = field(default_factory=list)
    controls: list[dict] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.config["rows"] <= self.config["cols"]

    def checks(self, alignment_tol: float = 1e-8) -> dict[str, bool]:
        nondeg = [r for r in self.records if not r["degenerate"]]
        out = {"eigenstate_excess_positive": all(r["excess"] >= 1 for r in nondeg)}
        if self.feasible:
            out["eigenstate_dim_one"] = all(r["coker_dim"] == 1 for r in nondeg)
            out["eta_alignment"] = all(r["eta_alignment"] >= 1 - alignment_tol for r in nondeg)
            out["control_dim_zero"] = all(c["coker_dim"] == 0 for c in self.controls)
        else:
            floor = self.config["rows"] - self.config["cols"]
            out["control_dim_at_shape_floor"] = all(c["coker_dim"] == floor for c in self.controls)
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks().values())

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "records": self.records,
            "controls": self.controls,
            "checks": self.checks(),
            "passed": self.passed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in self.records:
            writer.writerow({k: ("" if r[k] is None else r[k]) for k in CSV_FIELDS})
        return buf.getvalue()


def _nearest_gaps(w: np.ndarray) -> np.ndarray:
    if w.size == 1:
        return np.array([np.inf])
    d = np.diff(w)
    return np.minimum(np.concatenate([[np.inf], d]), np.concatenate([d, [np.inf]]))


def _scan_trial(P: ProjectorSet, seed: int, trial: int, policy: TolerancePolicy,
                degeneracy_gap: float) -> list[dict]:
    Hm = random_hermitian(P.NA, substream(seed, TRIAL_STREAM, trial))
    w, V = hermitian_eig(assemble_hamiltonian(Hm, P))
    gaps = _nearest_gaps(w)
    eye = np.eye(P.NA)
    out = []
    for k in range(P.N):
        rep = cokernel(build_jacobian(V[:, k], P), policy)
        align = subspace_alignment(rep.basis, Hm - w[k] * eye) if rep.dim else 0.0
        out.append({
            "trial": trial,
            "index": k,
            "energy": float(w[k]),
            "gap": None if np.isinf(gaps[k]) else float(gaps[k]),
            "degenerate": bool(gaps[k] < degeneracy_gap),
            "coker_dim": rep.dim,
            "excess": rep.excess,
            "u1_excess": rep.dim - max(0, rep.rows - rep.cols + 1),
            "eta_alignment": align,
            "min_singular_ratio": float(rep.singular_values[-1] / rep.singular_values[0]),
        })
    return out


def _scan_control(P: ProjectorSet, seed: int, c: int, policy: TolerancePolicy) -> dict:
    psi = random_state(P.N, substream(seed, CONTROL_STREAM, c))
    rep = cokernel(build_jacobian(psi, P), policy)
    return {"control": c, "coker_dim": rep.dim, "excess": rep.excess,
            "u1_excess": rep.dim - max(0, rep.rows - rep.cols + 1)}


def eigenstate_scan(q: int, n: int, m: int, statistics, trials: int, seed: int,
                    policy: TolerancePolicy = DEFAULT_POLICY, controls: int | None = None,
                    degeneracy_gap: float = 1e-8, workers: int = 1) -> ScanReport:
    """Diagonalize ``trials`` random m-body Hamiltonians and certify every eigenstate.

    Also evaluates ``controls`` random states (default: ``trials``). Eigenstates
    whose nearest level is closer than ``degeneracy_gap`` are flagged and left
    out of the strict checks. Results do not depend on ``workers``.
    """
    stats = Statistics.parse(statistics)
    N = basis_size(q, n, stats)
    if N > MAX_SCAN_DIM:
        raise ValueError(f"Hilbert dimension {N} exceeds the desk-scale limit {MAX_SCAN_DIM}")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    P = build_projectors(q, n, m, stats)
    controls = trials if controls is None else controls
    config = {
        "q": q, "n": n, "m": m, "statistics": stats.value,
        "trials": trials, "controls": controls, "seed": seed,
        "tolerance": policy.to_dict(), "degeneracy_gap": degeneracy_gap,
        "N": P.N, "N_A": P.NA, "rows": P.NA ** 2, "cols": 2 * P.N,
    }
    report = ScanReport(config)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for chunk in pool.map(lambda t: _scan_trial(P, seed, t, policy, degeneracy_gap), range(trials)):
            report.records.extend(chunk)
        report.controls.extend(pool.map(lambda c: _scan_control(P, seed, c, policy), range(controls)))
    return report
