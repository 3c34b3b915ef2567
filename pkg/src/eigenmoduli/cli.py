"""Command-line driver.

Exit codes: 0 success, 1 usage or input error, 2 a certification check failed.
Every report embeds the config it was produced from; ``replay`` re-runs it.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .fock import enumerate_basis
from .moduli import build_jacobian, cokernel, family_jacobian, sample_minors
from .numkernel import (
    TolerancePolicy,
    complex_gaussian,
    hermitian_eig,
    numeric_rank,
    random_hermitian,
    substream,
)
from .operators import HubbardSpec, assemble_hamiltonian, build_projectors, hubbard_operators
from .rdm import PureState, bipartite_jacobian, commutant_dimension, compute_rdm, planted_rank_state
from .scan import eigenstate_scan
from .selftest import run_selftest
from .varieties import (
    orbital_orthogonality_residual,
    plucker_residual,
    random_orbitals,
    slater_embed,
    strata_probe,
    symmetric_product_embed,
    veronese_residual,
)

MINOR_TOL = 1e-8


def _policy(cfg) -> TolerancePolicy:
    return TolerancePolicy(cfg.get("tol", 1e-9), cfg.get("abs_floor", 1e-14))


def _state_and_projectors(cfg):
    psi = io.load_state(cfg["state"])
    return psi, build_projectors(psi.q, psi.n, cfg["m"], psi.statistics)


def _jacobian_from_cfg(cfg):
    psi = io.load_state(cfg["state"])
    if cfg.get("family"):
        return psi, family_jacobian(psi, io.family_from_dict(io.read_json(cfg["family"]), cfg["family"]))
    if cfg.get("m") is None:
        raise ValueError("--m is required unless --family is given")
    return psi, build_jacobian(psi, build_projectors(psi.q, psi.n, cfg["m"], psi.statistics))


def cmd_basis(cfg):
    basis = enumerate_basis(cfg["q"], cfg["k"], cfg["stat"])
    return {"basis": basis.to_dict(), "size": len(basis)}, True


def cmd_projectors(cfg):
    P = build_projectors(cfg["q"], cfg["n"], cfg["m"], cfg["stat"], physics_trace=cfg["physics_trace"])
    return io.projectors_to_dict(P), True


def cmd_rdm(cfg):
    psi, P = _state_and_projectors(cfg)
    rho = compute_rdm(psi, P)
    return {"m": P.m, "trace_convention": "unit", "trace": float(np.trace(rho).real),
            "rdm": io.encode_matrix(rho)}, True


def cmd_diag(cfg):
    P = build_projectors(cfg["q"], cfg["n"], cfg["m"], cfg["stat"])
    if cfg.get("hamiltonian"):
        Hm, _ = io.hamiltonian_from_dict(io.read_json(cfg["hamiltonian"]), cfg["hamiltonian"])
        if Hm.shape != (P.NA, P.NA):
            raise ValueError(f"Hamiltonian is {Hm.shape}, expected {(P.NA, P.NA)}")
    else:
        if cfg.get("seed") is None:
            raise ValueError("diag needs --hamiltonian or --seed")
        Hm = random_hermitian(P.NA, substream(cfg["seed"], 0, 0))
    w, V = hermitian_eig(assemble_hamiltonian(Hm, P))
    out = {"hamiltonian": io.hamiltonian_to_dict(Hm, P), "eigenvalues": [float(x) for x in w]}
    if cfg.get("vectors"):
        out["eigenvectors"] = [io.encode_vector(V[:, k]) for k in range(P.N)]
    return out, True


def cmd_jacobian(cfg):
    _, J = _jacobian_from_cfg(cfg)
    return {"kind": J.kind, "meta": J.meta, "shape": list(J.shape), "matrix": io.encode_matrix(J.matrix)}, True


def cmd_cokernel(cfg):
    _, J = _jacobian_from_cfg(cfg)
    rep = cokernel(J, _policy(cfg))
    return {"kind": J.kind, "cokernel": rep.to_dict(include_basis=True)}, True


def cmd_minors(cfg):
    _, J = _jacobian_from_cfg(cfg)
    rep = sample_minors(J, cfg["count"], cfg["seed"], exhaustive=cfg["exhaustive"])
    return {"kind": J.kind, "shape": list(J.shape), "minors": rep.to_dict()}, True


def _require_generated(cfg, command):
    missing = [f"--{k}" for k in ("q", "n", "seed") if cfg.get(k) is None]
    if missing:
        raise ValueError(f"{command} needs --state or all of {', '.join(missing)}")


def cmd_plucker(cfg):
    if cfg.get("state"):
        psi = io.load_state(cfg["state"])
        res = plucker_residual(psi)
        return {"plucker_residual": res}, True
    _require_generated(cfg, "plucker")
    rng = substream(cfg["seed"], 0, 0)
    orbitals = random_orbitals(cfg["q"], cfg["n"], rng)
    psi = slater_embed(orbitals)
    control = PureState.normalized(psi.basis, complex_gaussian(rng, len(psi.basis)))
    res = plucker_residual(psi)
    out = {
        "state": io.state_to_dict(psi),
        "plucker_residual": res,
        "orbital_orthogonality_residual": orbital_orthogonality_residual(orbitals),
        "control_plucker_residual": plucker_residual(control),
    }
    return out, res <= 1e-12


def cmd_veronese(cfg):
    if cfg.get("state"):
        return {"veronese_residual": veronese_residual(io.load_state(cfg["state"]))}, True
    _require_generated(cfg, "veronese")
    rng = substream(cfg["seed"], 0, 0)
    psi = symmetric_product_embed(complex_gaussian(rng, cfg["q"]), cfg["n"])
    control = PureState.normalized(psi.basis, complex_gaussian(rng, len(psi.basis)))
    res = veronese_residual(psi)
    P1 = build_projectors(cfg["q"], cfg["n"], 1, "bose")
    dim = cokernel(build_jacobian(psi, P1), _policy(cfg)).dim
    out = {
        "state": io.state_to_dict(psi),
        "veronese_residual": res,
        "control_veronese_residual": veronese_residual(control),
        "coker_dim_m1": dim,
        "expected_coker_dim_m1": (cfg["q"] - 1) ** 2,
    }
    return out, res <= 1e-12 and dim == (cfg["q"] - 1) ** 2


def cmd_scan(cfg):
    rep = eigenstate_scan(cfg["q"], cfg["n"], cfg["m"], cfg["stat"], cfg["trials"], cfg["seed"],
                          _policy(cfg), controls=cfg.get("controls"), workers=cfg.get("workers", 1))
    if cfg.get("format") == "csv":
        return rep.to_csv(), rep.passed
    return rep.to_dict(), rep.passed


def cmd_strata(cfg):
    rs = [cfg["r"]] if cfg.get("r") else list(range(1, min(cfg["q"], cfg["n"]) + 1))
    reports = [strata_probe(cfg["q"], cfg["n"], r, cfg["seed"], cfg["samples"], _policy(cfg)) for r in rs]
    maxima = [max(rep.coker_dims) for rep in reports]
    monotone = all(a >= b for a, b in zip(maxima, maxima[1:]))
    out = {"strata": [rep.to_dict() for rep in reports], "max_dim_by_r": maxima,
           "monotone_non_increasing": monotone}
    return out, all(rep.matches_expected for rep in reports)


def cmd_hubbard(cfg):
    policy = _policy(cfg)
    results, ok = [], True
    for U in cfg["U"]:
        spec = HubbardSpec(cfg["L"], cfg["electrons"], cfg["boundary"], cfg["t"], U)
        family, basis = hubbard_operators(spec)
        w, V = hermitian_eig(spec.t * family.operators[1] + spec.U * family.operators[2])
        states = []
        for k in range(len(basis)):
            J = family_jacobian(V[:, k], family)
            eta = np.array([-w[k], spec.t, spec.U])
            rank = numeric_rank(J.matrix, policy)
            minors = sample_minors(J, cfg["count"], cfg["seed"] + k)
            states.append({"index": k, "energy": float(w[k]), "rank": rank,
                           "max_minor": minors.max,
                           "eta_residual": float(np.linalg.norm(eta @ J.matrix))})
            ok &= rank <= 2 and minors.max <= MINOR_TOL
        results.append({"U": U, "eigenstates": states})
    family, basis = hubbard_operators(HubbardSpec(cfg["L"], cfg["electrons"], cfg["boundary"]))
    rng = substream(cfg["seed"], 1, 0)
    ranks = []
    for _ in range(cfg["controls"]):
        x = rng.standard_normal(len(basis))
        ranks.append(numeric_rank(family_jacobian(x / np.linalg.norm(x), family).matrix, policy))
    ok &= all(r == 3 for r in ranks)
    return {"N": len(basis), "results": results, "control_ranks": ranks}, ok


def cmd_bipartite(cfg):
    NA, NB = cfg["na"], cfg["nb"]
    if NA > NB:
        raise ValueError("bipartite warm-up requires N_A <= N_B")
    rows, ok = [], True
    for r in range(1, NA + 1):
        Psi = planted_rank_state(NA, NB, r, substream(cfg["seed"], 0, r))
        dim = cokernel(bipartite_jacobian(Psi), _policy(cfg)).dim
        rows.append({"rank": r, "coker_dim": dim, "expected": (NA - r) ** 2})
        ok &= dim == (NA - r) ** 2
    out = {"planted": rows}
    if NA * NB <= 64:
        c = commutant_dimension(NA, NB)
        out["commutant_dimension"] = c
        ok &= c == NB ** 2
    return out, ok


def cmd_selftest(cfg):
    results = run_selftest("printed" if cfg.get("corrupt_sigma") else "trace")
    width = max(len(r["check"]) for r in results)
    for r in results:
        print(f"{r['check']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  {r['value']}", file=sys.stderr)
    return {"checks": results}, all(r["passed"] for r in results)


HANDLERS = {
    "basis": cmd_basis,
    "projectors": cmd_projectors,
    "rdm": cmd_rdm,
    "diag": cmd_diag,
    "jacobian": cmd_jacobian,
    "cokernel": cmd_cokernel,
    "minors": cmd_minors,
    "plucker": cmd_plucker,
    "veronese": cmd_veronese,
    "scan": cmd_scan,
    "strata": cmd_strata,
    "hubbard": cmd_hubbard,
    "bipartite": cmd_bipartite,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigenmoduli", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
        return p

    def stat(p):
        p.add_argument("--stat", choices=["bose", "fermi"], default="bose")

    def tol(p):
        p.add_argument("--tol", type=float, default=1e-9, help="relative rank tolerance")
        p.add_argument("--abs-floor", type=float, default=1e-14)

    def state_source(p, m_required=False):
        p.add_argument("--state", required=True, help="state JSON file")
        p.add_argument("--m", type=int, required=m_required)
        p.add_argument("--family", default=None, help="Hamiltonian family JSON file (replaces --m)")

    p = add("basis", "enumerate an occupation basis")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    stat(p)

    p = add("projectors", "build the projection operators P_{I,J}")
    for f in ("q", "n", "m"):
        p.add_argument(f"--{f}", type=int, required=True)
    stat(p)
    p.add_argument("--physics-trace", action="store_true", help="drop the 1/C(n,m) normalization")

    p = add("rdm", "m-particle reduced density matrix of a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("diag", "assemble and diagonalize an m-body Hamiltonian")
    for f in ("q", "n", "m"):
        p.add_argument(f"--{f}", type=int, required=True)
    stat(p)
    p.add_argument("--hamiltonian", default=None, help="m-particle Hamiltonian JSON file")
    p.add_argument("--seed", type=int, default=None, help="draw a GUE Hamiltonian instead")
    p.add_argument("--vectors", action="store_true", help="include eigenvectors")

    p = add("jacobian", "Jacobian of the RDM map or of a family")
    state_source(p)

    p = add("cokernel", "cokernel report of the Jacobian")
    state_source(p)
    tol(p)

    p = add("minors", "sample Hadamard-normalized maximal minors")
    state_source(p)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true")

    p = add("plucker", "Slater embedding and Plücker residual")
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--state", default=None)

    p = add("veronese", "rank-1 bosonic embedding and Veronese residual")
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--state", default=None)
    tol(p)

    p = add("scan", "exact-diagonalization eigenstate cokernel scan")
    for f in ("q", "n", "m"):
        p.add_argument(f"--{f}", type=int, required=True)
    stat(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--controls", type=int, default=None, help="random control states (default: trials)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    tol(p)

    p = add("strata", "cokernel dimensions of bosonic rank-r product states (m=1)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=None, help="single rank (default: all)")
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    tol(p)

    p = add("hubbard", "Hubbard family Jacobian ranks and minors")
    p.add_argument("--L", type=int, default=4)
    p.add_argument("--electrons", type=int, default=3)
    p.add_argument("--boundary", choices=["open", "periodic"], default="periodic")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--U", type=float, nargs="+", default=[0.0, 1.0, 4.0])
    p.add_argument("--count", type=int, default=100, help="minor samples per eigenstate")
    p.add_argument("--controls", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    tol(p)

    p = add("bipartite", "bipartite warm-up: planted ranks and commutant")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    tol(p)

    p = add("selftest", "run the fixed-seed invariant suite")
    p.add_argument("--corrupt-sigma", action="store_true",
                   help="debug: use the reciprocal boson sigma (must fail)")

    p = sub.add_parser("replay", help="re-run a report from its embedded config")
    p.add_argument("report")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--check", action="store_true", help="exit 2 unless the re-run is byte-identical")
    return parser


def config_from_args(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("command", "output")}


def render(command: str, cfg: dict) -> tuple[str, bool]:
    payload, ok = HANDLERS[command](cfg)
    if isinstance(payload, str):
        return payload, ok
    report = io.report_header(command, cfg)
    report["passed"] = bool(ok)
    report["result"] = payload
    return io.dumps(report), ok


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            original = open(args.report).read()
            data = io.read_json(args.report)
            if "command" not in data or "config" not in data:
                raise io.SchemaError(args.report, "not a report (missing command/config)")
            text, ok = render(data["command"], data["config"])
            _emit(text, args.output)
            if args.check and text != original:
                print(f"replay of {args.report} differs from the original", file=sys.stderr)
                return 2
            return 0 if ok else 2
        cfg = config_from_args(args)
        text, ok = render(args.command, cfg)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(text, args.output)
    if not ok:
        print(f"{args.command}: certification check failed", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
