"""JSON encodings: complex numbers as [re, im], matrices row-major in canonical basis order."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .fock import Statistics, enumerate_basis
from .operators import HamiltonianFamily, ProjectorSet
from .rdm import PureState

SIGMA_NOTE = ("bose sigma(I,K) = sqrt(prod_a n_a(IK)! / (n_a(I)! n_a(K)!)); "
              "fermi sigma = sign of the sorting permutation")


class SchemaError(ValueError):
    """Input file does not match the expected JSON schema."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list[list[float]]:
    return [encode_complex(z) for z in np.ravel(v)]


def encode_matrix(M) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(M)]


def _decode_pairs(data, path, what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(path, f"{what} must be numeric [re, im] pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise SchemaError(path, f"{what} must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def decode_vector(data, path="<input>", what="amplitudes") -> np.ndarray:
    v = _decode_pairs(data, path, what)
    if v.ndim != 1:
        raise SchemaError(path, f"{what} must be a list of [re, im] pairs")
    return v


def decode_matrix(data, path="<input>", what="matrix") -> np.ndarray:
    M = _decode_pairs(data, path, what)
    if M.ndim != 2:
        raise SchemaError(path, f"{what} must be a list of rows of [re, im] pairs")
    return M


def report_header(command: str, config: dict) -> dict:
    return {
        "command": command,
        "config": config,
        "library_version": __version__,
        "sigma_convention": SIGMA_NOTE,
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(obj, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)
    return text


def read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(path, f"cannot read file ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"malformed JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(data, dict):
        raise SchemaError(path, "top-level value must be an object")
    return data


def _require(data: dict, keys, path) -> None:
    missing = [k for k in keys if k not in data]
    if missing:
        raise SchemaError(path, f"missing field(s) {missing}")


# States: {"q", "n", "statistics", "amplitudes": [[re, im], ...]}

def state_to_dict(psi: PureState) -> dict:
    return {
        "q": psi.q,
        "n": psi.n,
        "statistics": psi.statistics.value,
        "amplitudes": encode_vector(psi.amplitudes),
    }


def state_from_dict(data: dict, path="<input>", norm_tol: float = 1e-12) -> PureState:
    _require(data, ("q", "n", "statistics", "amplitudes"), path)
    try:
        basis = enumerate_basis(int(data["q"]), int(data["n"]), Statistics.parse(data["statistics"]))
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None
    amp = decode_vector(data["amplitudes"], path)
    if amp.size != len(basis):
        raise SchemaError(path, f"{amp.size} amplitudes for a basis of size {len(basis)}")
    norm = float(np.linalg.norm(amp))
    if abs(norm - 1.0) > norm_tol:
        raise SchemaError(path, f"state is not normalized (norm = {norm:.6g})")
    return PureState(basis, amp)


def load_state(path) -> PureState:
    return state_from_dict(read_json(path), path)


# m-particle Hamiltonians: header {q, n, m, statistics, normalization} + "matrix"

def hamiltonian_to_dict(Hm, P: ProjectorSet) -> dict:
    return {**P.header(), "matrix": encode_matrix(Hm)}


def hamiltonian_from_dict(data: dict, path="<input>") -> tuple[np.ndarray, dict]:
    _require(data, ("q", "n", "m", "statistics", "matrix"), path)
    Hm = decode_matrix(data["matrix"], path)
    if Hm.shape[0] != Hm.shape[1]:
        raise SchemaError(path, f"matrix must be square, got {Hm.shape}")
    if np.max(np.abs(Hm - Hm.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(Hm))):
        raise SchemaError(path, "matrix is not Hermitian")
    header = {k: data[k] for k in ("q", "n", "m", "statistics", "normalization") if k in data}
    return Hm, header


# Families: {"names": [...], "operators": [matrix, ...], "parameters": [...] | null, "header": {...}}

def family_to_dict(family: HamiltonianFamily) -> dict:
    return {
        "header": family.header,
        "names": list(family.names),
        "operators": [encode_matrix(H) for H in family.operators],
        "parameters": None if family.parameters is None else [float(x) for x in family.parameters],
    }


def family_from_dict(data: dict, path="<input>") -> HamiltonianFamily:
    _require(data, ("names", "operators"), path)
    ops = [decode_matrix(op, path, f"operators[{k}]") for k, op in enumerate(data["operators"])]
    params = data.get("parameters")
    try:
        return HamiltonianFamily(list(data["names"]), ops,
                                 None if params is None else np.asarray(params, dtype=float),
                                 dict(data.get("header") or {}))
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def projectors_to_dict(P: ProjectorSet) -> dict:
    pairs = []
    for i in range(P.NA):
        for j in range(P.NA):
            a, b, v = P.triplets(i, j)
            pairs.append({"I": list(P.basis_m[i]), "J": list(P.basis_m[j]),
                          "triplets": [[int(x), int(y), float(z)] for x, y, z in zip(a, b, v)]})
    return {**P.header(), "basis_n": P.basis_n.to_dict(), "basis_m": P.basis_m.to_dict(),
            "projectors": pairs}
