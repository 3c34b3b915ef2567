"""Reduced density matrices, Jacobian cokernels and eigenstate varieties."""

__version__ = "0.1.0"

from .fock import Basis, ConcatResult, Statistics, concat_index, enumerate_basis, sigma
from .numkernel import (
    TolerancePolicy,
    determinant,
    hermitian_eig,
    left_nullspace,
    numeric_rank,
    random_hermitian,
    random_state,
    svd_spectrum,
)
from .operators import (
    HamiltonianFamily,
    HubbardSpec,
    ProjectorSet,
    assemble_hamiltonian,
    build_projectors,
    encode_hamiltonian,
    hermitian_generator_basis,
    hubbard_operators,
)
from .rdm import (
    PureState,
    bipartite_jacobian,
    bipartite_rdm,
    commutant_dimension,
    compute_rdm,
    energy,
    unfold,
)
from .moduli import (
    CokernelReport,
    MinorSampleReport,
    build_jacobian,
    cokernel,
    family_jacobian,
    recover_eta,
    sample_minors,
    span_inclusion,
)
from .varieties import (
    orbital_orthogonality_residual,
    plucker_residual,
    slater_embed,
    strata_probe,
    symmetric_product_embed,
    veronese_residual,
)
from .scan import ScanReport, eigenstate_scan

__all__ = [
    "Basis",
    "ConcatResult",
    "Statistics",
    "concat_index",
    "enumerate_basis",
    "sigma",
    "TolerancePolicy",
    "determinant",
    "hermitian_eig",
    "left_nullspace",
    "numeric_rank",
    "random_hermitian",
    "random_state",
    "svd_spectrum",
    "HamiltonianFamily",
    "HubbardSpec",
    "ProjectorSet",
    "assemble_hamiltonian",
    "build_projectors",
    "encode_hamiltonian",
    "hermitian_generator_basis",
    "hubbard_operators",
    "PureState",
    "bipartite_jacobian",
    "bipartite_rdm",
    "commutant_dimension",
    "compute_rdm",
    "energy",
    "unfold",
    "CokernelReport",
    "MinorSampleReport",
    "build_jacobian",
    "cokernel",
    "family_jacobian",
    "recover_eta",
    "sample_minors",
    "span_inclusion",
    "orbital_orthogonality_residual",
    "plucker_residual",
    "slater_embed",
    "strata_probe",
    "symmetric_product_embed",
    "veronese_residual",
    "ScanReport",
    "eigenstate_scan",
]
