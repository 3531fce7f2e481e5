"""Tensor-network-assisted variational eigensolver toolkit.

The Hamiltonian is conjugated classically through a network of two-qubit
unitary blocks (brick-wall or binary tree) while a parametrized circuit
prepares the quantum state; both parameter sets are trained together.
"""

__version__ = "0.1.0"

from .hamiltonians import (
    HamiltonianSpec,
    Mpo,
    build_tfim_1d,
    build_tfim_2d,
    build_tfim_mpo,
    build_time_crystal,
    mpo_to_dense,
)
from .pauli import PauliSum, PauliTerm, decompose_dense, to_dense
from .simulator import AnsatzSpec, NoiseModel, make_template
from .tn_rotation import (
    RotatedHamiltonian,
    TnLayout,
    coefficient_gradients,
    make_layout,
    rotate_hamiltonian,
)

__all__ = [
    "__version__",
    "PauliTerm",
    "PauliSum",
    "to_dense",
    "decompose_dense",
    "build_tfim_1d",
    "build_tfim_2d",
    "build_time_crystal",
    "build_tfim_mpo",
    "mpo_to_dense",
    "Mpo",
    "HamiltonianSpec",
    "TnLayout",
    "RotatedHamiltonian",
    "make_layout",
    "rotate_hamiltonian",
    "coefficient_gradients",
    "AnsatzSpec",
    "NoiseModel",
    "make_template",
]
