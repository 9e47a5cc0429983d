"""Finite-dimensional tools for quantum state and Hamiltonian complexity."""
from .errors import GuardError, StabilityError, ValidationError
from .kernels import BACKEND
from .statevec import (
    HermitianOperator,
    PureState,
    QubitPartition,
    fidelity,
    pauli_decompose,
    pauli_matrix,
    reconstruct,
    tensor_product,
)
from .factorize import (
    finest_factorization,
    interaction_partition,
    naive_ham_complexity,
    naive_state_complexity,
)
from .canonical import (
    BasisPermutation,
    SearchLimits,
    apply_permutation,
    conjugate_hamiltonian,
    true_ham_complexity,
    true_state_complexity,
)
from .grover import GsaParams, grover_iterate, gsa_state, q_probe, two_value_certificate
from .budget import Budget, TruncationPolicy, accuracy_for, truncated_evolve
from .discrete import Grid, momentum_operator, qft
from .oscillators import OscillatorChain, decouple

__version__ = "0.1.0"
