"""Classical and quantum Markov networks on small graphs.

Exact, table- and matrix-based tools for checking conditional independence:
Shannon and von Neumann entropies, conditional mutual information,
clique factorizations, Gibbs states of local spin Hamiltonians, and
commutation audits of their terms.
"""

from .errors import CapacityError, DomainError, NumericalError, QGMError, ValidationError
from .graph import (MarkovReport, SeparatorTriple, SiteGraph, maximal_cliques, neighbors,
                    separator_triples)
from .classical import (CliquePotential, JointTable, PairwiseModel, classical_cmi, denoise_demo,
                        hc_factorize, is_markov_network, pairwise_joint, shannon_entropy,
                        sum_product_bp, transfer_matrix_Z)
from .quantum import (DensityMatrix, LocalHamiltonian, PauliTerm, TermGroup, build_hamiltonian,
                      commutation_audit, embed, factorization_gap, five_spin_preset, gibbs_state,
                      is_quantum_markov_network, quantum_cmi, von_neumann_entropy)
from .tensor import eigh, kron, matrix_function, partial_trace

__version__ = "0.1.0"
