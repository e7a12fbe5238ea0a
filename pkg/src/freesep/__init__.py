"""Free group toolkit for an isolated subgroup that no nilpotent quotient separates."""
from .words import (
    Alphabet,
    Letter,
    Word,
    apply_endomorphism,
    commutator,
    cyclically_reduce,
    inverse,
    multiply,
    nonseparable_subgroup_generators,
    power,
    reduce,
)
from .stallings import PermutationRep, SubgroupGraph, build, contains, index_info, separating_permutation_rep
from .magnus import TruncatedSeries, in_gamma, lcs_weight, magnus, series_mul
from .lcs_witness import WitnessReport, abelianize, lattice_contains, nilpotent_image_equality, witness
from .isolation import ScanBounds, Violation, isolation_scan, p_prime_isolation_scan
from .pgroups import FiniteGroup, Homomorphism, SeparabilityReport, closure, evaluate, separability_scan

__version__ = "0.1.0"
