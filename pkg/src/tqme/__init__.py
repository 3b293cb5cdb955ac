"""Two-photon quantum module evaluation: simulate HOM-based fidelity estimation of
optical (and qubit) modules, from Choi encoding to sample-count planning."""

__version__ = "0.1.0"

from .choi import (ChoiState, FidelityReport, choi_overlap, encode_choi, fidelity_chain,
                   fidelity_from_bunching, phase_family_a, phase_family_column)
from .hom import bunching_probability, build_hom_network, classify, evolve, outcome_distribution, product_input
from .linalg import RandomStream, haar_random_unitary, inner_product, is_unitary
from .sampling import (EventTally, FidelityEstimate, SamplePlan, coverage_check, estimate_fidelity,
                       required_samples_analytic, required_samples_empirical, sample_events)

__all__ = [
    "ChoiState", "FidelityReport", "choi_overlap", "encode_choi", "fidelity_chain",
    "fidelity_from_bunching", "phase_family_a", "phase_family_column",
    "bunching_probability", "build_hom_network", "classify", "evolve", "outcome_distribution",
    "product_input", "RandomStream", "haar_random_unitary", "inner_product", "is_unitary",
    "EventTally", "FidelityEstimate", "SamplePlan", "coverage_check", "estimate_fidelity",
    "required_samples_analytic", "required_samples_empirical", "sample_events",
]
