"""Grid-based KvN dynamics for one degree of freedom."""

from .evolve import (
    DEFAULT_ORDER,
    classical_trajectory,
    default_observables,
    exact_gaussian,
    kernel_delta_check,
    propagate,
    step_plan,
    superposition_demo,
    translate_q,
    transport,
    transport_density,
)
from .flow import FlowMap, classify_hamiltonian
from .grid import (
    KvNState,
    PhaseSpaceGrid,
    density,
    expectation,
    gaussian_amplitude,
    gaussian_state,
    inner,
    norm,
    read_csv,
    relative_l2_error,
    state_header,
    write_csv,
    write_header,
)
from .interp import SplineSampler, prefilter

__all__ = [
    "DEFAULT_ORDER",
    "FlowMap",
    "KvNState",
    "PhaseSpaceGrid",
    "SplineSampler",
    "classical_trajectory",
    "classify_hamiltonian",
    "default_observables",
    "exact_gaussian",
    "density",
    "expectation",
    "gaussian_amplitude",
    "gaussian_state",
    "inner",
    "kernel_delta_check",
    "norm",
    "prefilter",
    "propagate",
    "read_csv",
    "relative_l2_error",
    "state_header",
    "step_plan",
    "superposition_demo",
    "translate_q",
    "transport",
    "transport_density",
    "write_csv",
    "write_header",
]
