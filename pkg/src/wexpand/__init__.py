"""Deterministic W-state preparation via a three-qubit expansion operation.

The package simulates and verifies a mediated-entanglement protocol: a
12-gate circuit on (input1, ancilla, input2) that creates W-type Bell
pairs, grows W states one qubit at a time, and doubles |W_n> to |W_2n>,
plus the fidelity analysis of coherent gate imperfections and the cavity
reflection model realizing the required controlled-Z gate.
"""
from .cavity import (
    CavityParams,
    CzQuality,
    PhasePair,
    cz_quality,
    phase_pair,
    reflection_coupled,
    reflection_uncoupled,
)
from .gates import (
    Gate,
    HADAMARD_ANGLE,
    HolonomicParams,
    IDEAL,
    NoiseParams,
    T_PRIME_ANGLE,
    controlled_phase,
    cz,
    hadamard,
    holonomic_gate,
    hwp_gate,
    phase_aligned_deviation,
    rotation_gate,
    t_prime,
)
from .noise import (
    CALIBRATED_DEFINITION,
    POST_SELECTED_OVERLAP,
    REDUCED_DENSITY,
    FidelityRecord,
    fidelity_closed_form,
    fidelity_combined,
    fidelity_controlled_phase,
    fidelity_hadamard,
    fidelity_t_prime,
    simulate_noisy_fidelity,
    sweep,
)
from .statevec import (
    DensityMatrix,
    MixedStateError,
    QubitPermutation,
    StateVector,
    apply_1q,
    apply_2q,
    apply_controlled,
    basis_state,
    extract_pure,
    fidelity_mixed,
    fidelity_pure,
    operation_matrix,
    partial_trace,
    permute,
    postselect_zero,
    tensor,
    zero_state,
)
from .wcircuit import (
    AncillaStateError,
    BLOCK_MODE_MAX_N,
    EXPANSION_MATRIX,
    PHOTON,
    SEQUENTIAL_MODE_MAX_N,
    SPIN,
    CircuitStep,
    DoublingPlan,
    ExpansionCircuit,
    LabeledState,
    QubitRole,
    RunReport,
    apply_O,
    build_w_state,
    create_epr,
    double_w,
    expand_by_one,
    interleave_permutation,
    relabel,
    standard_expansion_circuit,
)

__version__ = "0.1.0"
