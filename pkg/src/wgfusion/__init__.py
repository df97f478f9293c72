"""Weighted graph states, linear-optical fusion protocols, and projection analysis."""

from __future__ import annotations

from .analysis import (
    EntanglementReport,
    OutcomeClass,
    TwoQubitProjection,
    check_no_good_failure,
    classify_projection,
    entanglement_report,
    hyperbola_projection,
    inner_z,
    max_entangled_family,
    pair_weight_from_projection,
    resulting_weight,
    solve_xi_for_weight,
    tef_unitarity,
    xlike_uniqueness_scan,
    ylike_impossibility_scan,
)
from .errors import WgfError
from .fock import (
    FusionContext,
    FusionOutcome,
    ModeUnitary,
    enumerate_outcomes,
    oracle_enumerate,
    type_i_matrix,
    type_ii_matrix,
)
from .graphstate import (
    LocalGate,
    PureState,
    QubitProjection,
    WeightedGraph,
    apply_local,
    apply_phase_edge,
    attach_vertex,
    build_state,
    chain_graph,
    equal_up_to_prescribed_corrections,
    fidelity_up_to_global_phase,
    project_qubit,
    wrap_angle,
)
from .protocols import (
    ChainState,
    Correction,
    ProtocolOutcome,
    create_logical_qubit,
    fuse_generalized,
    fuse_type_i,
    fuse_type_ii,
    ghz_pair_for_target,
    ghz_pair_projection,
    ghz_pair_range,
    make_chain,
    sample_outcomes,
    weighted_pair_state,
)

__all__ = [
    "ChainState",
    "Correction",
    "EntanglementReport",
    "FusionContext",
    "FusionOutcome",
    "LocalGate",
    "ModeUnitary",
    "OutcomeClass",
    "ProtocolOutcome",
    "PureState",
    "QubitProjection",
    "TwoQubitProjection",
    "WeightedGraph",
    "WgfError",
    "apply_local",
    "apply_phase_edge",
    "attach_vertex",
    "build_state",
    "chain_graph",
    "check_no_good_failure",
    "classify_projection",
    "create_logical_qubit",
    "enumerate_outcomes",
    "entanglement_report",
    "equal_up_to_prescribed_corrections",
    "fidelity_up_to_global_phase",
    "fuse_generalized",
    "fuse_type_i",
    "fuse_type_ii",
    "ghz_pair_for_target",
    "ghz_pair_projection",
    "ghz_pair_range",
    "hyperbola_projection",
    "inner_z",
    "make_chain",
    "max_entangled_family",
    "oracle_enumerate",
    "pair_weight_from_projection",
    "project_qubit",
    "resulting_weight",
    "sample_outcomes",
    "solve_xi_for_weight",
    "tef_unitarity",
    "type_i_matrix",
    "type_ii_matrix",
    "weighted_pair_state",
    "wrap_angle",
    "xlike_uniqueness_scan",
    "ylike_impossibility_scan",
]

__version__ = "0.1.0"
