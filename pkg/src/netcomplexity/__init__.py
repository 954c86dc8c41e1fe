"""Complexity and information metrics for networked systems.

Public surface: functional topologies and classical graph metrics, the
functional-complexity metric, excess-entropy estimation on channel lattices,
centralized/self-organized channel allocation with exact repair-distance
search, a traffic ABM with event-triggered sensing over a contended MAC,
and a seeded ensemble/correlation harness.
"""

__version__ = "0.1.0"

from .graph import (
    FunctionalTopology,
    InputFormatError,
    SamplingPolicy,
    SubgraphView,
    average_degree,
    average_path_length,
    build_topology,
    clustering_coefficient,
    diameter,
    enumerate_subgraphs,
    is_connected,
    reachability_count,
    read_edge_list,
    sample_stream,
    subgraph_view,
    write_edge_list,
)
from .complexity import (
    ComplexityProfile,
    MeanInformation,
    binary_entropy,
    functional_complexity,
    mean_information,
    subgraph_information,
)
from .entropy import (
    DEFAULT_TEMPLATE,
    EntropyProfile,
    NeighborhoodTemplate,
    conditional_entropy_profile,
    empirical_entropy,
    estimate_excess_entropy,
    excess_entropy,
)
from .lattice import (
    ChannelLattice,
    SonReport,
    StabilityRow,
    StabilityStudy,
    centralized_allocate,
    conflict_count,
    read_lattice,
    repair_distance,
    son_allocate,
    stability_experiment,
    write_lattice,
)
from .abm import (
    PerceptionRecord,
    ScenarioConfig,
    ScenarioResult,
    config_from_mapping,
    gap_comparison,
    mac_comparison_config,
    run_scenario,
)
from .harness import (
    CorrelationReport,
    EnsembleSpec,
    MetricCorrelation,
    ReportRow,
    correlation_report,
    default_ensemble,
    generate_ensemble,
    pearson,
)

__all__ = [
    "__version__",
    # graph
    "FunctionalTopology",
    "InputFormatError",
    "SamplingPolicy",
    "SubgraphView",
    "average_degree",
    "average_path_length",
    "build_topology",
    "clustering_coefficient",
    "diameter",
    "enumerate_subgraphs",
    "is_connected",
    "reachability_count",
    "read_edge_list",
    "sample_stream",
    "subgraph_view",
    "write_edge_list",
    # complexity
    "ComplexityProfile",
    "MeanInformation",
    "binary_entropy",
    "functional_complexity",
    "mean_information",
    "subgraph_information",
    # entropy
    "DEFAULT_TEMPLATE",
    "EntropyProfile",
    "NeighborhoodTemplate",
    "conditional_entropy_profile",
    "empirical_entropy",
    "estimate_excess_entropy",
    "excess_entropy",
    # lattice
    "ChannelLattice",
    "SonReport",
    "StabilityRow",
    "StabilityStudy",
    "centralized_allocate",
    "conflict_count",
    "read_lattice",
    "repair_distance",
    "son_allocate",
    "stability_experiment",
    "write_lattice",
    # abm
    "PerceptionRecord",
    "ScenarioConfig",
    "ScenarioResult",
    "config_from_mapping",
    "gap_comparison",
    "mac_comparison_config",
    "run_scenario",
    # harness
    "CorrelationReport",
    "EnsembleSpec",
    "MetricCorrelation",
    "ReportRow",
    "correlation_report",
    "default_ensemble",
    "generate_ensemble",
    "pearson",
]
