"""Patent-class proximity measures and technology network maps."""

from techmap._core import (
    AgentCooccurrence,
    AgentClassMatrix,
    AggregateBundle,
    Backbone,
    ClassStats,
    ClassUniverse,
    CitationAggregate,
    CoClassCounts,
    Corpus,
    Edge,
    OverlaySet,
    Partition,
    PatentRecord,
    PeriodSpec,
    ProximityMatrix,
    RtaMatrix,
    TechNetwork,
    __version__,
    build_agent_class_matrix,
    build_agent_cooccurrence,
    build_aggregates,
    build_citation_aggregate,
    build_class_stats,
    build_class_universe,
    build_coclass_counts,
    build_network,
    compute_measure,
    compute_rta,
    count_unclassified,
    degree_centrality,
    detect_communities,
    edge_vector,
    eigenvector_centrality,
    export_overlay,
    filter_backbone,
    maximum_spanning_tree,
    measure_name,
    modularity,
    overlay,
    parse_corpus,
    pearson,
    read_matrix,
    run_pipeline,
    slice_period,
    spearman,
    to_dot,
    to_edge_list,
    to_graphml,
    write_corpus,
    write_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
