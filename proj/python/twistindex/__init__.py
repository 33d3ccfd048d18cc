"""Exact similarity search for equal-length time series under constrained
time warping: grouped sequential pages pruned by group-envelope lower bounds,
with guaranteed-exact top-k and range queries."""

from ._core import (
    AccessStats,
    ConstraintExpandedEnvelope,
    DistanceParams,
    GlobalConstraint,
    GroupEnvelope,
    Hit,
    IndexConfig,
    LbCounts,
    QueryEnvelope,
    QueryResult,
    SegmentedGroupEnvelope,
    SegmentedSequence,
    TimeSeries,
    TwistError,
    TwistIndex,
    __version__,
    build_group_envelope,
    build_query_envelope,
    default_ladder,
    dtw,
    expand_envelope_by_constraint,
    generate,
    lb_keogh,
    lbg,
    lbg_k,
    lbs,
    make_clustered_dataset,
    page_access_count,
    range_query,
    read_dataset,
    sakoe_chiba,
    segment,
    segment_group_envelope,
    sequential_scan,
    topk_lbg,
    topk_lbgk,
    verify_index,
    write_dataset,
    z_normalize,
)

__all__ = [
    "AccessStats",
    "ConstraintExpandedEnvelope",
    "DistanceParams",
    "GlobalConstraint",
    "GroupEnvelope",
    "Hit",
    "IndexConfig",
    "LbCounts",
    "QueryEnvelope",
    "QueryResult",
    "SegmentedGroupEnvelope",
    "SegmentedSequence",
    "TimeSeries",
    "TwistError",
    "TwistIndex",
    "__version__",
    "build_group_envelope",
    "build_query_envelope",
    "default_ladder",
    "dtw",
    "expand_envelope_by_constraint",
    "generate",
    "lb_keogh",
    "lbg",
    "lbg_k",
    "lbs",
    "make_clustered_dataset",
    "page_access_count",
    "range_query",
    "read_dataset",
    "sakoe_chiba",
    "segment",
    "segment_group_envelope",
    "sequential_scan",
    "topk_lbg",
    "topk_lbgk",
    "verify_index",
    "write_dataset",
    "z_normalize",
]
