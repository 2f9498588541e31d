"""querycore: uncertainty-minimizing query selection for conversational recommendation.

The library separates an offline relevance scorer from an online query
loop. Given a frozen score per item, each turn picks the question (about
an item, an attribute, one of its values, or a numeric threshold) whose
expected removal of unchecked relevance mass is largest, applies the
answer, and repeats until a target item is confirmed or the turn budget
runs out.
"""

from .catalog import (
    AttributeSchema,
    Catalog,
    CatalogError,
    Item,
    catalog_from_dict,
    generate_synthetic,
    items_with_value,
    load_catalog,
    save_catalog,
)
from .gain import (
    GainContext,
    GainError,
    attribute_gain,
    dependence_gain,
    dependence_value_gain,
    item_gain,
    propose_threshold,
    threshold_gain,
    value_gain,
)
from .policy import (
    MODES,
    POLICIES,
    PolicyConfig,
    QueryAction,
    ag_select,
    count_entropy,
    me_select,
    select_action,
)
from .scorer import (
    DependenceModel,
    ScoreError,
    ScoreVector,
    cold_start_scores,
    estimate_dependence,
    frequency_scores,
    load_dependence,
    load_scores,
    make_scores,
)
from .session import (
    Answer,
    AnswerError,
    Outcome,
    SessionEngine,
    SessionState,
    Transcript,
    apply_answer,
    initial_state,
    run_session,
    uncertainty,
    write_transcripts,
)
from .simulator import (
    MetricsReport,
    SimulatedUser,
    compute_metrics,
    fixed_catalog_source,
    make_answer_source,
    metric_for,
    render_table,
    run_benchmark,
    simulate_answer,
    synthetic_catalog_source,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema",
    "Catalog",
    "CatalogError",
    "Item",
    "catalog_from_dict",
    "generate_synthetic",
    "items_with_value",
    "load_catalog",
    "save_catalog",
    "GainContext",
    "GainError",
    "attribute_gain",
    "dependence_gain",
    "dependence_value_gain",
    "item_gain",
    "propose_threshold",
    "threshold_gain",
    "value_gain",
    "MODES",
    "POLICIES",
    "PolicyConfig",
    "QueryAction",
    "ag_select",
    "count_entropy",
    "me_select",
    "select_action",
    "DependenceModel",
    "ScoreError",
    "ScoreVector",
    "cold_start_scores",
    "estimate_dependence",
    "frequency_scores",
    "load_dependence",
    "load_scores",
    "make_scores",
    "Answer",
    "AnswerError",
    "Outcome",
    "SessionEngine",
    "SessionState",
    "Transcript",
    "apply_answer",
    "initial_state",
    "run_session",
    "uncertainty",
    "write_transcripts",
    "MetricsReport",
    "metric_for",
    "SimulatedUser",
    "compute_metrics",
    "fixed_catalog_source",
    "make_answer_source",
    "render_table",
    "run_benchmark",
    "simulate_answer",
    "synthetic_catalog_source",
    "__version__",
]
