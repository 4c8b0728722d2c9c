"""Forensics for compromised enterprise cloud accounts.

Classifies login events as attacker or benign against per-user historical
profiles, evaluates the rule set with session-level ground-truth indicators,
and computes attacker-behavior analytics (dwell time, access modality,
attribute-similarity splits, stability ratios, application usage). A
deterministic synthetic-corpus generator provides end-to-end oracles.
"""

from .analytics import (
    AttributeSets,
    CaseReport,
    Mode,
    access_rate,
    app_usage,
    breach_overlap,
    build_case_report,
    dedup_sample,
    dwell_time,
    ecdf,
    jaccard,
    max_interarrival,
    phish_gap,
    segment_mode,
    sensitive_ops,
    split_analysis,
    stability_ratio,
)
from .events import (
    AuditEvent,
    CompromiseCase,
    EmailRecord,
    RejectRecord,
    build_cases,
    iter_corpus,
    parse_corpus,
    parse_timestamp,
    serialize_events,
)
from .geo import GeoInfo, GeoTable, NotFound, enrich, resolve
from .profiles import (
    FeatureVector,
    HistoricalProfile,
    InsufficientHistory,
    Label,
    LabeledEvent,
    Phase,
    build_profile,
    classify,
    classify_case,
    extract_features,
)
from .sessions import (
    EvalMetrics,
    IndicatorSet,
    ManualOverride,
    Session,
    compute_indicators,
    evaluate,
    expected_travel_time,
    ground_truth,
    home_territory,
    sessionize,
)
from .synth import Archetype, ScenarioSpec, UserSpec, generate, paper_mix_spec, write_corpus
from .ua import EmptyUserAgent, normalize_ua

__version__ = "0.1.0"
