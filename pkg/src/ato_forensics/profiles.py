"""Historical user profiles and the two-phase login-classification rule set.

Each compromised account gets a profile built from the month of login
activity ending one month before its first confirmed compromise instant
``t`` (window [t-60d, t-30d)): the set of countries, country subdivisions,
and normalized user agents seen there. Two features are derived per recent
login event:

* geo: 2 when the event's country was never profiled, 1 when the country is
  known but the subdivision is not, 0 otherwise.
* ua: 1 when the normalized user agent was never profiled, 0 otherwise.

The rule set marks an event as attacker activity when geo == 2, or when
geo == 1 and ua == 1. Classification runs in two phases: the month before
``t`` is labeled against the historical profile, then the profile is
augmented with the attributes of that month's benign events and the month
from ``t`` onward is labeled against the augmented profile. Events whose IP
cannot be geolocated are never featurized; they default to benign and carry
an ``unclassifiable`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from typing import Iterable, Sequence

from .constants import SECONDS_PER_MONTH
from .events import AuditEvent, CompromiseCase
from .geo import GeoInfo, NotFound
from .ua import NormalizedUA, normalize_ua

_MONTH = timedelta(seconds=SECONDS_PER_MONTH)

FLAG_UNCLASSIFIABLE = "unclassifiable"


class Label(str, Enum):
    ATTACKER = "attacker"
    BENIGN = "benign"


class Phase(str, Enum):
    PRE_T = "pre_t"
    POST_T = "post_t"


class InsufficientHistory(Exception):
    """The account has no geolocated login events in its historical window."""

    def __init__(self, user_id: str):
        super().__init__(f"no usable historical login events for {user_id}")
        self.user_id = user_id


@dataclass(frozen=True)
class HistoricalProfile:
    """Per-user attribute sets from the pre-compromise window."""

    user_id: str
    window_start: datetime
    window_end: datetime
    countries: frozenset[str]
    subdivisions: frozenset[str]
    user_agents: frozenset[NormalizedUA]

    def has_subdivisions_for(self, country: str) -> bool:
        prefix = country + "-"
        return any(sub.startswith(prefix) for sub in self.subdivisions)

    def augmented(
        self,
        countries: Iterable[str],
        subdivisions: Iterable[str],
        user_agents: Iterable[NormalizedUA],
    ) -> "HistoricalProfile":
        """New profile with additional observed attributes (never in place)."""
        return HistoricalProfile(
            user_id=self.user_id,
            window_start=self.window_start,
            window_end=self.window_end,
            countries=self.countries | frozenset(countries),
            subdivisions=self.subdivisions | frozenset(subdivisions),
            user_agents=self.user_agents | frozenset(user_agents),
        )


@dataclass(frozen=True, slots=True)
class FeatureVector:
    geo: int  # 0, 1, or 2
    ua: int  # 0 or 1


@dataclass(frozen=True, slots=True)
class LabeledEvent:
    """A login event with its features and rule-set verdict."""

    event: AuditEvent
    geo_info: GeoInfo | NotFound
    features: FeatureVector | None
    label: Label
    phase: Phase
    flags: tuple[str, ...] = ()

    @property
    def normalized_ua(self) -> NormalizedUA:
        return normalize_ua(self.event.user_agent)

    @property
    def is_attacker(self) -> bool:
        return self.label is Label.ATTACKER


def build_profile(
    case: CompromiseCase,
    enriched: Sequence[tuple[AuditEvent, GeoInfo | NotFound]],
) -> HistoricalProfile:
    """Collect profile sets from geolocated login events in [t-60d, t-30d).

    Events whose IP did not resolve contribute nothing, not even their user
    agent. Raises InsufficientHistory when the window holds no usable event.
    """
    start, end = case.history_window()
    countries: set[str] = set()
    subdivisions: set[str] = set()
    user_agents: set[str] = set()
    usable = 0
    for event, geo in enriched:
        if not event.is_login or not isinstance(geo, GeoInfo):
            continue
        if not start <= event.timestamp < end:
            continue
        usable += 1
        countries.add(geo.country)
        if geo.subdivision is not None:
            subdivisions.add(geo.subdivision)
        user_agents.add(normalize_ua(event.user_agent))
    if usable == 0:
        raise InsufficientHistory(case.user_id)
    return HistoricalProfile(
        user_id=case.user_id,
        window_start=start,
        window_end=end,
        countries=frozenset(countries),
        subdivisions=frozenset(subdivisions),
        user_agents=frozenset(user_agents),
    )


def extract_features(
    event: AuditEvent, geo: GeoInfo, profile: HistoricalProfile
) -> FeatureVector:
    """Score one geolocated login event against a profile."""
    if geo.country not in profile.countries:
        geo_feature = 2
    elif geo.subdivision is not None:
        geo_feature = 0 if geo.subdivision in profile.subdivisions else 1
    else:
        # Country is profiled but the table gave no subdivision: treat as a
        # new subdivision only when the profile knows this country at
        # subdivision granularity.
        geo_feature = 1 if profile.has_subdivisions_for(geo.country) else 0
    ua_feature = 0 if normalize_ua(event.user_agent) in profile.user_agents else 1
    return FeatureVector(geo=geo_feature, ua=ua_feature)


def classify(features: FeatureVector) -> Label:
    """The rule set: attacker iff geo == 2, or geo == 1 and ua == 1."""
    if features.geo == 2 or (features.geo == 1 and features.ua == 1):
        return Label.ATTACKER
    return Label.BENIGN


def _label_one(
    event: AuditEvent, geo: GeoInfo | NotFound, profile: HistoricalProfile, phase: Phase
) -> LabeledEvent:
    if isinstance(geo, GeoInfo):
        features = extract_features(event, geo, profile)
        return LabeledEvent(event, geo, features, classify(features), phase)
    return LabeledEvent(event, geo, None, Label.BENIGN, phase, (FLAG_UNCLASSIFIABLE,))


def classify_case(
    case: CompromiseCase,
    enriched: Sequence[tuple[AuditEvent, GeoInfo | NotFound]],
) -> list[LabeledEvent]:
    """Label every login event in [t-30d, t+30d] with the two-phase scheme.

    Phase 1 ([t-30d, t)) uses the historical profile unchanged for all of
    its events. The profile is then augmented with the countries,
    subdivisions, and user agents of phase-1 events labeled benign
    (unclassifiable events contribute nothing), and phase 2 ([t, t+30d])
    is labeled against the augmented profile. Output is time-sorted.
    """
    profile = build_profile(case, enriched)
    phase1_start, phase2_end = case.analysis_window()
    t = case.t

    phase1: list[tuple[AuditEvent, GeoInfo | NotFound]] = []
    phase2: list[tuple[AuditEvent, GeoInfo | NotFound]] = []
    for event, geo in enriched:
        if not event.is_login:
            continue
        if phase1_start <= event.timestamp < t:
            phase1.append((event, geo))
        elif t <= event.timestamp <= phase2_end:
            phase2.append((event, geo))

    labeled: list[LabeledEvent] = []
    new_countries: set[str] = set()
    new_subdivisions: set[str] = set()
    new_user_agents: set[str] = set()
    for event, geo in phase1:
        item = _label_one(event, geo, profile, Phase.PRE_T)
        labeled.append(item)
        if item.label is Label.BENIGN and item.features is not None:
            assert isinstance(geo, GeoInfo)
            new_countries.add(geo.country)
            if geo.subdivision is not None:
                new_subdivisions.add(geo.subdivision)
            new_user_agents.add(normalize_ua(event.user_agent))

    augmented = profile.augmented(new_countries, new_subdivisions, new_user_agents)
    for event, geo in phase2:
        labeled.append(_label_one(event, geo, augmented, Phase.POST_T))

    labeled.sort(key=lambda item: (item.event.timestamp, item.event.id))
    return labeled
