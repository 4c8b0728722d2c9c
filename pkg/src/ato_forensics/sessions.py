"""Session grouping, ground-truth indicators, and rule-set evaluation metrics.

A session is all of one account's login events sharing an (IP address,
normalized user agent) pair. Under a fixed profile phase every event of a
session gets the same rule label; a session straddling the phase boundary
with differing labels is split at ``t`` so the label stays uniform.

Ground truth per session comes from four indicators: a flagged phishing
email near a session login, an inbox-rule detection near a session login,
an impossible-travel interarrival time, and a Tor exit IP. Any firing
indicator marks the session attacker-related; a manual-override file can
then flip individual sessions, mirroring analyst refinement.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .constants import (
    CRUISE_SPEED_KMH,
    EARTH_RADIUS_KM,
    INDICATOR_WINDOW_SECONDS,
    TRAVEL_OVERHEAD_SECONDS,
)
from .events import AuditEvent, EmailRecord
from .geo import GeoInfo, NotFound
from .profiles import Label, LabeledEvent
from .ua import NormalizedUA

FLAG_NO_HOME = "no_home_territory"
FLAG_NO_HOME_ANCHOR = "no_home_anchor"
FLAG_NO_LOCATION = "no_session_location"
FLAG_MISSING_CENTROID = "missing_centroid"

PROVENANCE_INDICATORS = "indicators"
PROVENANCE_MANUAL = "manual"
PROVENANCE_SIDECAR = "sidecar"

CentroidTable = Mapping[str, tuple[float, float]]


@dataclass
class Session:
    """All login events of one account sharing (client IP, normalized UA)."""

    user_id: str
    client_ip: str
    normalized_ua: NormalizedUA
    events: tuple[LabeledEvent, ...]
    rule_label: Label
    truth_label: Label | None = None
    truth_provenance: str | None = None
    flags: tuple[str, ...] = ()

    @property
    def key(self) -> tuple[str, NormalizedUA]:
        return self.client_ip, self.normalized_ua

    @property
    def first_seen(self) -> datetime:
        return self.events[0].event.timestamp

    def login_times(self) -> list[datetime]:
        return [item.event.timestamp for item in self.events]

    def geo(self) -> GeoInfo | None:
        for item in self.events:
            if isinstance(item.geo_info, GeoInfo):
                return item.geo_info
        return None

    def is_tor(self) -> bool:
        return any(item.geo_info.is_tor for item in self.events)


@dataclass(frozen=True, slots=True)
class IndicatorSet:
    """The four ground-truth indicators for one session."""

    phishing: bool = False
    inbox_rules: bool = False
    interarrival: bool = False
    tor: bool = False
    flags: tuple[str, ...] = ()

    def any(self) -> bool:
        return self.phishing or self.inbox_rules or self.interarrival or self.tor


@dataclass(frozen=True, slots=True)
class ManualOverride:
    user_id: str
    session_ip: str
    session_ua: NormalizedUA
    truth_label: Label
    reason: str = ""


class UnknownSessionOverride(ValueError):
    """An override row references a session that does not exist."""


@dataclass(frozen=True, slots=True)
class EvalMetrics:
    """Confusion-matrix counts with derived ratios (None when undefined)."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def fnr(self) -> float | None:
        return self.fn / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def fpr(self) -> float | None:
        return self.fp / (self.fp + self.tn) if self.fp + self.tn else None

    def as_report_dict(self) -> dict:
        def rounded(value: float | None) -> float | None:
            return None if value is None else round(value, 4)

        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": rounded(self.precision),
            "fpr": rounded(self.fpr),
            "fnr": rounded(self.fnr),
            "recall": rounded(self.recall),
        }


def sessionize(labeled: Sequence[LabeledEvent]) -> list[Session]:
    """Partition one case's labeled login events into sessions.

    Partitioning is by exact (client IP, normalized UA) equality. When the
    phase boundary gave one key differing labels, the key is split into one
    session per phase. Sessions are ordered by first event time.
    """
    groups: dict[tuple[str, str], list[LabeledEvent]] = {}
    for item in labeled:
        assert item.event.is_login
        groups.setdefault((item.event.client_ip, item.normalized_ua), []).append(item)

    sessions: list[Session] = []
    for (ip, nua), items in groups.items():
        labels = {item.label for item in items}
        if len(labels) == 1:
            parts = [items]
        else:
            parts = [part for part in (
                [item for item in items if item.phase.value == phase]
                for phase in ("pre_t", "post_t")
            ) if part]
        for part in parts:
            part_labels = {item.label for item in part}
            assert len(part_labels) == 1, "label not uniform within a phase"
            sessions.append(
                Session(
                    user_id=part[0].event.user_id,
                    client_ip=ip,
                    normalized_ua=nua,
                    events=tuple(part),
                    rule_label=part[0].label,
                )
            )
    sessions.sort(key=lambda s: (s.first_seen, s.client_ip, s.normalized_ua))
    return sessions


def phishing_indicator(
    session: Session,
    emails: Iterable[EmailRecord],
    window: float = INDICATOR_WINDOW_SECONDS,
) -> bool:
    """True iff a flagged phishing email lands within +/-window of a login."""
    times = session.login_times()
    for email in emails:
        if not email.flagged_phishing:
            continue
        if any(abs((email.sent_at - t).total_seconds()) <= window for t in times):
            return True
    return False


def inbox_rules_indicator(
    session: Session,
    detections: Iterable[datetime],
    window: float = INDICATOR_WINDOW_SECONDS,
) -> bool:
    times = session.login_times()
    return any(
        abs((when - t).total_seconds()) <= window
        for when in detections
        for t in times
    )


def tor_indicator(session: Session) -> bool:
    return session.is_tor()


def home_territory(
    enriched: Sequence[tuple[AuditEvent, GeoInfo | NotFound]],
    start: datetime,
    end: datetime,
) -> str | None:
    """Most frequent subdivision among login events in [start, end).

    Ties break to the lexicographically smallest subdivision; None when no
    historical login event carries a subdivision.
    """
    counts: Counter[str] = Counter()
    for event, geo in enriched:
        if not event.is_login or not isinstance(geo, GeoInfo):
            continue
        if geo.subdivision is None or not start <= event.timestamp < end:
            continue
        counts[geo.subdivision] += 1
    if not counts:
        return None
    return min(counts, key=lambda sub: (-counts[sub], sub))


def _haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def expected_travel_time(
    a: str,
    b: str,
    centroids: CentroidTable,
    speed_kmh: float = CRUISE_SPEED_KMH,
    overhead_seconds: float = TRAVEL_OVERHEAD_SECONDS,
) -> float:
    """Seconds to travel between two subdivision centroids.

    Great-circle distance at cruise speed plus a fixed overhead; zero for
    identical subdivisions. Raises KeyError when a centroid is missing.
    """
    if a == b:
        return 0.0
    distance = _haversine_km(centroids[a], centroids[b])
    return distance / speed_kmh * 3600.0 + overhead_seconds


def interarrival_indicator(
    session: Session,
    anchors: Sequence[LabeledEvent],
    home: str | None,
    centroids: CentroidTable | None,
) -> bool:
    """True iff some session login is implausibly close in time to a
    home-territory login given the expected travel time between the two.

    Falls back to False (callers attach a diagnostics flag) when the home
    territory, the session location, a home anchor event, or a centroid is
    unavailable. A session located in the home territory itself can never
    fire: its travel-time threshold is zero.
    """
    fired, _ = _interarrival_with_flags(session, anchors, home, centroids)
    return fired


def _interarrival_with_flags(
    session: Session,
    anchors: Sequence[LabeledEvent],
    home: str | None,
    centroids: CentroidTable | None,
) -> tuple[bool, tuple[str, ...]]:
    if home is None:
        return False, (FLAG_NO_HOME,)
    geo = session.geo()
    if geo is None or geo.subdivision is None:
        return False, (FLAG_NO_LOCATION,)
    home_times = sorted(
        item.event.timestamp
        for item in anchors
        if isinstance(item.geo_info, GeoInfo) and item.geo_info.subdivision == home
    )
    if not home_times:
        return False, (FLAG_NO_HOME_ANCHOR,)
    try:
        threshold = expected_travel_time(home, geo.subdivision, centroids or {})
    except KeyError:
        return False, (FLAG_MISSING_CENTROID,)

    best = math.inf
    for t in session.login_times():
        idx = bisect_left(home_times, t)
        for neighbor in (idx - 1, idx):
            if 0 <= neighbor < len(home_times):
                best = min(best, abs((t - home_times[neighbor]).total_seconds()))
    return best < threshold, ()


def compute_indicators(
    session: Session,
    *,
    emails: Iterable[EmailRecord] = (),
    detections: Iterable[datetime] = (),
    anchors: Sequence[LabeledEvent] = (),
    home: str | None = None,
    centroids: CentroidTable | None = None,
    window: float = INDICATOR_WINDOW_SECONDS,
) -> IndicatorSet:
    interarrival, flags = _interarrival_with_flags(session, anchors, home, centroids)
    return IndicatorSet(
        phishing=phishing_indicator(session, emails, window),
        inbox_rules=inbox_rules_indicator(session, detections, window),
        interarrival=interarrival,
        tor=tor_indicator(session),
        flags=flags,
    )


def ground_truth(session: Session, indicators: IndicatorSet) -> Label:
    """Attacker iff any basic indicator fired."""
    return Label.ATTACKER if indicators.any() else Label.BENIGN


def apply_overrides(
    sessions: Sequence[Session], overrides: Iterable[ManualOverride]
) -> None:
    """Flip truth labels per the manual-override file (in place).

    Raises UnknownSessionOverride when an override matches no session.
    """
    index: dict[tuple[str, str, str], list[Session]] = {}
    for session in sessions:
        index.setdefault(
            (session.user_id, session.client_ip, session.normalized_ua), []
        ).append(session)
    for override in overrides:
        key = (override.user_id, override.session_ip, override.session_ua)
        matched = index.get(key)
        if not matched:
            raise UnknownSessionOverride(
                f"override references unknown session {key}"
            )
        for session in matched:
            session.truth_label = override.truth_label
            session.truth_provenance = PROVENANCE_MANUAL


def load_overrides(path: str | Path) -> list[ManualOverride]:
    """CSV ``user_id,session_ip,session_ua,truth_label,reason``."""
    expected = ["user_id", "session_ip", "session_ua", "truth_label", "reason"]
    overrides = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != expected:
            raise ValueError(f"{path}: expected header {','.join(expected)}")
        for user_id, ip, nua, truth, reason in reader:
            overrides.append(
                ManualOverride(user_id.lower(), ip, nua, Label(truth.lower()), reason)
            )
    return overrides


def load_centroids(path: str | Path) -> dict[str, tuple[float, float]]:
    """CSV ``subdivision,lat,lon``."""
    centroids: dict[str, tuple[float, float]] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["subdivision", "lat", "lon"]:
            raise ValueError(f"{path}: expected header subdivision,lat,lon")
        for subdivision, lat, lon in reader:
            centroids[subdivision] = (float(lat), float(lon))
    return centroids


def evaluate(sessions: Sequence[Session]) -> EvalMetrics:
    """Confusion-matrix counts over sessions carrying both labels."""
    tp = fp = fn = tn = 0
    for session in sessions:
        if session.truth_label is None:
            raise ValueError(f"session {session.key} has no truth label")
        predicted_attack = session.rule_label is Label.ATTACKER
        truly_attack = session.truth_label is Label.ATTACKER
        if predicted_attack and truly_attack:
            tp += 1
        elif predicted_attack:
            fp += 1
        elif truly_attack:
            fn += 1
        else:
            tn += 1
    return EvalMetrics(tp=tp, fp=fp, fn=fn, tn=tn)
