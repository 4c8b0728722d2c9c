"""Per-case and aggregate attacker-behavior analytics.

Everything here consumes the labeled events of one case (or many cases) and
produces plain numbers: dwell time, max interarrival gap, the
end-to-end/segmented access-mode split at the one-day threshold, Jaccard
similarity of attribute sets across the largest gap, the rotating-proxy
stability ratio, application access rates, application/operation usage
summaries, phishing-gap timing, organization-level de-duplication sampling,
breach-list overlap, and ECDF series for distribution reporting.
"""

from __future__ import annotations

import hashlib
import random
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .constants import (
    INDICATOR_WINDOW_SECONDS,
    OP_ADD_OAUTH,
    OP_CHANGE_PASSWORD,
    SECONDS_PER_DAY,
    SECONDS_PER_MONTH,
)
from .events import AuditEvent, CompromiseCase, EmailRecord
from .geo import GeoInfo
from .profiles import Label, LabeledEvent

FLAG_PHISH_BEFORE_ATTACK = "phish_before_first_attacker"

APP_ATTACKER_ONLY = "attacker_only"
APP_BENIGN_ONLY = "benign_only"
APP_BOTH = "both"


class Mode(str, Enum):
    END_TO_END = "end_to_end"
    SEGMENTED = "segmented"
    INDETERMINATE = "indeterminate"


def _seconds(later: datetime, earlier: datetime) -> float:
    return (later - earlier).total_seconds()


def _hour_bucket(event: AuditEvent) -> int:
    return event.epoch // 3600


def dwell_time(attacker_events: Sequence[LabeledEvent]) -> float | None:
    """Seconds between the first and last attacker login (None if none)."""
    if not attacker_events:
        return None
    times = [item.event.timestamp for item in attacker_events]
    return _seconds(max(times), min(times))


def max_interarrival(attacker_events: Sequence[LabeledEvent]) -> float | None:
    """Largest gap between consecutive time-sorted attacker events."""
    if len(attacker_events) < 2:
        return None
    times = sorted(item.event.timestamp for item in attacker_events)
    return max(_seconds(b, a) for a, b in zip(times, times[1:]))


def segment_mode(max_ia: float | None, day_threshold: float = SECONDS_PER_DAY) -> Mode:
    if max_ia is None:
        return Mode.INDETERMINATE
    return Mode.SEGMENTED if max_ia >= day_threshold else Mode.END_TO_END


def jaccard(a: set | frozenset, b: set | frozenset) -> float | None:
    """|a n b| / |a u b|; None when both sets are empty."""
    if not a and not b:
        return None
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class AttributeSets:
    """Subdivision / user-agent / ISP sets drawn from attacker events."""

    subdivisions: frozenset[str]
    user_agents: frozenset[str]
    isps: frozenset[str]

    @classmethod
    def from_events(cls, attacker_events: Iterable[LabeledEvent]) -> "AttributeSets":
        subdivisions: set[str] = set()
        user_agents: set[str] = set()
        isps: set[str] = set()
        for item in attacker_events:
            user_agents.add(item.normalized_ua)
            geo = item.geo_info
            if isinstance(geo, GeoInfo):
                if geo.subdivision is not None:
                    subdivisions.add(geo.subdivision)
                if geo.isp is not None:
                    isps.add(geo.isp)
        return cls(frozenset(subdivisions), frozenset(user_agents), frozenset(isps))


def split_at_max_gap(
    attacker_events: Sequence[LabeledEvent],
) -> tuple[list[LabeledEvent], list[LabeledEvent]]:
    """Split time-sorted attacker events at their largest gap.

    The gap's left endpoint goes to "before", the right endpoint to "after".
    Ties resolve to the earliest maximal gap.
    """
    ordered = sorted(attacker_events, key=lambda item: (item.event.timestamp, item.event.id))
    best_gap = -1.0
    best_idx = 0
    for idx in range(len(ordered) - 1):
        gap = _seconds(ordered[idx + 1].event.timestamp, ordered[idx].event.timestamp)
        if gap > best_gap:
            best_gap = gap
            best_idx = idx
    return list(ordered[: best_idx + 1]), list(ordered[best_idx + 1 :])


def split_analysis(
    attacker_events: Sequence[LabeledEvent],
) -> tuple[float | None, float | None, float | None]:
    """Jaccard (geo, ua, isp) triple across the maximal attacker gap."""
    before, after = split_at_max_gap(attacker_events)
    first = AttributeSets.from_events(before)
    second = AttributeSets.from_events(after)
    return (
        jaccard(first.subdivisions, second.subdivisions),
        jaccard(first.user_agents, second.user_agents),
        jaccard(first.isps, second.isps),
    )


def stability_ratio(attacker_events: Sequence[LabeledEvent]) -> float:
    """Unique subdivisions per unique UTC login hour; high means rotation."""
    if not attacker_events:
        raise ValueError("stability ratio needs at least one event")
    subdivisions = {
        item.geo_info.subdivision
        for item in attacker_events
        if isinstance(item.geo_info, GeoInfo) and item.geo_info.subdivision is not None
    }
    hours = {_hour_bucket(item.event) for item in attacker_events}
    return len(subdivisions) / len(hours)


def access_rate(attacker_events: Sequence[LabeledEvent]) -> float:
    """Distinct applications touched per unique UTC attack hour."""
    if not attacker_events:
        raise ValueError("access rate needs at least one event")
    apps = {
        item.event.application_id
        for item in attacker_events
        if item.event.application_id is not None
    }
    hours = {_hour_bucket(item.event) for item in attacker_events}
    return len(apps) / len(hours)


def app_usage(
    labeled: Sequence[LabeledEvent], email_app_ids: frozenset[str] | set[str]
) -> tuple[dict[str, str], bool]:
    """Categorize each touched application and derive the email-only flag.

    Returns ({application_id: attacker_only|benign_only|both}, email_only)
    where email_only is True iff every application touched by an attacker
    event belongs to the configured email set.
    """
    touched: dict[str, set[Label]] = {}
    for item in labeled:
        app = item.event.application_id
        if app is None:
            continue
        touched.setdefault(app, set()).add(item.label)

    categories: dict[str, str] = {}
    email_only = True
    for app in sorted(touched):
        labels = touched[app]
        if labels == {Label.ATTACKER}:
            categories[app] = APP_ATTACKER_ONLY
        elif labels == {Label.BENIGN}:
            categories[app] = APP_BENIGN_ONLY
        else:
            categories[app] = APP_BOTH
        if Label.ATTACKER in labels and app not in email_app_ids:
            email_only = False
    return categories, email_only


def aggregate_app_usage(
    per_case_apps: Sequence[Mapping[str, str]],
    email_app_ids: frozenset[str] | set[str],
) -> dict[str, dict]:
    """Across cases, per non-email application: account counts by category
    and the share of accounts that reached the app via attacker events."""
    total = len(per_case_apps)
    summary: dict[str, dict] = {}
    for apps in per_case_apps:
        for app, category in apps.items():
            if app in email_app_ids:
                continue
            entry = summary.setdefault(
                app, {APP_ATTACKER_ONLY: 0, APP_BENIGN_ONLY: 0, APP_BOTH: 0}
            )
            entry[category] += 1
    for app, entry in summary.items():
        via_attack = entry[APP_ATTACKER_ONLY] + entry[APP_BOTH]
        entry["attacker_access_share"] = round(via_attack / total, 4) if total else None
    return dict(sorted(summary.items()))


def sensitive_ops(
    case_events: Sequence[AuditEvent],
    attacker_times: Sequence[datetime],
    window: float = INDICATOR_WINDOW_SECONDS,
) -> dict[str, int]:
    """Count password-change / OAuth-grant operations near attacker events."""
    counts = {OP_CHANGE_PASSWORD: 0, OP_ADD_OAUTH: 0}
    if not attacker_times:
        return counts
    ordered = sorted(attacker_times)
    for event in case_events:
        if event.operation not in counts:
            continue
        idx = bisect_left(ordered, event.timestamp)
        near = any(
            0 <= neighbor < len(ordered)
            and abs(_seconds(event.timestamp, ordered[neighbor])) <= window
            for neighbor in (idx - 1, idx)
        )
        if near:
            counts[event.operation] += 1
    return counts


def phish_gap(
    emails: Sequence[EmailRecord], attacker_events: Sequence[LabeledEvent]
) -> float | None:
    """first phishing email minus first attacker login, in signed seconds."""
    phish_times = [em.sent_at for em in emails if em.flagged_phishing]
    if not phish_times or not attacker_events:
        return None
    first_attack = min(item.event.timestamp for item in attacker_events)
    return _seconds(min(phish_times), first_attack)


def _draw(seed: int, group_key: str, size: int) -> int:
    digest = hashlib.sha256(f"{seed}|{group_key}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big")).randrange(size)


def dedup_sample(
    entries: Iterable[tuple[str, str, datetime]], seed: int
) -> list[str]:
    """Pick one user per (organization, 30-day first-attack bucket) group.

    ``entries`` are (user_id, organization, first attacker event time) for
    cases that have at least one attacker event; callers exclude the rest.
    The draw is seeded and independent of input ordering.
    """
    groups: dict[tuple[str, int], list[str]] = {}
    for user_id, org, first_attack in entries:
        bucket = int(first_attack.timestamp()) // (30 * SECONDS_PER_DAY)
        groups.setdefault((org, bucket), []).append(user_id)
    chosen = []
    for (org, bucket), users in groups.items():
        users.sort()
        chosen.append(users[_draw(seed, f"{org}|{bucket}", len(users))])
    return sorted(chosen)


def breach_overlap(
    case_orgs: Iterable[tuple[str, str]],
    breach_list: Iterable[str],
    org_sectors: Mapping[str, str],
) -> tuple[dict[str, int], int]:
    """Per-sector count of organizations with a breached account.

    ``case_orgs`` are (user_id, organization) pairs. Returns the sector
    counts plus the total number of distinct breached case accounts.
    """
    breached = {email.lower() for email in breach_list}
    hit_orgs: set[str] = set()
    hit_users: set[str] = set()
    for user_id, org in case_orgs:
        if user_id.lower() in breached:
            hit_orgs.add(org)
            hit_users.add(user_id.lower())
    sector_counts: Counter[str] = Counter(org_sectors[org] for org in hit_orgs)
    return dict(sorted(sector_counts.items())), len(hit_users)


def ecdf(values: Sequence[float]) -> list[tuple[float, float]]:
    """Sorted unique values with cumulative fractions, ending at exactly 1."""
    if not values:
        raise ValueError("ecdf of empty sample")
    counts = Counter(values)
    total = len(values)
    out = []
    cumulative = 0
    for value in sorted(counts):
        cumulative += counts[value]
        out.append((value, cumulative / total))
    return out


@dataclass
class CaseReport:
    """The full analytics bundle for one compromised account."""

    user_id: str
    organization: str
    attacker_events: int
    benign_events: int
    unclassifiable_events: int
    dwell_seconds: float | None
    max_interarrival_seconds: float | None
    mode: Mode
    jaccard_geo: float | None = None
    jaccard_ua: float | None = None
    jaccard_isp: float | None = None
    stability_ratio: float | None = None
    access_rate_before: float | None = None
    access_rate_after: float | None = None
    escalation: bool | None = None
    email_only: bool = True
    apps_accessed: dict[str, str] = field(default_factory=dict)
    sensitive_ops: dict[str, int] = field(default_factory=dict)
    phish_gap_seconds: float | None = None
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        def num(value: float | None) -> float | int | None:
            if value is None:
                return None
            return int(value) if float(value).is_integer() else round(value, 4)

        return {
            "user_id": self.user_id,
            "organization": self.organization,
            "attacker_events": self.attacker_events,
            "benign_events": self.benign_events,
            "unclassifiable_events": self.unclassifiable_events,
            "dwell_seconds": num(self.dwell_seconds),
            "max_interarrival_seconds": num(self.max_interarrival_seconds),
            "mode": self.mode.value,
            "jaccard": None
            if self.mode is not Mode.SEGMENTED
            else {
                "geo": num(self.jaccard_geo),
                "ua": num(self.jaccard_ua),
                "isp": num(self.jaccard_isp),
            },
            "stability_ratio": num(self.stability_ratio),
            "access_rate_before": num(self.access_rate_before),
            "access_rate_after": num(self.access_rate_after),
            "escalation": self.escalation,
            "email_only": self.email_only,
            "apps_accessed": dict(sorted(self.apps_accessed.items())),
            "sensitive_ops": {
                "change_user_password": self.sensitive_ops.get(OP_CHANGE_PASSWORD, 0),
                "add_oauth": self.sensitive_ops.get(OP_ADD_OAUTH, 0),
            },
            "phish_gap_seconds": num(self.phish_gap_seconds),
            "flags": list(self.flags),
        }


def organization_of(user_id: str) -> str:
    """Default organization key: the domain of the account email."""
    _, _, domain = user_id.partition("@")
    return domain or user_id


def build_case_report(
    case: CompromiseCase,
    labeled: Sequence[LabeledEvent],
    email_app_ids: frozenset[str] | set[str] = frozenset(),
    window: float = INDICATOR_WINDOW_SECONDS,
    organization: str | None = None,
    day_threshold: float = SECONDS_PER_DAY,
) -> CaseReport:
    """Run every per-case analytic over one case's labeled events."""
    attackers = [item for item in labeled if item.label is Label.ATTACKER]
    unclassifiable = sum(1 for item in labeled if item.features is None)
    benign = len(labeled) - len(attackers) - unclassifiable

    max_ia = max_interarrival(attackers)
    mode = segment_mode(max_ia, day_threshold)
    apps, email_only = app_usage(labeled, email_app_ids)
    gap = phish_gap(case.emails, attackers)

    report = CaseReport(
        user_id=case.user_id,
        organization=organization or organization_of(case.user_id),
        attacker_events=len(attackers),
        benign_events=benign,
        unclassifiable_events=unclassifiable,
        dwell_seconds=dwell_time(attackers),
        max_interarrival_seconds=max_ia,
        mode=mode,
        email_only=email_only,
        apps_accessed=apps,
        sensitive_ops=sensitive_ops(
            case.events, [item.event.timestamp for item in attackers], window
        ),
        phish_gap_seconds=gap,
        flags=(FLAG_PHISH_BEFORE_ATTACK,) if gap is not None and gap < 0 else (),
    )

    if mode is Mode.SEGMENTED:
        before, after = split_at_max_gap(attackers)
        report.jaccard_geo, report.jaccard_ua, report.jaccard_isp = split_analysis(
            attackers
        )
        report.stability_ratio = stability_ratio(after)
        report.access_rate_before = access_rate(before)
        report.access_rate_after = access_rate(after)
        report.escalation = report.access_rate_after > report.access_rate_before
    return report
