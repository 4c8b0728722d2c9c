"""Shared builders for tests: compact event/geo constructors and a random
small-case generator used by the rule-set oracle comparisons."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from ato_forensics.events import AuditEvent, CompromiseCase
from ato_forensics.geo import GeoInfo, NotFound

BASE = datetime(2019, 11, 1, tzinfo=timezone.utc)
DAY = timedelta(days=1)


def at(days: float = 0, hours: float = 0, minutes: float = 0, seconds: float = 0) -> datetime:
    return BASE + timedelta(days=days, hours=hours, minutes=minutes, seconds=seconds)


def ev(
    event_id: str,
    when: datetime,
    user: str = "bob@corp.example",
    ua: str | None = "iPhone9C4/1706.56",
    ip: str | None = "198.18.0.10",
    op: str = "UserLoggedIn",
    app: str | None = None,
) -> AuditEvent:
    return AuditEvent(
        id=event_id,
        user_id=user,
        timestamp=when,
        operation=op,
        user_agent=ua,
        client_ip=ip,
        application_id=app,
    )


def case_for(events, t: datetime = BASE, user: str = "bob@corp.example", **kwargs) -> CompromiseCase:
    ordered = tuple(sorted(events, key=lambda e: (e.timestamp, e.id)))
    return CompromiseCase(user_id=user, t=t, events=ordered, **kwargs)


COUNTRIES = ("US", "JP", "DE", "BR", "NG")
SUBDIVISIONS = {c: tuple(f"{c}-{i:02d}" for i in range(4)) for c in COUNTRIES}
DEVICE_UAS = tuple(f"dev{i}/{100 + i}.{i}" for i in range(8))


def random_enriched_case(rng: random.Random, max_events: int = 200):
    """A random small case: (CompromiseCase, enriched pairs).

    Events span [t-70d, t+35d] so both windows have boundary traffic; some
    IPs are unresolvable, some events lack a subdivision, and a few are
    non-login operations. User agents are whitespace-free device strings so
    an oracle can normalize them independently with a plain split.
    """
    t = BASE
    n = rng.randrange(0, max_events + 1)
    events = []
    pairs = []
    for i in range(n):
        when = t + timedelta(seconds=rng.randrange(-70 * 86400, 35 * 86400))
        if rng.random() < 0.05:
            event = ev(f"e{i:04d}", when, ua=None, ip=None, op="Change user password")
            events.append(event)
            pairs.append((event, NotFound("no_ip")))
            continue
        event = ev(
            f"e{i:04d}",
            when,
            ua=rng.choice(DEVICE_UAS),
            ip=f"198.18.{rng.randrange(4)}.{rng.randrange(1, 255)}",
        )
        events.append(event)
        if rng.random() < 0.1:
            pairs.append((event, NotFound("unmapped")))
        else:
            country = rng.choice(COUNTRIES)
            sub = rng.choice(SUBDIVISIONS[country]) if rng.random() < 0.85 else None
            pairs.append((event, GeoInfo(country, sub, isp=f"isp{rng.randrange(3)}")))
    case = case_for(events, t=t)
    order = {event.id: idx for idx, (event, _) in enumerate(pairs)}
    sorted_pairs = sorted(pairs, key=lambda p: (p[0].timestamp, p[0].id))
    del order
    return case, sorted_pairs
