"""Deterministic synthetic audit-log corpora with ground-truth sidecars.

The generator produces desk-scale oracles for the whole pipeline: corpora
whose per-event truth (benign, first attacker, second attacker) is known by
construction but never appears in the event records themselves. Four user
archetypes are supported:

* ``benign_only``: a flagged account with no attacker activity.
* ``end_to_end``: one attacker burst shortly after the compromise instant,
  every internal gap well under a day.
* ``segmented_two_actor``: two attacker bursts from disjoint location / ISP
  pools separated by a multi-day gap, modeling credential resale.
* ``evasive``: attacker logins placed inside the user's own home
  subdivisions, which the location-based rule set cannot flag.

Each user draws from a private pseudo-random stream derived from
(seed, user index), so appending users never perturbs existing output, and
identical (spec, seed) pairs yield byte-identical corpora. Alongside the
event log the generator emits every companion input the pipeline needs
(compromise times, emails, inbox-rule detections, geolocation table, Tor
list, centroids, email-application ids) plus the ``truth.csv`` sidecar.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Iterator

from .constants import OP_CHANGE_PASSWORD, SECONDS_PER_DAY
from .events import AuditEvent, EmailRecord, format_timestamp, parse_timestamp, serialize_events
from .geo import GeoInfo
from .ua import normalize_ua

TAG_BENIGN = "benign"
TAG_ATTACKER_1 = "attacker-1"
TAG_ATTACKER_2 = "attacker-2"

OP_LOGIN = "UserLoggedIn"

_DAY = timedelta(seconds=SECONDS_PER_DAY)
_BASE_TIME = datetime(2019, 11, 1, tzinfo=timezone.utc)

# /24 blocks for synthetic combos come from the 198.18.0.0/15 benchmarking
# range: globally-routable-looking, never in the resolver's reserved set.
_IP_BASE = (198, 18)


class Archetype(str, Enum):
    BENIGN_ONLY = "benign_only"
    END_TO_END = "end_to_end"
    SEGMENTED_TWO_ACTOR = "segmented_two_actor"
    EVASIVE = "evasive"


class ScenarioError(ValueError):
    """Invalid or infeasible scenario; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class LocationPool:
    """Subdivisions, raw user agents, and ISPs one actor class draws from."""

    subdivisions: tuple[str, ...]
    user_agents: tuple[str, ...]
    isps: tuple[str, ...]


@dataclass(frozen=True)
class UserSpec:
    archetype: Archetype
    gap_days: float = 3.0


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    users: tuple[UserSpec, ...]
    home: LocationPool
    attacker: LocationPool
    attacker2: LocationPool
    organizations: int = 3
    base_time: datetime = _BASE_TIME
    benign_events_per_day: float = 4.0
    attack_burst_events: int = 12
    benign_emails_per_day: float = 0.1
    phishing_email_rate: float = 0.5
    inbox_rule_rate: float = 0.25
    password_change_rate: float = 0.0
    require_low_jaccard: bool = True
    tor_exits: tuple[str, ...] = ("198.51.100.77", "198.51.100.78")


@dataclass
class SyntheticCorpus:
    """Everything one scenario produces, before serialization."""

    events: list[AuditEvent]
    compromise_times: dict[str, datetime]
    emails: list[EmailRecord]
    inbox_detections: dict[str, list[datetime]]
    truth_tags: dict[str, str]
    geo_entries: list[tuple[str, GeoInfo]]
    tor_exits: tuple[str, ...]
    centroids: dict[str, tuple[float, float]]
    email_app_ids: frozenset[str]
    archetype_counts: Counter = field(default_factory=Counter)


EMAIL_APPS = ("exchange-online", "outlook-web")
BENIGN_EXTRA_APPS = ("sharepoint",)
ATTACK2_APPS = ("exchange-online", "sharepoint", "azure-portal", "bing")


def paper_mix_spec(seed: int = 7, users_per_archetype: int = 3) -> ScenarioSpec:
    """A default scenario exercising all four archetypes."""
    users = []
    for archetype in (
        Archetype.BENIGN_ONLY,
        Archetype.END_TO_END,
        Archetype.SEGMENTED_TWO_ACTOR,
        Archetype.EVASIVE,
    ):
        users.extend(UserSpec(archetype) for _ in range(users_per_archetype))
    return ScenarioSpec(
        seed=seed,
        users=tuple(users),
        home=LocationPool(
            subdivisions=("US-IL", "US-MO", "US-NY"),
            user_agents=(
                "iPhone9C4/1706.56",
                "Mozilla/5.0 (Windows NT 10.0; Win64; x64) Gecko/20100101 Firefox/70.0",
            ),
            isps=("comcast", "att"),
        ),
        attacker=LocationPool(
            subdivisions=("NG-LA", "RU-MOW"),
            user_agents=("Python-urllib/3.7", "okhttp/3.12.1"),
            isps=("shadynet", "bulletvps"),
        ),
        attacker2=LocationPool(
            subdivisions=("BR-SP", "VN-HN"),
            user_agents=("curl/7.64.0", "Chrome Mobile/91.0"),
            isps=("proxyfarm", "darkcloud"),
        ),
        phishing_email_rate=0.5,
        inbox_rule_rate=0.25,
        password_change_rate=0.2,
    )


def _pool_from_json(name: str, raw: dict) -> LocationPool:
    try:
        return LocationPool(
            subdivisions=tuple(raw["subdivisions"]),
            user_agents=tuple(raw["user_agents"]),
            isps=tuple(raw["isps"]),
        )
    except KeyError as exc:
        raise ScenarioError(f"pools.{name}", f"missing {exc.args[0]}") from exc


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Read a scenario JSON file.

    ``users`` is either an explicit list of ``{"archetype": ..., "gap_days":
    ...}`` objects or a ``{"counts": {archetype: n}}`` shorthand expanded in
    archetype-name order.
    """
    with open(path, encoding="utf-8") as handle:
        raw = json.load(handle)
    try:
        seed = int(raw["seed"])
        pools = raw["pools"]
    except KeyError as exc:
        raise ScenarioError(exc.args[0], "required field missing") from exc

    users_raw = raw.get("users", [])
    users: list[UserSpec] = []
    if isinstance(users_raw, dict):
        counts = users_raw.get("counts", {})
        for name in sorted(counts):
            try:
                archetype = Archetype(name)
            except ValueError:
                raise ScenarioError("users.counts", f"unknown archetype {name!r}")
            users.extend(
                UserSpec(archetype, float(users_raw.get("gap_days", 3.0)))
                for _ in range(int(counts[name]))
            )
    else:
        for idx, entry in enumerate(users_raw):
            try:
                archetype = Archetype(entry["archetype"])
            except (KeyError, ValueError):
                raise ScenarioError(f"users[{idx}].archetype", f"invalid entry {entry!r}")
            users.append(UserSpec(archetype, float(entry.get("gap_days", 3.0))))

    spec = ScenarioSpec(
        seed=seed,
        users=tuple(users),
        home=_pool_from_json("home", pools.get("home", {})),
        attacker=_pool_from_json("attacker", pools.get("attacker", {})),
        attacker2=_pool_from_json("attacker2", pools.get("attacker2", {})),
        organizations=int(raw.get("organizations", 3)),
        base_time=parse_timestamp(raw["base_time"]) if "base_time" in raw else _BASE_TIME,
        benign_events_per_day=float(raw.get("benign_events_per_day", 4.0)),
        attack_burst_events=int(raw.get("attack_burst_events", 12)),
        benign_emails_per_day=float(raw.get("benign_emails_per_day", 0.1)),
        phishing_email_rate=float(raw.get("phishing_email_rate", 0.5)),
        inbox_rule_rate=float(raw.get("inbox_rule_rate", 0.25)),
        password_change_rate=float(raw.get("password_change_rate", 0.0)),
        require_low_jaccard=bool(raw.get("require_low_jaccard", True)),
    )
    validate_spec(spec)
    return spec


def validate_spec(spec: ScenarioSpec) -> None:
    """Reject infeasible scenarios with a field-level message."""
    for name, pool in (("home", spec.home), ("attacker", spec.attacker), ("attacker2", spec.attacker2)):
        for attr in ("subdivisions", "user_agents", "isps"):
            if not getattr(pool, attr):
                raise ScenarioError(f"pools.{name}.{attr}", "pool must be non-empty")
    if spec.organizations < 1:
        raise ScenarioError("organizations", "must be >= 1")
    if spec.benign_events_per_day <= 0:
        raise ScenarioError("benign_events_per_day", "must be > 0 to build profiles")
    if spec.attack_burst_events < 2:
        raise ScenarioError("attack_burst_events", "need >= 2 events per burst")
    if spec.base_time.tzinfo is None:
        raise ScenarioError("base_time", "must be timezone-aware")

    for idx, user in enumerate(spec.users):
        if user.archetype is Archetype.SEGMENTED_TWO_ACTOR:
            if user.gap_days < 1:
                raise ScenarioError(
                    f"users[{idx}].gap_days",
                    "segmented_two_actor requires a gap of at least 1 day",
                )
            if user.gap_days > 27:
                raise ScenarioError(
                    f"users[{idx}].gap_days",
                    "second burst would fall outside the classified month",
                )

    home_subs = set(spec.home.subdivisions)
    home_uas = {normalize_ua(ua) for ua in spec.home.user_agents}
    for name, pool in (("attacker", spec.attacker), ("attacker2", spec.attacker2)):
        if home_subs & set(pool.subdivisions):
            raise ScenarioError(
                f"pools.{name}.subdivisions", "must be disjoint from the home pool"
            )
        if home_uas & {normalize_ua(ua) for ua in pool.user_agents}:
            raise ScenarioError(
                f"pools.{name}.user_agents",
                "must normalize disjointly from the home pool",
            )
    if spec.require_low_jaccard:
        if set(spec.attacker.subdivisions) & set(spec.attacker2.subdivisions):
            raise ScenarioError(
                "pools.attacker2.subdivisions",
                "low-jaccard scenarios need disjoint attacker location pools",
            )
        if set(spec.attacker.isps) & set(spec.attacker2.isps):
            raise ScenarioError(
                "pools.attacker2.isps",
                "low-jaccard scenarios need disjoint attacker ISP pools",
            )


def _all_combos(spec: ScenarioSpec) -> list[tuple[str, str]]:
    """Every (subdivision, isp) combo any archetype may draw, pre-allocated
    in sorted order so IP assignment never depends on the user list."""
    combos = set()
    for pool in (spec.home, spec.attacker, spec.attacker2):
        combos.update((sub, isp) for sub in pool.subdivisions for isp in pool.isps)
    # Evasive attackers: attacker ISPs inside home subdivisions.
    combos.update(
        (sub, isp) for sub in spec.home.subdivisions for isp in spec.attacker.isps
    )
    return sorted(combos)


def _combo_networks(spec: ScenarioSpec) -> dict[tuple[str, str], tuple[int, int, int]]:
    combos = _all_combos(spec)
    if len(combos) > 512:
        raise ScenarioError("pools", "too many (subdivision, isp) combos (max 512)")
    networks = {}
    for index, combo in enumerate(combos):
        networks[combo] = (_IP_BASE[0], _IP_BASE[1] + index // 256, index % 256)
    return networks


def _centroids_for(subdivisions: list[str]) -> dict[str, tuple[float, float]]:
    """Deterministic well-spread pseudo-coordinates per subdivision."""
    coords = {}
    for index, sub in enumerate(sorted(subdivisions)):
        coords[sub] = (
            round(-55 + (index * 37) % 110 + index * 1e-3, 4),
            round(-170 + (index * 67) % 340, 4),
        )
    return coords


@dataclass
class _UserOutput:
    events: list[AuditEvent]
    truth: dict[str, str]
    emails: list[EmailRecord]
    detections: list[datetime]
    t: datetime
    user_id: str


class _UserBuilder:
    """Generates one user's records from a private RNG stream."""

    def __init__(self, spec: ScenarioSpec, index: int, networks: dict):
        self.spec = spec
        self.index = index
        self.rng = random.Random(f"{spec.seed}:{index}")
        self.networks = networks
        self.user_id = f"user{index:04d}@org{index % spec.organizations:02d}.example"
        self.seq = 0
        self.events: list[AuditEvent] = []
        self.truth: dict[str, str] = {}

    def _ip(self, combo: tuple[str, str], host: int) -> str:
        a, b, c = self.networks[combo]
        return f"{a}.{b}.{c}.{host}"

    def _emit(
        self,
        when: datetime,
        combo: tuple[str, str] | None,
        host: int | None,
        user_agent: str | None,
        app: str | None,
        tag: str,
        operation: str = OP_LOGIN,
    ) -> AuditEvent:
        event_id = f"ev-{self.index:05d}-{self.seq:06d}"
        self.seq += 1
        event = AuditEvent(
            id=event_id,
            user_id=self.user_id,
            timestamp=when.replace(microsecond=0),
            operation=operation,
            user_agent=user_agent,
            client_ip=self._ip(combo, host) if combo is not None else None,
            application_id=app,
        )
        self.events.append(event)
        self.truth[event_id] = tag
        return event

    def _benign_identity(self) -> tuple[list[tuple[tuple[str, str], int]], list[str]]:
        spec, rng = self.spec, self.rng
        n_locs = min(len(spec.home.subdivisions), rng.randint(1, 2))
        subs = rng.sample(spec.home.subdivisions, n_locs)
        locations = []
        for sub in subs:
            combo = (sub, rng.choice(spec.home.isps))
            locations.append((combo, rng.randint(1, 254)))
        n_uas = min(len(spec.home.user_agents), rng.randint(1, 2))
        return locations, rng.sample(spec.home.user_agents, n_uas)

    def _benign_app(self) -> str:
        if self.rng.random() < 0.85:
            return self.rng.choice(EMAIL_APPS)
        return self.rng.choice(BENIGN_EXTRA_APPS)

    def build(self, user: UserSpec) -> _UserOutput:
        spec, rng = self.spec, self.rng
        t = spec.base_time + timedelta(hours=rng.randrange(0, 72))
        locations, user_agents = self._benign_identity()

        # Forced history events cover every (location, UA) combo the user
        # owns, so later benign logins can never look novel to the profile.
        forced_at = t - 50 * _DAY
        for hour, (location, ua) in enumerate(
            (loc, ua) for loc in locations for ua in user_agents
        ):
            combo, host = location
            self._emit(
                forced_at + timedelta(hours=hour),
                combo,
                host,
                ua,
                self._benign_app(),
                TAG_BENIGN,
            )

        window_start = t - 60 * _DAY
        window_end = t + 30 * _DAY
        span = int((window_end - window_start).total_seconds())
        count = int(spec.benign_events_per_day * 90)
        offsets = sorted(rng.randrange(span) for _ in range(count))
        for offset in offsets:
            combo, host = rng.choice(locations)
            self._emit(
                window_start + timedelta(seconds=offset),
                combo,
                host,
                rng.choice(user_agents),
                self._benign_app(),
                TAG_BENIGN,
            )

        attack_times: list[datetime] = []
        if user.archetype is Archetype.END_TO_END:
            attack_times = self._burst(
                start=t + timedelta(seconds=rng.randrange(1800, 14400)),
                count=spec.attack_burst_events,
                pool=spec.attacker,
                apps=EMAIL_APPS,
                tag=TAG_ATTACKER_1,
                max_gap=7200,
            )
        elif user.archetype is Archetype.EVASIVE:
            # Locations come from the user's own home subdivisions; only the
            # ISP and user agent change, which the rule set never sees.
            evasive_pool = LocationPool(
                subdivisions=tuple(combo[0] for combo, _ in locations),
                user_agents=spec.attacker.user_agents,
                isps=spec.attacker.isps,
            )
            attack_times = self._burst(
                start=t + timedelta(seconds=rng.randrange(1800, 14400)),
                count=spec.attack_burst_events,
                pool=evasive_pool,
                apps=EMAIL_APPS,
                tag=TAG_ATTACKER_1,
                max_gap=7200,
            )
        elif user.archetype is Archetype.SEGMENTED_TWO_ACTOR:
            first = self._burst(
                start=t + timedelta(seconds=rng.randrange(1800, 7200)),
                count=max(2, spec.attack_burst_events // 2),
                pool=spec.attacker,
                apps=EMAIL_APPS,
                tag=TAG_ATTACKER_1,
                max_gap=3600,
            )
            second = self._burst(
                start=first[-1] + timedelta(seconds=int(user.gap_days * SECONDS_PER_DAY)),
                count=max(2, spec.attack_burst_events // 2),
                pool=spec.attacker2,
                apps=ATTACK2_APPS,
                tag=TAG_ATTACKER_2,
                max_gap=3600,
            )
            attack_times = first + second

        emails: list[EmailRecord] = []
        n_benign_emails = int(spec.benign_emails_per_day * 90)
        for _ in range(n_benign_emails):
            offset = rng.randrange(span)
            emails.append(
                EmailRecord(self.user_id, window_start + timedelta(seconds=offset), False)
            )
        detections: list[datetime] = []
        if attack_times:
            if rng.random() < spec.phishing_email_rate:
                emails.append(
                    EmailRecord(
                        self.user_id,
                        attack_times[0] + timedelta(seconds=rng.randrange(3600, 4 * SECONDS_PER_DAY)),
                        True,
                    )
                )
            if rng.random() < spec.inbox_rule_rate:
                detections.append(attack_times[0] + timedelta(seconds=3600))
            if rng.random() < spec.password_change_rate:
                self._emit(
                    attack_times[0] + timedelta(seconds=1800),
                    None,
                    None,
                    None,
                    None,
                    TAG_ATTACKER_1,
                    operation=OP_CHANGE_PASSWORD,
                )

        self.events.sort(key=lambda ev: (ev.timestamp, ev.id))
        emails.sort(key=lambda em: em.sent_at)
        return _UserOutput(self.events, self.truth, emails, detections, t, self.user_id)

    def _burst(
        self,
        start: datetime,
        count: int,
        pool: LocationPool,
        apps: tuple[str, ...],
        tag: str,
        max_gap: int,
    ) -> list[datetime]:
        rng = self.rng
        n_locs = min(len(pool.subdivisions), rng.randint(1, 2))
        locations = []
        for sub in rng.sample(pool.subdivisions, n_locs):
            combo = (sub, rng.choice(pool.isps))
            locations.append((combo, rng.randint(1, 254)))
        ua = rng.choice(pool.user_agents)
        times = []
        when = start
        for i in range(count):
            combo, host = rng.choice(locations)
            self._emit(when, combo, host, ua, apps[i % len(apps)], tag)
            times.append(when)
            when = when + timedelta(seconds=rng.randrange(300, max_gap))
        return times


def _iter_user_outputs(spec: ScenarioSpec) -> Iterator[_UserOutput]:
    networks = _combo_networks(spec)
    for index, user in enumerate(spec.users):
        yield _UserBuilder(spec, index, networks).build(user)


def _companions(spec: ScenarioSpec) -> tuple[list[tuple[str, GeoInfo]], dict[str, tuple[float, float]]]:
    networks = _combo_networks(spec)
    geo_entries = []
    for (sub, isp), (a, b, c) in sorted(networks.items(), key=lambda kv: kv[1]):
        country = sub.split("-", 1)[0]
        geo_entries.append((f"{a}.{b}.{c}.0/24", GeoInfo(country, sub, isp)))
    subdivisions = sorted({sub for sub, _ in networks})
    return geo_entries, _centroids_for(subdivisions)


def generate(spec: ScenarioSpec) -> SyntheticCorpus:
    """Materialize a full corpus in memory (desk-scale scenarios)."""
    validate_spec(spec)
    geo_entries, centroids = _companions(spec)
    corpus = SyntheticCorpus(
        events=[],
        compromise_times={},
        emails=[],
        inbox_detections={},
        truth_tags={},
        geo_entries=geo_entries,
        tor_exits=spec.tor_exits,
        centroids=centroids,
        email_app_ids=frozenset(EMAIL_APPS),
    )
    for user, output in zip(spec.users, _iter_user_outputs(spec)):
        corpus.events.extend(output.events)
        corpus.compromise_times[output.user_id] = output.t
        corpus.emails.extend(output.emails)
        if output.detections:
            corpus.inbox_detections[output.user_id] = output.detections
        corpus.truth_tags.update(output.truth)
        corpus.archetype_counts[user.archetype.value] += 1
    corpus.events.sort(key=lambda ev: (ev.timestamp, ev.id))
    corpus.emails.sort(key=lambda em: (em.sent_at, em.sender))
    return corpus


def _write_companions(corpus: SyntheticCorpus, out: Path) -> dict[str, int]:
    """Write every file except the bulk events.jsonl and truth.csv."""
    counts = {}

    with open(out / "compromise_times.csv", "w", encoding="utf-8") as handle:
        handle.write("user_id,confirmed_at\n")
        for user_id in sorted(corpus.compromise_times):
            handle.write(f"{user_id},{format_timestamp(corpus.compromise_times[user_id])}\n")
        counts["compromise_times.csv"] = len(corpus.compromise_times)

    with open(out / "emails.csv", "w", encoding="utf-8") as handle:
        handle.write("sender,sent_at,flagged_phishing\n")
        for email in corpus.emails:
            flag = 1 if email.flagged_phishing else 0
            handle.write(f"{email.sender},{format_timestamp(email.sent_at)},{flag}\n")
        counts["emails.csv"] = len(corpus.emails)

    with open(out / "inbox_rules.csv", "w", encoding="utf-8") as handle:
        handle.write("user_id,detected_at\n")
        n = 0
        for user_id in sorted(corpus.inbox_detections):
            for when in corpus.inbox_detections[user_id]:
                handle.write(f"{user_id},{format_timestamp(when)}\n")
                n += 1
        counts["inbox_rules.csv"] = n

    with open(out / "geo_table.csv", "w", encoding="utf-8") as handle:
        handle.write("cidr,country,subdivision,isp\n")
        for cidr, info in corpus.geo_entries:
            handle.write(f"{cidr},{info.country},{info.subdivision or ''},{info.isp or ''}\n")
        counts["geo_table.csv"] = len(corpus.geo_entries)

    with open(out / "tor_exits.txt", "w", encoding="utf-8") as handle:
        handle.write("# synthetic Tor exit nodes\n")
        for ip in corpus.tor_exits:
            handle.write(ip + "\n")
        counts["tor_exits.txt"] = len(corpus.tor_exits)

    with open(out / "centroids.csv", "w", encoding="utf-8") as handle:
        handle.write("subdivision,lat,lon\n")
        for sub in sorted(corpus.centroids):
            lat, lon = corpus.centroids[sub]
            handle.write(f"{sub},{lat},{lon}\n")
        counts["centroids.csv"] = len(corpus.centroids)

    with open(out / "email_apps.txt", "w", encoding="utf-8") as handle:
        handle.write("# application ids treated as email applications\n")
        for app in sorted(corpus.email_app_ids):
            handle.write(app + "\n")
        counts["email_apps.txt"] = len(corpus.email_app_ids)

    return counts


def write_corpus(corpus: SyntheticCorpus, out_dir: str | Path) -> dict[str, int]:
    """Serialize a corpus; returns {filename: record count}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counts = _write_companions(corpus, out)

    with open(out / "events.jsonl", "w", encoding="utf-8") as handle:
        n = 0
        for line in serialize_events(corpus.events):
            handle.write(line + "\n")
            n += 1
        counts["events.jsonl"] = n

    with open(out / "truth.csv", "w", encoding="utf-8") as handle:
        handle.write("id,truth_tag\n")
        for event_id in sorted(corpus.truth_tags):
            handle.write(f"{event_id},{corpus.truth_tags[event_id]}\n")
        counts["truth.csv"] = len(corpus.truth_tags)

    return counts


def generate_to_dir(spec: ScenarioSpec, out_dir: str | Path) -> tuple[dict[str, int], Counter]:
    """Generate and serialize in one step; returns (file counts, archetypes)."""
    corpus = generate(spec)
    return write_corpus(corpus, out_dir), corpus.archetype_counts


def load_truth_tags(path: str | Path) -> dict[str, str]:
    """Read a ``id,truth_tag`` sidecar back into a mapping."""
    tags = {}
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        if header != "id,truth_tag":
            raise ValueError(f"{path}: expected header id,truth_tag")
        for line in handle:
            event_id, _, tag = line.strip().partition(",")
            if event_id:
                tags[event_id] = tag
    return tags
