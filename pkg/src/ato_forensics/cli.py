"""Command-line pipeline: generate / classify / evaluate / analyze / all.

Every command is a pure function of its config plus input files: outputs are
written with sorted keys and stable orderings, so re-running a command on
unchanged inputs reproduces the output tree byte for byte. Ingestion is a
single streaming pass over the events file; only events that fall inside a
flagged account's analysis span are retained, and cases are then processed
one at a time.

Exit codes: 0 success, 1 pipeline error, 2 configuration or IO error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import random
import sys
from collections import Counter
from dataclasses import dataclass, fields, replace
from datetime import timedelta
from pathlib import Path
from typing import Iterator, Sequence

from .analytics import (
    CaseReport,
    Mode,
    build_case_report,
    aggregate_app_usage,
    breach_overlap,
    dedup_sample,
    ecdf,
    organization_of,
)
from .constants import (
    INDICATOR_WINDOW_SECONDS,
    SECONDS_PER_DAY,
    SECONDS_PER_WEEK,
)
from .events import (
    AuditEvent,
    CompromiseCase,
    RejectRecord,
    format_timestamp,
    has_historical_login,
    iter_corpus,
    load_compromise_times,
    load_emails,
    load_inbox_rule_detections,
)
from .geo import GeoInfo, GeoTable, enrich
from .profiles import InsufficientHistory, Label, LabeledEvent, classify_case
from .sessions import (
    IndicatorSet,
    PROVENANCE_INDICATORS,
    PROVENANCE_SIDECAR,
    Session,
    apply_overrides,
    compute_indicators,
    evaluate,
    ground_truth,
    home_territory,
    load_centroids,
    load_overrides,
    sessionize,
)
from .synth import ScenarioError, generate, load_scenario, load_truth_tags, write_corpus

EXIT_OK = 0
EXIT_PIPELINE = 1
EXIT_CONFIG = 2

LABELED_HEADER = [
    "id",
    "user_id",
    "timestamp",
    "country",
    "subdivision",
    "isp",
    "normalized_ua",
    "geo_feature",
    "ua_feature",
    "label",
    "phase",
    "flags",
]

SESSION_HEADER = [
    "user_id",
    "client_ip",
    "normalized_ua",
    "first_seen",
    "events",
    "rule_label",
    "truth_label",
    "provenance",
    "phishing",
    "inbox_rules",
    "interarrival",
    "tor",
    "flags",
]


class ConfigError(Exception):
    pass


class PipelineError(Exception):
    pass


@dataclass
class RunConfig:
    """All pipeline inputs, thresholds, and output location."""

    events: str | None = None
    geo_table: str | None = None
    tor_list: str | None = None
    compromise_times: str | None = None
    emails: str | None = None
    inbox_rules: str | None = None
    overrides: str | None = None
    centroids: str | None = None
    email_app_ids: str | None = None
    breach_list: str | None = None
    org_sectors: str | None = None
    truth_sidecar: str | None = None
    out_dir: str = "out"
    seed: int = 0
    dedup: bool = False
    session_sample: str | None = None
    day_threshold: float = SECONDS_PER_DAY
    week_threshold: float = SECONDS_PER_WEEK
    indicator_window: float = INDICATOR_WINDOW_SECONDS

    def validate(self, required: Sequence[str]) -> None:
        for threshold in ("day_threshold", "week_threshold", "indicator_window"):
            if getattr(self, threshold) <= 0:
                raise ConfigError(f"{threshold} must be > 0")
        for name in required:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"missing required input: --{name.replace('_', '-')}")
        for name in (
            "events",
            "geo_table",
            "tor_list",
            "compromise_times",
            "emails",
            "inbox_rules",
            "overrides",
            "centroids",
            "email_app_ids",
            "breach_list",
            "org_sectors",
            "truth_sidecar",
        ):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"input file does not exist: {value}")


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file does not exist: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return raw


def build_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    flag_map = {
        "events": args.events,
        "geo_table": args.geo,
        "tor_list": args.tor,
        "compromise_times": args.compromise_times,
        "emails": args.emails,
        "inbox_rules": args.inbox_rules,
        "overrides": args.overrides,
        "centroids": args.centroids,
        "email_app_ids": args.email_apps,
        "breach_list": args.breach_list,
        "org_sectors": args.org_sectors,
        "truth_sidecar": args.truth_sidecar,
        "out_dir": args.out,
        "seed": args.seed,
        "session_sample": args.session_sample,
        "day_threshold": args.day_threshold,
        "week_threshold": args.week_threshold,
        "indicator_window": args.indicator_window,
    }
    for key, value in flag_map.items():
        if value is not None:
            values[key] = value
    if args.dedup:
        values["dedup"] = True
    return RunConfig(**values)


@dataclass
class CaseResult:
    """One case after classification, with everything evaluation needs."""

    case: CompromiseCase
    labeled: list[LabeledEvent]
    home: str | None
    error: str | None = None  # "insufficient_history" when unprofileable


@dataclass
class PipelineInputs:
    table: GeoTable
    compromise_times: dict
    emails_by_user: dict
    detections: dict
    centroids: dict
    email_app_ids: frozenset[str]


def _load_id_list(path: str | None) -> frozenset[str]:
    if path is None:
        return frozenset()
    values = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            text = line.split("#", 1)[0].strip()
            if text:
                values.add(text)
    return frozenset(values)


def load_inputs(cfg: RunConfig) -> PipelineInputs:
    table = GeoTable.from_csv(cfg.geo_table, cfg.tor_list)
    compromise_times = load_compromise_times(cfg.compromise_times)
    emails_by_user: dict = {}
    if cfg.emails:
        for email in load_emails(cfg.emails):
            emails_by_user.setdefault(email.sender, []).append(email)
    detections = load_inbox_rule_detections(cfg.inbox_rules) if cfg.inbox_rules else {}
    centroids = load_centroids(cfg.centroids) if cfg.centroids else {}
    return PipelineInputs(
        table=table,
        compromise_times=compromise_times,
        emails_by_user=emails_by_user,
        detections=detections,
        centroids=centroids,
        email_app_ids=_load_id_list(cfg.email_app_ids),
    )


def iter_case_results(
    cfg: RunConfig, inputs: PipelineInputs, diagnostics: dict
) -> Iterator[CaseResult]:
    """Stream the events file once, then classify user by user.

    Only events inside a flagged user's retention span
    [t-60d, t+30d+indicator_window] are buffered; everything else is dropped
    on the spot and tallied.
    """
    month = timedelta(seconds=30 * SECONDS_PER_DAY)
    slack = timedelta(seconds=cfg.indicator_window)
    spans = {
        user: (t - 2 * month, t + month + slack)
        for user, t in inputs.compromise_times.items()
    }
    per_user: dict[str, list[AuditEvent]] = {user: [] for user in spans}

    rejects: Counter = Counter()
    lines = accepted = dropped = 0
    with open(cfg.events, encoding="utf-8") as handle:
        for item in iter_corpus(handle):
            lines += 1
            if isinstance(item, RejectRecord):
                rejects[item.reason] += 1
                continue
            accepted += 1
            span = spans.get(item.user_id)
            if span is None or not span[0] <= item.timestamp <= span[1]:
                dropped += 1
                continue
            per_user[item.user_id].append(item)

    diagnostics["input_lines"] = lines
    diagnostics["accepted_events"] = accepted
    diagnostics["rejected_lines"] = dict(sorted(rejects.items()))
    diagnostics["events_out_of_scope"] = dropped

    for user_id in sorted(inputs.compromise_times):
        t = inputs.compromise_times[user_id]
        events = sorted(per_user.pop(user_id), key=lambda ev: (ev.timestamp, ev.id))
        case = CompromiseCase(
            user_id=user_id,
            t=t,
            events=tuple(events),
            emails=tuple(inputs.emails_by_user.get(user_id, ())),
            inbox_rule_detections=tuple(inputs.detections.get(user_id, ())),
            insufficient_history=not has_historical_login(events, t),
        )
        enriched = enrich(case.events, inputs.table)
        home = home_territory(enriched, *case.history_window())
        try:
            labeled = classify_case(case, enriched)
            yield CaseResult(case, labeled, home)
        except InsufficientHistory:
            yield CaseResult(case, [], home, error="insufficient_history")


def _labeled_row(item: LabeledEvent) -> list:
    geo = item.geo_info
    resolved = isinstance(geo, GeoInfo)
    return [
        item.event.id,
        item.event.user_id,
        format_timestamp(item.event.timestamp),
        geo.country if resolved else "",
        (geo.subdivision or "") if resolved else "",
        (geo.isp or "") if resolved else "",
        item.normalized_ua,
        item.features.geo if item.features else "",
        item.features.ua if item.features else "",
        item.label.value,
        item.phase.value,
        "|".join(item.flags),
    ]


@dataclass
class SessionRow:
    """Slim per-session record kept after the case's events are released."""

    user_id: str
    client_ip: str
    normalized_ua: str
    first_seen: str
    events: int
    rule_label: Label
    truth_label: Label
    provenance: str
    indicators: IndicatorSet | None

    def as_row(self) -> list:
        ind = self.indicators
        return [
            self.user_id,
            self.client_ip,
            self.normalized_ua,
            self.first_seen,
            self.events,
            self.rule_label.value,
            self.truth_label.value,
            self.provenance,
            *(
                [int(ind.phishing), int(ind.inbox_rules), int(ind.interarrival), int(ind.tor)]
                if ind
                else ["", "", "", ""]
            ),
            "|".join(ind.flags) if ind else "",
        ]


def _session_truth(
    sessions: list[Session],
    result: CaseResult,
    cfg: RunConfig,
    inputs: PipelineInputs,
    truth_tags: dict | None,
) -> list[tuple[Session, IndicatorSet | None]]:
    out = []
    for session in sessions:
        indicators = None
        if truth_tags is not None:
            attacked = any(
                truth_tags.get(item.event.id, "").startswith("attacker")
                for item in session.events
            )
            session.truth_label = Label.ATTACKER if attacked else Label.BENIGN
            session.truth_provenance = PROVENANCE_SIDECAR
        else:
            indicators = compute_indicators(
                session,
                emails=result.case.emails,
                detections=result.case.inbox_rule_detections,
                anchors=result.labeled,
                home=result.home,
                centroids=inputs.centroids,
                window=cfg.indicator_window,
            )
            session.truth_label = ground_truth(session, indicators)
            session.truth_provenance = PROVENANCE_INDICATORS
            session.flags = indicators.flags
        out.append((session, indicators))
    return out


def _sample_sessions(
    pairs: list[tuple[Session, IndicatorSet | None]], cfg: RunConfig, user_id: str
) -> list[tuple[Session, IndicatorSet | None]]:
    """Optional per-user parity subsampling: keep up to A rule-attacker and
    B rule-benign sessions, seeded and order-independent."""
    if cfg.session_sample is None:
        return pairs
    try:
        max_attack, max_benign = (int(x) for x in cfg.session_sample.split(","))
    except ValueError:
        raise ConfigError("--session-sample expects 'N,M' (attacker,benign)")
    digest = hashlib.sha256(f"{cfg.seed}|sessions|{user_id}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    attackers = [p for p in pairs if p[0].rule_label is Label.ATTACKER]
    benign = [p for p in pairs if p[0].rule_label is Label.BENIGN]
    chosen = []
    for bucket, cap in ((attackers, max_attack), (benign, max_benign)):
        if len(bucket) > cap:
            chosen.extend(rng.sample(bucket, cap))
        else:
            chosen.extend(bucket)
    chosen.sort(key=lambda p: (p[0].first_seen, p[0].client_ip, p[0].normalized_ua))
    return chosen


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _safe_filename(user_id: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in user_id)


def _write_ecdf(path: Path, values: list[float]) -> None:
    if not values:
        return
    rows = [(v if v % 1 else int(v), round(frac, 6)) for v, frac in ecdf(values)]
    _write_csv(path, ["value", "fraction"], rows)


def _aggregate(reports: list[CaseReport], cfg: RunConfig, email_apps: frozenset[str]) -> dict:
    with_attack = [r for r in reports if r.attacker_events > 0]
    dwell = [r.dwell_seconds for r in reports if r.dwell_seconds is not None]
    gaps = [r.max_interarrival_seconds for r in reports if r.max_interarrival_seconds is not None]
    stability = [r.stability_ratio for r in reports if r.stability_ratio is not None]
    phish = [r.phish_gap_seconds for r in reports if r.phish_gap_seconds is not None]
    segmented = [r for r in reports if r.mode is Mode.SEGMENTED]

    def frac(part: int, whole: int) -> float | None:
        return round(part / whole, 4) if whole else None

    return {
        "cases": len(reports),
        "cases_with_attacker_events": len(with_attack),
        "dwell": {
            "count": len(dwell),
            "at_least_1_day": sum(1 for d in dwell if d >= cfg.day_threshold),
            "at_least_1_week": sum(1 for d in dwell if d >= cfg.week_threshold),
            "fraction_at_least_1_day": frac(
                sum(1 for d in dwell if d >= cfg.day_threshold), len(dwell)
            ),
        },
        "modes": {
            "end_to_end": sum(1 for r in reports if r.mode is Mode.END_TO_END),
            "segmented": len(segmented),
            "indeterminate": sum(1 for r in reports if r.mode is Mode.INDETERMINATE),
        },
        "segmented_low_geo_isp_jaccard": sum(
            1
            for r in segmented
            if (r.jaccard_geo is None or r.jaccard_geo <= 0.3)
            and (r.jaccard_isp is None or r.jaccard_isp <= 0.3)
        ),
        "escalation_after_gap": sum(1 for r in segmented if r.escalation),
        "stability": {
            "count": len(stability),
            "at_most_1": sum(1 for s in stability if s <= 1),
        },
        "email_only_accounts": sum(1 for r in with_attack if r.email_only),
        "email_only_fraction": frac(
            sum(1 for r in with_attack if r.email_only), len(with_attack)
        ),
        "sensitive_ops": {
            "accounts_with_password_change_near_attack": sum(
                1 for r in reports if r.as_dict()["sensitive_ops"]["change_user_password"]
            ),
            "accounts_with_add_oauth_near_attack": sum(
                1 for r in reports if r.as_dict()["sensitive_ops"]["add_oauth"]
            ),
        },
        "phish_gap": {
            "count": len(phish),
            "under_1_day": sum(1 for g in phish if abs(g) < cfg.day_threshold),
            "over_3_days": sum(1 for g in phish if abs(g) >= 3 * cfg.day_threshold),
        },
        "app_usage": aggregate_app_usage([r.apps_accessed for r in reports], email_apps),
    }


def run_pipeline(
    cfg: RunConfig,
    *,
    do_classify: bool,
    do_evaluate: bool,
    do_analyze: bool,
) -> int:
    cfg.validate(required=("events", "geo_table", "compromise_times"))
    inputs = load_inputs(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    truth_tags = load_truth_tags(cfg.truth_sidecar) if cfg.truth_sidecar else None
    overrides = load_overrides(cfg.overrides) if cfg.overrides else []

    diagnostics: dict = {}
    labeled_writer = None
    labeled_handle = None
    if do_classify:
        labeled_handle = open(out / "labeled_events.csv", "w", newline="", encoding="utf-8")
        labeled_writer = csv.writer(labeled_handle, lineterminator="\n")
        labeled_writer.writerow(LABELED_HEADER)

    session_rows: list[SessionRow] = []
    kept_sessions: list[Session] = []
    reports: list[CaseReport] = []
    first_attack_entries: list[tuple[str, str, object]] = []

    cases = insufficient = unclassifiable = labeled_count = attacker_count = 0
    try:
        for result in iter_case_results(cfg, inputs, diagnostics):
            cases += 1
            if result.error:
                insufficient += 1
                continue
            labeled_count += len(result.labeled)
            for item in result.labeled:
                if item.features is None:
                    unclassifiable += 1
                if item.label is Label.ATTACKER:
                    attacker_count += 1
            if labeled_writer is not None:
                labeled_writer.writerows(_labeled_row(item) for item in result.labeled)

            if do_evaluate:
                pairs = _session_truth(
                    sessionize(result.labeled), result, cfg, inputs, truth_tags
                )
                pairs = _sample_sessions(pairs, cfg, result.case.user_id)
                for session, indicators in pairs:
                    kept_sessions.append(session)
                    session_rows.append(
                        SessionRow(
                            user_id=session.user_id,
                            client_ip=session.client_ip,
                            normalized_ua=session.normalized_ua,
                            first_seen=format_timestamp(session.first_seen),
                            events=len(session.events),
                            rule_label=session.rule_label,
                            truth_label=session.truth_label,
                            provenance=session.truth_provenance,
                            indicators=indicators,
                        )
                    )

            if do_analyze:
                report = build_case_report(
                    result.case,
                    result.labeled,
                    inputs.email_app_ids,
                    window=cfg.indicator_window,
                    day_threshold=cfg.day_threshold,
                )
                reports.append(report)
                attackers = [i for i in result.labeled if i.label is Label.ATTACKER]
                if attackers:
                    first_attack_entries.append(
                        (
                            result.case.user_id,
                            report.organization,
                            min(i.event.timestamp for i in attackers),
                        )
                    )
    finally:
        if labeled_handle is not None:
            labeled_handle.close()

    diagnostics.update(
        {
            "cases": cases,
            "insufficient_history": insufficient,
            "labeled_events": labeled_count,
            "attacker_events": attacker_count,
            "unclassifiable_events": unclassifiable,
        }
    )
    if do_classify:
        _write_json(out / "diagnostics.json", diagnostics)

    if do_evaluate:
        if not kept_sessions:
            raise PipelineError("no sessions to evaluate (no classified login events)")
        if overrides:
            apply_overrides(kept_sessions, overrides)
            by_key = {
                (s.user_id, s.client_ip, s.normalized_ua, s.first_seen): s
                for s in kept_sessions
            }
            for row in session_rows:
                session = by_key[(row.user_id, row.client_ip, row.normalized_ua, row.first_seen)]
                row.truth_label = session.truth_label
                row.provenance = session.truth_provenance
        metrics = evaluate(kept_sessions)
        payload = metrics.as_report_dict()
        payload["sessions"] = len(kept_sessions)
        _write_json(out / "metrics.json", payload)
        _write_csv(out / "sessions.csv", SESSION_HEADER, (r.as_row() for r in session_rows))

    if do_analyze:
        selected = reports
        if cfg.dedup:
            chosen = set(dedup_sample(first_attack_entries, cfg.seed))
            selected = [r for r in reports if r.user_id in chosen]
        cases_dir = out / "cases"
        cases_dir.mkdir(exist_ok=True)
        for stale in cases_dir.glob("*.json"):
            stale.unlink()
        for report in selected:
            _write_json(cases_dir / f"{_safe_filename(report.user_id)}.json", report.as_dict())

        aggregate = _aggregate(selected, cfg, inputs.email_app_ids)
        aggregate["dedup"] = {"applied": cfg.dedup, "selected": len(selected)}
        if cfg.breach_list:
            sectors = _load_org_sectors(cfg.org_sectors)
            orgs = [(r.user_id, r.organization) for r in selected]
            sector_map = {
                org: sectors.get(org, "unknown") for _, org in orgs
            }
            counts, total = breach_overlap(orgs, _load_id_list(cfg.breach_list), sector_map)
            aggregate["breach_overlap"] = {
                "organizations_by_sector": counts,
                "breached_accounts": total,
            }
        _write_json(out / "aggregate.json", aggregate)

        _write_ecdf(
            out / "ecdf_dwell.csv",
            [r.dwell_seconds for r in selected if r.dwell_seconds is not None],
        )
        _write_ecdf(
            out / "ecdf_max_interarrival.csv",
            [
                r.max_interarrival_seconds
                for r in selected
                if r.max_interarrival_seconds is not None
            ],
        )
        _write_ecdf(
            out / "ecdf_jaccard_geo.csv",
            [r.jaccard_geo for r in selected if r.jaccard_geo is not None],
        )
        _write_ecdf(
            out / "ecdf_stability.csv",
            [r.stability_ratio for r in selected if r.stability_ratio is not None],
        )
        _write_ecdf(
            out / "ecdf_phish_gap.csv",
            [r.phish_gap_seconds for r in selected if r.phish_gap_seconds is not None],
        )

    return EXIT_OK


def _load_org_sectors(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    sectors = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["organization", "sector"]:
            raise ConfigError(f"{path}: expected header organization,sector")
        for org, sector in reader:
            sectors[org] = sector
    return sectors


def cmd_generate(args: argparse.Namespace) -> int:
    spec = load_scenario(args.spec)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    corpus = generate(spec)
    counts = write_corpus(corpus, args.out)
    if not spec.users:
        print("warning: scenario has no users; corpus is empty", file=sys.stderr)
    print(f"users: {len(spec.users)}")
    print(f"events: {counts['events.jsonl']}")
    for archetype in sorted(corpus.archetype_counts):
        print(f"archetype {archetype}: {corpus.archetype_counts[archetype]}")
    return EXIT_OK


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--events", help="events JSONL path")
    parser.add_argument("--geo", help="geolocation table CSV")
    parser.add_argument("--tor", help="Tor exit list")
    parser.add_argument("--compromise-times", dest="compromise_times")
    parser.add_argument("--emails")
    parser.add_argument("--inbox-rules", dest="inbox_rules")
    parser.add_argument("--overrides", help="manual truth-label overrides CSV")
    parser.add_argument("--centroids", help="subdivision centroid CSV")
    parser.add_argument("--email-apps", dest="email_apps", help="email application-id list")
    parser.add_argument("--breach-list", dest="breach_list", help="breached account list")
    parser.add_argument("--org-sectors", dest="org_sectors", help="organization,sector CSV")
    parser.add_argument("--truth-sidecar", dest="truth_sidecar", help="id,truth_tag CSV")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dedup", action="store_true", default=None)
    parser.add_argument(
        "--session-sample",
        dest="session_sample",
        help="subsample up to N attacker + M benign sessions per user, e.g. 2,1",
    )
    parser.add_argument("--day-threshold", dest="day_threshold", type=float)
    parser.add_argument("--week-threshold", dest="week_threshold", type=float)
    parser.add_argument("--indicator-window", dest="indicator_window", type=float)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ato-forensics",
        description="Classify and analyze attacker activity in compromised cloud accounts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic corpus from a scenario spec")
    gen.add_argument("--spec", required=True, help="scenario JSON file")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--seed", type=int, help="override the scenario seed")

    for name, help_text in (
        ("classify", "label login events as attacker or benign"),
        ("evaluate", "compute ground-truth indicators and confusion metrics"),
        ("analyze", "compute per-case and aggregate behavior analytics"),
        ("all", "classify, evaluate, and analyze in one run"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        _add_pipeline_flags(cmd)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        cfg = build_config(args)
        return run_pipeline(
            cfg,
            do_classify=args.command in ("classify", "all"),
            do_evaluate=args.command in ("evaluate", "all"),
            do_analyze=args.command in ("analyze", "all"),
        )
    except (ConfigError, ScenarioError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: input file does not exist: {exc.filename}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pipeline-level failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
