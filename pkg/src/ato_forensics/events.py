"""Audit-log ingestion: typed event model, streaming JSONL parsing, case assembly.

The corpus wire format is line-delimited JSON using the field names found in
Office 365 unified audit logs (``Id``, ``UserId``, ``UserAgent``, ``ClientIp``,
``Operation``, ``ApplicationId``, ``CreationTime``). Parsing is a single
streaming pass: every input line becomes exactly one :class:`AuditEvent` or
one :class:`RejectRecord`, so a corrupt corpus never aborts a run and
``accepted + rejected`` always equals the input line count.

Companion records (confirmed-compromise times, sent emails, inbox-rule
detections) arrive as small CSV files and are joined per user into
:class:`CompromiseCase` objects by :func:`build_cases`.
"""

from __future__ import annotations

import csv
import ipaddress
import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .constants import SECONDS_PER_MONTH

# Wire-format field names.
F_ID = "Id"
F_USER = "UserId"
F_UA = "UserAgent"
F_IP = "ClientIp"
F_OP = "Operation"
F_APP = "ApplicationId"
F_TIME = "CreationTime"

_MONTH = timedelta(seconds=SECONDS_PER_MONTH)

# Reject reasons.
REJECT_SYNTAX = "syntax"
REJECT_MISSING_FIELD = "missing_field"
REJECT_BAD_TYPE = "bad_type"
REJECT_BAD_TIMESTAMP = "bad_timestamp"
REJECT_BAD_IP = "bad_ip"
REJECT_DUPLICATE_ID = "duplicate_id"


class CorpusFormatError(ValueError):
    """A companion CSV file has a wrong header or an unusable row."""


def parse_timestamp(raw: str) -> datetime:
    """Parse an ISO-8601 instant carrying an explicit UTC offset.

    Naive timestamps raise ``ValueError``. The result is normalized to UTC
    and truncated to whole seconds.
    """
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp lacks a UTC offset: {raw!r}")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    """Canonical wire form: UTC, second resolution, ``Z`` suffix."""
    utc = dt.astimezone(timezone.utc).replace(microsecond=0)
    return utc.isoformat().replace("+00:00", "Z")


@dataclass(frozen=True, slots=True)
class AuditEvent:
    """One cloud audit record (login or account operation).

    Only login / application-access events carry a user agent and client IP;
    an event is a "login event" iff both are present.
    """

    id: str
    user_id: str
    timestamp: datetime
    operation: str
    user_agent: str | None = None
    client_ip: str | None = None
    application_id: str | None = None

    @property
    def is_login(self) -> bool:
        return self.user_agent is not None and self.client_ip is not None

    @property
    def epoch(self) -> int:
        return int(self.timestamp.timestamp())


@dataclass(frozen=True, slots=True)
class RejectRecord:
    """A corpus line that could not become an AuditEvent."""

    line_no: int
    reason: str
    detail: str = ""


@dataclass(frozen=True, slots=True)
class EmailRecord:
    """A sent email with a pre-assigned external phishing judgment."""

    sender: str
    sent_at: datetime
    flagged_phishing: bool


@dataclass(frozen=True)
class CompromiseCase:
    """One confirmed-compromise account with its joined records.

    ``t`` is the earliest confirmed compromise instant. ``events`` holds all
    of the user's audit events sorted by (timestamp, id).
    ``insufficient_history`` marks accounts with no login events in the
    historical window [t-60d, t-30d), which the classifier cannot profile.
    """

    user_id: str
    t: datetime
    events: tuple[AuditEvent, ...]
    emails: tuple[EmailRecord, ...] = ()
    inbox_rule_detections: tuple[datetime, ...] = ()
    insufficient_history: bool = False

    def history_window(self) -> tuple[datetime, datetime]:
        """[start, end) of the historical-profile window."""
        return self.t - 2 * _MONTH, self.t - _MONTH

    def analysis_window(self) -> tuple[datetime, datetime]:
        """[start, end] of the classified two-month window around t."""
        return self.t - _MONTH, self.t + _MONTH


def _optional_str(record: dict, key: str) -> str | None:
    value = record.get(key)
    if value is None or value == "":
        return None
    if not isinstance(value, str):
        raise TypeError(key)
    return value


def iter_corpus(lines: Iterable[str]) -> Iterator[AuditEvent | RejectRecord]:
    """Stream a JSONL corpus, yielding one event or reject per input line.

    Memory use is bounded by the set of seen event ids (needed for
    duplicate detection) plus one line; nothing else is buffered. The first
    occurrence of a duplicated id wins.
    """
    seen_ids: set[str] = set()
    # Share repeated field strings (operations, UAs, IPs, app ids) across
    # events; audit corpora repeat a small vocabulary millions of times.
    memo: dict[str, str] = {}

    def shared(value: str) -> str:
        return memo.setdefault(value, value)

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            yield RejectRecord(line_no, REJECT_SYNTAX, "blank line")
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            yield RejectRecord(line_no, REJECT_SYNTAX, str(exc))
            continue
        if not isinstance(record, dict):
            yield RejectRecord(line_no, REJECT_SYNTAX, "not a JSON object")
            continue

        missing = [k for k in (F_ID, F_USER, F_OP, F_TIME) if not record.get(k)]
        if missing:
            yield RejectRecord(line_no, REJECT_MISSING_FIELD, ",".join(missing))
            continue
        if not all(isinstance(record[k], str) for k in (F_ID, F_USER, F_OP, F_TIME)):
            yield RejectRecord(line_no, REJECT_BAD_TYPE, "required field not a string")
            continue

        try:
            user_agent = _optional_str(record, F_UA)
            client_ip = _optional_str(record, F_IP)
            application_id = _optional_str(record, F_APP)
        except TypeError as exc:
            yield RejectRecord(line_no, REJECT_BAD_TYPE, f"{exc} not a string")
            continue

        try:
            timestamp = parse_timestamp(record[F_TIME])
        except ValueError as exc:
            yield RejectRecord(line_no, REJECT_BAD_TIMESTAMP, str(exc))
            continue

        if client_ip is not None:
            try:
                ipaddress.ip_address(client_ip)
            except ValueError:
                yield RejectRecord(line_no, REJECT_BAD_IP, client_ip)
                continue

        event_id = record[F_ID]
        if event_id in seen_ids:
            yield RejectRecord(line_no, REJECT_DUPLICATE_ID, event_id)
            continue
        seen_ids.add(event_id)

        yield AuditEvent(
            id=event_id,
            user_id=record[F_USER].lower(),
            timestamp=timestamp,
            operation=shared(record[F_OP]),
            user_agent=shared(user_agent) if user_agent is not None else None,
            client_ip=shared(client_ip) if client_ip is not None else None,
            application_id=shared(application_id) if application_id is not None else None,
        )


def parse_corpus(lines: Iterable[str]) -> tuple[list[AuditEvent], list[RejectRecord]]:
    """Collect a corpus into accepted events and rejects (order preserved)."""
    accepted: list[AuditEvent] = []
    rejected: list[RejectRecord] = []
    for item in iter_corpus(lines):
        if isinstance(item, AuditEvent):
            accepted.append(item)
        else:
            rejected.append(item)
    return accepted, rejected


def event_to_record(event: AuditEvent) -> dict:
    """Canonical wire-format mapping; absent optional fields are omitted."""
    record = {F_ID: event.id, F_USER: event.user_id}
    if event.user_agent is not None:
        record[F_UA] = event.user_agent
    if event.client_ip is not None:
        record[F_IP] = event.client_ip
    record[F_OP] = event.operation
    if event.application_id is not None:
        record[F_APP] = event.application_id
    record[F_TIME] = format_timestamp(event.timestamp)
    return record


def serialize_events(events: Iterable[AuditEvent]) -> Iterator[str]:
    for event in events:
        yield json.dumps(event_to_record(event), separators=(", ", ": "))


def _read_csv(path: str | Path, expected_header: Sequence[str]) -> Iterator[list[str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(expected_header):
            raise CorpusFormatError(
                f"{path}: expected header {','.join(expected_header)}, got {header}"
            )
        for row in reader:
            if not row:
                continue
            if len(row) != len(expected_header):
                raise CorpusFormatError(f"{path}: malformed row {row!r}")
            yield row


def load_compromise_times(path: str | Path) -> dict[str, datetime]:
    """CSV ``user_id,confirmed_at`` -> earliest confirmed instant per user."""
    times: dict[str, datetime] = {}
    for user_id, confirmed_at in _read_csv(path, ("user_id", "confirmed_at")):
        user = user_id.lower()
        t = parse_timestamp(confirmed_at)
        if user not in times or t < times[user]:
            times[user] = t
    return times


def load_emails(path: str | Path) -> list[EmailRecord]:
    """CSV ``sender,sent_at,flagged_phishing`` with a 0/1 flag column."""
    records = []
    for sender, sent_at, flagged in _read_csv(path, ("sender", "sent_at", "flagged_phishing")):
        if flagged not in ("0", "1"):
            raise CorpusFormatError(f"{path}: flagged_phishing must be 0 or 1, got {flagged!r}")
        records.append(EmailRecord(sender.lower(), parse_timestamp(sent_at), flagged == "1"))
    return records


def load_inbox_rule_detections(path: str | Path) -> dict[str, list[datetime]]:
    """CSV ``user_id,detected_at`` -> sorted detection instants per user."""
    detections: dict[str, list[datetime]] = {}
    for user_id, detected_at in _read_csv(path, ("user_id", "detected_at")):
        detections.setdefault(user_id.lower(), []).append(parse_timestamp(detected_at))
    for instants in detections.values():
        instants.sort()
    return detections


def has_historical_login(events: Iterable[AuditEvent], t: datetime) -> bool:
    start, end = t - 2 * _MONTH, t - _MONTH
    return any(ev.is_login and start <= ev.timestamp < end for ev in events)


def build_cases(
    events: Iterable[AuditEvent],
    compromise_times: Mapping[str, datetime],
    emails: Iterable[EmailRecord] = (),
    rule_detections: Mapping[str, Sequence[datetime]] | None = None,
) -> list[CompromiseCase]:
    """Assemble one case per confirmed-compromise user.

    Events of users absent from ``compromise_times`` are dropped. Per-user
    events are sorted by (timestamp, id); the returned cases are sorted by
    user id. Users without any historical login event are flagged
    ``insufficient_history`` rather than dropped.
    """
    per_user: dict[str, list[AuditEvent]] = {u: [] for u in compromise_times}
    for event in events:
        bucket = per_user.get(event.user_id)
        if bucket is not None:
            bucket.append(event)

    emails_by_sender: dict[str, list[EmailRecord]] = {}
    for email in emails:
        emails_by_sender.setdefault(email.sender, []).append(email)
    rule_detections = rule_detections or {}

    cases = []
    for user_id in sorted(compromise_times):
        t = compromise_times[user_id]
        user_events = sorted(per_user[user_id], key=lambda ev: (ev.timestamp, ev.id))
        user_emails = sorted(emails_by_sender.get(user_id, ()), key=lambda em: em.sent_at)
        cases.append(
            CompromiseCase(
                user_id=user_id,
                t=t,
                events=tuple(user_events),
                emails=tuple(user_emails),
                inbox_rule_detections=tuple(sorted(rule_detections.get(user_id, ()))),
                insufficient_history=not has_historical_login(user_events, t),
            )
        )
    return cases
