"""Independent straight-line re-implementation of the profile rule set.

Used only as a test oracle. Deliberately naive and self-contained: it walks
plain (timestamp, country, subdivision, user_agent) tuples, builds the three
profile sets with loops, scores each event, applies the two rules, and
augments the profile once at the phase boundary. It shares no code with the
library beyond the input tuples, including user-agent normalization (inputs
are restricted to whitespace-free device strings, normalized here with a
plain split).
"""

from __future__ import annotations

from datetime import timedelta

MONTH = timedelta(days=30)


def oracle_normalize(user_agent: str) -> str:
    head = user_agent.split("/", 1)[0]
    return head if head else user_agent


def oracle_classify_case(t, rows):
    """rows: (event_id, timestamp, country|None, subdivision|None, ua|None).

    country None means the IP did not resolve; ua None means a non-login
    event. Returns ({event_id: "attacker"|"benign"|"unclassifiable"},
    has_history) where has_history mirrors the profile precondition.
    """
    hist_start, hist_end = t - 2 * MONTH, t - MONTH
    win_start, win_end = t - MONTH, t + MONTH

    countries = set()
    subdivisions = set()
    user_agents = set()
    has_history = False
    for _, when, country, subdivision, ua in rows:
        if ua is None or country is None:
            continue
        if hist_start <= when < hist_end:
            has_history = True
            countries.add(country)
            if subdivision is not None:
                subdivisions.add(subdivision)
            user_agents.add(oracle_normalize(ua))
    if not has_history:
        return {}, False

    def score(country, subdivision, ua):
        if country not in countries:
            geo = 2
        elif subdivision is not None:
            geo = 0 if subdivision in subdivisions else 1
        else:
            geo = 1 if any(s.startswith(country + "-") for s in subdivisions) else 0
        ua_feature = 0 if oracle_normalize(ua) in user_agents else 1
        if geo == 2:
            return "attacker"
        if geo == 1 and ua_feature == 1:
            return "attacker"
        return "benign"

    labels = {}
    benign_phase1 = []
    for event_id, when, country, subdivision, ua in rows:
        if ua is None or not win_start <= when < t:
            continue
        if country is None:
            labels[event_id] = "unclassifiable"
            continue
        verdict = score(country, subdivision, ua)
        labels[event_id] = verdict
        if verdict == "benign":
            benign_phase1.append((country, subdivision, ua))

    for country, subdivision, ua in benign_phase1:
        countries.add(country)
        if subdivision is not None:
            subdivisions.add(subdivision)
        user_agents.add(oracle_normalize(ua))

    for event_id, when, country, subdivision, ua in rows:
        if ua is None or not t <= when <= win_end:
            continue
        if country is None:
            labels[event_id] = "unclassifiable"
            continue
        labels[event_id] = score(country, subdivision, ua)

    return labels, True
