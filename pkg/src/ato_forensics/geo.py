"""Offline IP geolocation: longest-prefix CIDR lookup plus Tor exit flagging.

The table is a reproducible stand-in for a commercial geolocation service:
an ordered list of (CIDR, GeoInfo) entries with longest-prefix-match
semantics, loaded once and queried read-only. Tor exit nodes are a separate
flat list; the Tor flag is computed from it even when no prefix matches.
"""

from __future__ import annotations

import csv
import ipaddress
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .events import AuditEvent

# Lookup failures are carried in-band, never raised.
NOTFOUND_PRIVATE = "private"
NOTFOUND_UNMAPPED = "unmapped"
NOTFOUND_NO_IP = "no_ip"

_PRIVATE_V4 = (
    ipaddress.ip_network("10.0.0.0/8"),
    ipaddress.ip_network("172.16.0.0/12"),
    ipaddress.ip_network("192.168.0.0/16"),
    ipaddress.ip_network("127.0.0.0/8"),
)
_LOOPBACK_V6 = ipaddress.ip_network("::1/128")

_CACHE_LIMIT = 1 << 17


@dataclass(frozen=True, slots=True)
class GeoInfo:
    """Resolved provenance of an IP address."""

    country: str
    subdivision: str | None = None
    isp: str | None = None
    is_tor: bool = False

    def __post_init__(self) -> None:
        if self.subdivision is not None and not self.subdivision.startswith(self.country):
            raise ValueError(
                f"subdivision {self.subdivision!r} does not belong to country {self.country!r}"
            )


@dataclass(frozen=True, slots=True)
class NotFound:
    """Lookup failure marker; still carries the Tor verdict when known."""

    reason: str
    is_tor: bool = False


class GeoTable:
    """Immutable longest-prefix-match table over (CIDR, GeoInfo) entries.

    Overlapping prefixes are allowed; the most specific one wins. Among
    entries with the same prefix, the last one loaded wins. Lookups are pure
    and safe to share across threads.
    """

    def __init__(
        self,
        entries: Iterable[tuple[str, GeoInfo]] = (),
        tor_exits: Iterable[str] = (),
    ) -> None:
        by_len: dict[tuple[int, int], dict[int, GeoInfo]] = {}
        for cidr, info in entries:
            network = ipaddress.ip_network(cidr, strict=True)
            key = (network.version, network.prefixlen)
            shifted = int(network.network_address) >> (network.max_prefixlen - network.prefixlen)
            by_len.setdefault(key, {})[shifted] = info
        self._v4 = sorted(
            ((plen, table) for (ver, plen), table in by_len.items() if ver == 4),
            reverse=True,
        )
        self._v6 = sorted(
            ((plen, table) for (ver, plen), table in by_len.items() if ver == 6),
            reverse=True,
        )
        self._tor = frozenset(str(ipaddress.ip_address(ip)) for ip in tor_exits)
        self._cache: dict[str, GeoInfo | NotFound] = {}

    @classmethod
    def from_csv(cls, path: str | Path, tor_path: str | Path | None = None) -> "GeoTable":
        """Load ``cidr,country,subdivision,isp`` rows plus an optional Tor list."""
        entries = []
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != ["cidr", "country", "subdivision", "isp"]:
                raise ValueError(f"{path}: expected header cidr,country,subdivision,isp")
            for cidr, country, subdivision, isp in reader:
                entries.append(
                    (cidr, GeoInfo(country, subdivision or None, isp or None))
                )
        tor = load_tor_exits(tor_path) if tor_path is not None else ()
        return cls(entries, tor)

    def is_tor_exit(self, ip: str) -> bool:
        return str(ipaddress.ip_address(ip)) in self._tor

    def resolve(self, ip: str) -> GeoInfo | NotFound:
        """Longest-prefix lookup; private/reserved ranges never resolve."""
        hit = self._cache.get(ip)
        if hit is not None:
            return hit
        addr = ipaddress.ip_address(ip)
        is_tor = str(addr) in self._tor

        if addr.version == 4:
            private = any(addr in net for net in _PRIVATE_V4)
            tables = self._v4
            max_len = 32
        else:
            private = addr in _LOOPBACK_V6
            tables = self._v6
            max_len = 128

        result: GeoInfo | NotFound
        if private:
            result = NotFound(NOTFOUND_PRIVATE, is_tor)
        else:
            value = int(addr)
            for plen, table in tables:
                info = table.get(value >> (max_len - plen))
                if info is not None:
                    result = replace(info, is_tor=True) if is_tor else info
                    break
            else:
                result = NotFound(NOTFOUND_UNMAPPED, is_tor)

        if len(self._cache) >= _CACHE_LIMIT:
            self._cache.clear()
        self._cache[ip] = result
        return result


def resolve(ip: str, table: GeoTable) -> GeoInfo | NotFound:
    return table.resolve(ip)


def enrich(
    events: Iterable[AuditEvent], table: GeoTable
) -> list[tuple[AuditEvent, GeoInfo | NotFound]]:
    """Pair every event with its lookup result, preserving input order.

    Non-login events (no client IP / user agent) map to NotFound(no_ip).
    """
    no_ip = NotFound(NOTFOUND_NO_IP)
    return [
        (ev, table.resolve(ev.client_ip) if ev.is_login else no_ip)
        for ev in events
    ]


def load_tor_exits(path: str | Path) -> frozenset[str]:
    """One IP per line; blank lines and ``#`` comments allowed."""
    exits = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            text = line.split("#", 1)[0].strip()
            if text:
                exits.add(str(ipaddress.ip_address(text)))
    return frozenset(exits)
