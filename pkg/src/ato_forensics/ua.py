"""User-agent normalization: drop version tokens, keep device/model identity.

Two shapes of user agent appear in cloud audit logs. Compact device strings
like ``iPhone9C4/1706.56`` reduce to the token before the first slash.
Browser-style strings (anything containing whitespace) keep their structure
but lose every version marker: ``Foo/1.2`` suffixes and standalone
digits-and-dots tokens are removed, then whitespace is re-collapsed, so
``Mozilla/5.0 (Windows NT 10.0; Win64; x64) Gecko/20100101 Firefox/70.0``
becomes ``Mozilla (Windows NT; Win64; x64) Gecko Firefox``.

The rewrite runs to a fixpoint, so normalization is idempotent by
construction, and it never yields an empty string: when stripping would
erase everything, the whitespace-collapsed input is kept instead.
"""

from __future__ import annotations

import re
from functools import lru_cache

# NormalizedUA values are plain strings; the alias marks intent in signatures.
NormalizedUA = str

_SLASH_VERSION = re.compile(r"/[0-9]\S*")
_VERSION_TOKEN = re.compile(r"(?<![\w.])\d+(?:\.\d+)*(?![\w.])")
_SPACE_BEFORE_PUNCT = re.compile(r"\s+([;,)\]])")
_WHITESPACE = re.compile(r"\s")


class EmptyUserAgent(ValueError):
    """Raised for empty or whitespace-only raw user-agent strings."""


def _strip_versions_once(text: str) -> str:
    if not _WHITESPACE.search(text):
        head = text.split("/", 1)[0]
        return head if head else text
    stripped = _SLASH_VERSION.sub("", text)
    stripped = _VERSION_TOKEN.sub("", stripped)
    stripped = _SPACE_BEFORE_PUNCT.sub(r"\1", stripped)
    collapsed = " ".join(stripped.split())
    return collapsed if collapsed else " ".join(text.split())


@lru_cache(maxsize=65536)
def normalize_ua(raw: str) -> NormalizedUA:
    """Return the version-free form of a raw user-agent string."""
    if not raw or not raw.strip():
        raise EmptyUserAgent("user agent is empty")
    text = raw.strip()
    # Every rewrite either shrinks the string or leaves it unchanged, so
    # this terminates; the fixpoint makes the function idempotent.
    while True:
        rewritten = _strip_versions_once(text)
        if rewritten == text:
            return text
        text = rewritten
