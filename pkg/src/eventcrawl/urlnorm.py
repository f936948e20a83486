"""URL canonicalization for index keys and crawl seen-set identity.

Canonical form: lowercase scheme/host, no fragment, no default port,
query string preserved verbatim (parameter order kept to avoid aliasing
distinct archived resources), percent-escapes of unreserved characters
decoded. Only http/https URLs are considered crawlable.
"""

from __future__ import annotations

import re
from urllib.parse import urljoin, urlsplit, urlunsplit

__all__ = ["CanonicalizationError", "canonicalize_url"]

# RFC 3986 unreserved characters; their percent-escapes are equivalent
# to the bare character and are decoded for a stable key.
_UNRESERVED = set(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)

_PCT_RE = re.compile(r"%([0-9A-Fa-f]{2})")

_DEFAULT_PORTS = {"http": 80, "https": 443}


class CanonicalizationError(ValueError):
    """Raised for URLs that cannot be turned into a canonical crawl key."""


def _decode_unreserved(component: str) -> str:
    def repl(match: re.Match[str]) -> str:
        char = chr(int(match.group(1), 16))
        return char if char in _UNRESERVED else match.group(0)

    return _PCT_RE.sub(repl, component)


def canonicalize_url(url: str, base: str | None = None) -> str:
    """Resolve ``url`` (optionally against ``base``) into canonical form.

    Raises :class:`CanonicalizationError` for empty or unparseable input,
    for relative references without a base, and for non-http(s) schemes.
    """
    if not url or not url.strip():
        raise CanonicalizationError("empty URL")
    url = url.strip()

    if base is not None:
        url = urljoin(base, url)

    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise CanonicalizationError(f"unparseable URL: {url!r}") from exc

    scheme = parts.scheme.lower()
    if not scheme:
        raise CanonicalizationError(f"relative URL without base: {url!r}")
    if scheme not in _DEFAULT_PORTS:
        raise CanonicalizationError(f"unsupported scheme: {scheme!r}")

    host = parts.hostname
    if not host:
        raise CanonicalizationError(f"URL has no host: {url!r}")
    host = host.lower()

    try:
        port = parts.port
    except ValueError as exc:
        raise CanonicalizationError(f"invalid port in URL: {url!r}") from exc
    netloc = host
    if port is not None and port != _DEFAULT_PORTS[scheme]:
        netloc = f"{host}:{port}"

    path = _decode_unreserved(parts.path) or "/"
    query = _decode_unreserved(parts.query)

    # Fragment dropped: it never reaches the server, so snapshots are
    # keyed without it.
    return urlunsplit((scheme, netloc, path, query, ""))
