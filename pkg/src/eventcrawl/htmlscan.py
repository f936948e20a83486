"""One-pass HTML scanning shared by text, link, and date extraction.

The crawler parses each fetched page exactly once; the extraction
operations all work from the resulting :class:`ScannedPage`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .urlnorm import CanonicalizationError, canonicalize_url

__all__ = ["ScannedPage", "decode_html_bytes", "outlinks", "scan_html"]

_WS_RE = re.compile(r"\s+")
_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([A-Za-z0-9_.:-]+)""", re.IGNORECASE
)

# Elements whose character data is never visible text.
_INVISIBLE = {"script", "style", "noscript", "template"}


@dataclass
class ScannedPage:
    """Everything later stages need from one HTML document."""

    text: str = ""
    links: list[str] = field(default_factory=list)  # raw hrefs, document order
    base_href: str | None = None
    meta_dates: dict[str, str] = field(default_factory=dict)  # lowercased key -> content
    time_datetimes: list[str] = field(default_factory=list)  # <time datetime=...> values


class _Scanner(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.page = ScannedPage()
        self._chunks: list[str] = []
        self._invisible_depth = 0

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in _INVISIBLE:
            self._invisible_depth += 1
            return
        attr_map = {name.lower(): value for name, value in attrs if value is not None}
        if tag == "a":
            href = attr_map.get("href")
            if href:
                self.page.links.append(href)
        elif tag == "base":
            if self.page.base_href is None and attr_map.get("href"):
                self.page.base_href = attr_map["href"]
        elif tag == "meta":
            key = attr_map.get("property") or attr_map.get("name")
            content = attr_map.get("content")
            if key and content:
                self.page.meta_dates.setdefault(key.strip().lower(), content.strip())
        elif tag == "time":
            value = attr_map.get("datetime")
            if value:
                self.page.time_datetimes.append(value.strip())

    def handle_endtag(self, tag: str) -> None:
        if tag in _INVISIBLE and self._invisible_depth > 0:
            self._invisible_depth -= 1

    def handle_data(self, data: str) -> None:
        if self._invisible_depth == 0 and data:
            self._chunks.append(data)

    def finish(self) -> ScannedPage:
        self.page.text = _WS_RE.sub(" ", " ".join(self._chunks)).strip()
        return self.page


def decode_html_bytes(body: bytes, declared_charset: str | None = None) -> str:
    """Decode HTML bytes, tolerating mis-declared charsets.

    Tries the charset declared in HTTP headers, then an in-page ``<meta
    charset>``, then UTF-8; undecodable bytes are replaced, never fatal.
    """
    charsets = []
    if declared_charset:
        charsets.append(declared_charset)
    match = _META_CHARSET_RE.search(body[:2048])
    if match:
        charsets.append(match.group(1).decode("ascii", "replace"))
    charsets.append("utf-8")
    for charset in charsets:
        try:
            return body.decode(charset, errors="replace")
        except LookupError:
            continue
    return body.decode("utf-8", errors="replace")


def scan_html(html: str) -> ScannedPage:
    """Scan an HTML document in one pass; never raises on bad markup."""
    scanner = _Scanner()
    try:
        scanner.feed(html)
        scanner.close()
    except Exception:  # pragma: no cover - HTMLParser is lenient already
        pass
    return scanner.finish()


def outlinks(page: ScannedPage, document_url: str) -> list[str]:
    """Canonical outgoing link targets in first-occurrence order.

    Hrefs resolve against the in-page base element when present, else the
    document URL; non-http(s) and unparseable targets are dropped.
    """
    base = document_url
    if page.base_href:
        try:
            base = canonicalize_url(page.base_href, document_url)
        except CanonicalizationError:
            pass
    seen: set[str] = set()
    result: list[str] = []
    for href in page.links:
        if href.startswith("#"):  # fragment-only: same resource
            continue
        try:
            url = canonicalize_url(href, base)
        except CanonicalizationError:
            continue
        if url not in seen:
            seen.add(url)
            result.append(url)
    return result
