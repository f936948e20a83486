"""Archive store: WARC indexing, snapshot resolution, payload access.

The index is a sorted plain-text file, one line per indexed capture::

    canonical_url SP timestamp14 SP warc_file SP offset SP length SP status SP media_type

Only HTTP 200 responses with an HTML media type are indexed. Loaded
indexes are immutable and safe for concurrent readers; lookups are
dictionary-backed, independent of archive size.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from . import warc
from .htmlscan import ScannedPage, decode_html_bytes, outlinks, scan_html
from .timeutil import format_ts14, parse_iso8601, parse_ts14, to_epoch
from .urlnorm import CanonicalizationError, canonicalize_url

__all__ = [
    "ArchiveIndex",
    "ArchivedDocument",
    "CollectionManifest",
    "IndexSummary",
    "SnapshotRecord",
    "build_index",
    "fetch_document",
    "resolve_snapshots",
    "write_collection",
]

logger = logging.getLogger(__name__)

_GZIP_MAGIC = b"\x1f\x8b"


@dataclass(frozen=True, order=True)
class SnapshotRecord:
    """One archived capture of a URL and where its bytes live."""

    canonical_url: str
    capture_time: str  # 14-digit YYYYMMDDhhmmss, UTC
    warc_file: str
    offset: int
    length: int
    http_status: int = 200
    media_type: str = "text/html"

    def capture_epoch(self) -> float:
        return to_epoch(parse_ts14(self.capture_time))

    def to_line(self) -> str:
        return (
            f"{self.canonical_url} {self.capture_time} {self.warc_file} "
            f"{self.offset} {self.length} {self.http_status} {self.media_type}"
        )

    @classmethod
    def from_line(cls, line: str) -> "SnapshotRecord":
        parts = line.split(" ")
        if len(parts) < 7:
            raise ValueError(f"bad index line: {line!r}")
        # warc_file may contain spaces; everything else is space-free.
        url, ts = parts[0], parts[1]
        offset, length, status, media_type = parts[-4:]
        warc_file = " ".join(parts[2:-4])
        parse_ts14(ts)  # validates the timestamp shape
        return cls(url, ts, warc_file, int(offset), int(length), int(status), media_type)


@dataclass
class ArchivedDocument:
    """A fetched snapshot: HTTP headers plus the byte-exact payload."""

    snapshot: SnapshotRecord
    headers: list[tuple[str, str]]
    body: bytes
    _scanned: ScannedPage | None = field(default=None, repr=False, compare=False)

    def header(self, name: str) -> str | None:
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return None

    def declared_charset(self) -> str | None:
        content_type = self.header("Content-Type") or ""
        for part in content_type.split(";")[1:]:
            key, sep, value = part.partition("=")
            if sep and key.strip().lower() == "charset":
                return value.strip().strip("\"'")
        return None

    def scanned(self) -> ScannedPage:
        """Parse the HTML body once; later calls reuse the result."""
        if self._scanned is None:
            html = decode_html_bytes(self.body, self.declared_charset())
            self._scanned = scan_html(html)
        return self._scanned


@dataclass(frozen=True)
class IndexSummary:
    url_count: int
    record_count: int
    skipped: int = 0


class ArchiveIndex:
    """Immutable URL -> snapshots lookup over one or more WARC files."""

    def __init__(self, entries: dict[str, tuple[SnapshotRecord, ...]], path: Path | None = None):
        self._entries = entries
        self.path = path
        self.url_count = len(entries)
        self.record_count = sum(len(v) for v in entries.values())

    @classmethod
    def open(cls, index_path: str | Path) -> "ArchiveIndex":
        """Load an index file; verifies every referenced WARC exists."""
        index_path = Path(index_path)
        entries: dict[str, list[SnapshotRecord]] = {}
        warc_files: set[str] = set()
        for line in index_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = SnapshotRecord.from_line(line)
            entries.setdefault(record.canonical_url, []).append(record)
            warc_files.add(record.warc_file)
        missing = sorted(f for f in warc_files if not Path(f).is_file())
        if missing:
            raise FileNotFoundError(f"index references missing WARC files: {missing}")
        frozen = {
            url: tuple(sorted(records, key=lambda r: (r.capture_time, r.warc_file, r.offset)))
            for url, records in entries.items()
        }
        return cls(frozen, index_path)

    def resolve_snapshots(self, url: str) -> list[SnapshotRecord]:
        """All snapshots of a URL, ascending capture time; [] if absent."""
        try:
            key = canonicalize_url(url)
        except CanonicalizationError:
            return []
        return list(self._entries.get(key, ()))

    def urls(self) -> Iterator[str]:
        return iter(self._entries)


def resolve_snapshots(index: ArchiveIndex, url: str) -> list[SnapshotRecord]:
    return index.resolve_snapshots(url)


_HTML_TYPES = ("text/html", "application/xhtml")


def _is_html(media_type: str) -> bool:
    return any(marker in media_type for marker in _HTML_TYPES)


def build_index(
    warc_paths: Iterable[str | Path], index_path: str | Path
) -> IndexSummary:
    """Scan WARC files and write the sorted lookup index.

    Indexes HTTP 200 HTML responses only. Malformed records are skipped
    and tallied; an unreadable file aborts the build.
    """
    records: list[SnapshotRecord] = []
    skipped = 0
    for path in warc_paths:
        path = Path(path)
        resolved = str(path.resolve())
        for item in warc.iter_raw_records(path):
            if isinstance(item, warc.MalformedRecord):
                logger.warning("skipping malformed record: %s", item)
                skipped += 1
                continue
            record = _index_record(item, resolved)
            if record is not None:
                records.append(record)

    records.sort(key=lambda r: (r.canonical_url, r.capture_time, r.warc_file, r.offset))
    index_path = Path(index_path)
    index_path.parent.mkdir(parents=True, exist_ok=True)
    with open(index_path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.to_line() + "\n")
    url_count = len({r.canonical_url for r in records})
    return IndexSummary(url_count=url_count, record_count=len(records), skipped=skipped)


def _index_record(record: warc.RawRecord, warc_file: str) -> SnapshotRecord | None:
    if record.record_type != "response":
        return None
    uri = record.target_uri
    date = record.header("WARC-Date")
    if not uri or not date:
        return None
    try:
        canonical = canonicalize_url(uri)
    except CanonicalizationError:
        return None
    try:
        capture = format_ts14(parse_iso8601(date))
        status, headers, _payload = warc.parse_http_response(record.block)
    except (ValueError, warc.MalformedRecord):
        return None
    if status != 200:
        return None
    content_type = next(
        (value for name, value in headers if name.lower() == "content-type"), ""
    )
    media_type = content_type.split(";")[0].strip().lower() or "unknown"
    if not _is_html(media_type):
        return None
    return SnapshotRecord(
        canonical_url=canonical,
        capture_time=capture,
        warc_file=warc_file,
        offset=record.offset,
        length=record.length,
        http_status=status,
        media_type=media_type,
    )


def fetch_document(index: ArchiveIndex, snapshot: SnapshotRecord) -> ArchivedDocument:
    """Read the snapshot's record and return headers plus exact payload.

    Raises :class:`warc.MalformedRecord` (with file and offset) if the
    stored record is truncated or corrupt.
    """
    record = warc.read_record_span(snapshot.warc_file, snapshot.offset, snapshot.length)
    _status, headers, payload = warc.parse_http_response(record.block)
    return ArchivedDocument(snapshot=snapshot, headers=headers, body=payload)


@dataclass(frozen=True)
class CollectionManifest:
    warc_path: Path
    manifest_path: Path
    edges_path: Path
    record_count: int
    edge_count: int


def write_collection(
    documents: Iterable[tuple[ArchivedDocument, float]], out_path: str | Path
) -> CollectionManifest:
    """Materialize an extracted collection under ``out_path``.

    Writes the chosen snapshots verbatim (original record bytes, capture
    timestamps untouched) into ``collection.warc.gz``, plus a manifest
    CSV (url, capture_time, relevance, out_degree) and the edge list of
    links retained within the collection.
    """
    out_dir = Path(out_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    warc_path = out_dir / "collection.warc.gz"
    manifest_path = out_dir / "manifest.csv"
    edges_path = out_dir / "edges.csv"

    items = list(documents)
    member_urls = {doc.snapshot.canonical_url for doc, _ in items}
    edges: list[tuple[str, str]] = []
    retained_degree: dict[str, int] = {}

    with warc.WarcWriter(warc_path, compress=True) as writer:
        for document, _relevance in items:
            snapshot = document.snapshot
            raw = warc.read_raw_span(snapshot.warc_file, snapshot.offset, snapshot.length)
            # Already-compressed members are copied through untouched.
            writer.write_record_bytes(raw, precompressed=raw[:2] == _GZIP_MAGIC)
            targets = [
                target
                for target in outlinks(document.scanned(), snapshot.canonical_url)
                if target in member_urls
            ]
            retained_degree[snapshot.canonical_url] = len(targets)
            edges.extend((snapshot.canonical_url, target) for target in targets)

    with open(manifest_path, "w", encoding="utf-8", newline="") as handle:
        out = csv.writer(handle)
        out.writerow(["url", "capture_time", "relevance", "out_degree"])
        for document, relevance in items:
            snapshot = document.snapshot
            out.writerow(
                [
                    snapshot.canonical_url,
                    snapshot.capture_time,
                    repr(relevance),
                    retained_degree[snapshot.canonical_url],
                ]
            )

    with open(edges_path, "w", encoding="utf-8", newline="") as handle:
        out = csv.writer(handle)
        out.writerow(["src_url", "dst_url"])
        out.writerows(edges)

    return CollectionManifest(
        warc_path=warc_path,
        manifest_path=manifest_path,
        edges_path=edges_path,
        record_count=len(items),
        edge_count=len(edges),
    )
