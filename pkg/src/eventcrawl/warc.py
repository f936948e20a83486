"""Minimal WARC 1.0/1.1 reader and writer.

Reads response records with their on-disk byte spans so an index can
point back at them, and writes deterministic records (fixed header
order, explicit record IDs and dates, gzip members with zero mtime).
Compression is detected per record, so files mixing plain and gzipped
members still read correctly.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

__all__ = [
    "MalformedRecord",
    "RawRecord",
    "WarcWriter",
    "build_response_record",
    "gzip_member",
    "iter_raw_records",
    "parse_http_response",
    "read_record_span",
]

_GZIP_MAGIC = b"\x1f\x8b"
_CRLF = b"\r\n"
_HEADER_END = b"\r\n\r\n"


class MalformedRecord(ValueError):
    """A record that cannot be parsed; carries file and offset context."""

    def __init__(self, message: str, path: str | Path = "", offset: int = -1):
        location = f" ({path} @ {offset})" if offset >= 0 else ""
        super().__init__(f"{message}{location}")
        self.path = str(path)
        self.offset = offset


@dataclass(frozen=True)
class RawRecord:
    """One WARC record plus its on-disk span.

    ``length`` covers the full span (the compressed member for gzipped
    records), so ``data[offset:offset+length]`` is a self-contained,
    relocatable slice.
    """

    offset: int
    length: int
    version: str
    headers: tuple[tuple[str, str], ...]
    block: bytes

    def header(self, name: str) -> str | None:
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return None

    @property
    def record_type(self) -> str:
        return (self.header("WARC-Type") or "").lower()

    @property
    def target_uri(self) -> str:
        uri = self.header("WARC-Target-URI") or ""
        # Some writers wrap the URI in angle brackets.
        return uri[1:-1] if uri.startswith("<") and uri.endswith(">") else uri


def _split_record_span(data: bytes, pos: int, path: str | Path) -> tuple[bytes, int]:
    """Return (uncompressed record bytes, end position) for the record at pos."""
    if data[pos : pos + 2] == _GZIP_MAGIC:
        decomp = zlib.decompressobj(wbits=16 + zlib.MAX_WBITS)
        try:
            raw = decomp.decompress(data[pos:])
        except zlib.error as exc:
            raise MalformedRecord(f"bad gzip member: {exc}", path, pos) from exc
        if not decomp.eof:
            raise MalformedRecord("truncated gzip member", path, pos)
        end = len(data) - len(decomp.unused_data)
        return raw, end

    head_end = data.find(_HEADER_END, pos)
    if head_end < 0:
        raise MalformedRecord("record header never terminates", path, pos)
    head = data[pos:head_end]
    content_length = _content_length_of(head, path, pos)
    end = head_end + len(_HEADER_END) + content_length + len(_HEADER_END)
    if end > len(data):
        raise MalformedRecord("record block extends past end of file", path, pos)
    return data[pos:end], end


def _content_length_of(head: bytes, path: str | Path, offset: int) -> int:
    for line in head.split(_CRLF):
        if line.lower().startswith(b"content-length:"):
            try:
                return int(line.split(b":", 1)[1].strip())
            except ValueError as exc:
                raise MalformedRecord("bad Content-Length", path, offset) from exc
    raise MalformedRecord("missing Content-Length", path, offset)


def _parse_record_bytes(
    raw: bytes, offset: int, length: int, path: str | Path
) -> RawRecord:
    head_end = raw.find(_HEADER_END)
    if head_end < 0:
        raise MalformedRecord("record header never terminates", path, offset)
    lines = raw[:head_end].split(_CRLF)
    version = lines[0].decode("ascii", "replace").strip()
    if not version.startswith("WARC/"):
        raise MalformedRecord(f"not a WARC record: {version!r}", path, offset)
    headers: list[tuple[str, str]] = []
    for line in lines[1:]:
        name, sep, value = line.partition(b":")
        if not sep:
            raise MalformedRecord("malformed header line", path, offset)
        headers.append(
            (name.decode("ascii", "replace").strip(), value.decode("utf-8", "replace").strip())
        )
    content_length = _content_length_of(raw[:head_end], path, offset)
    body_start = head_end + len(_HEADER_END)
    block = raw[body_start : body_start + content_length]
    if len(block) != content_length:
        raise MalformedRecord("record block truncated", path, offset)
    return RawRecord(offset, length, version, tuple(headers), block)


def iter_raw_records(path: str | Path) -> Iterator[RawRecord | MalformedRecord]:
    """Scan a WARC file, yielding records or the errors of unreadable ones.

    Yielding errors (rather than raising) lets callers skip and tally
    corrupt records; the scan resynchronizes at the next record start.
    """
    data = Path(path).read_bytes()
    pos = 0
    while pos < len(data):
        # Skip stray CRLF padding between records.
        while data[pos : pos + 2] == _CRLF:
            pos += 2
        if pos >= len(data):
            return
        try:
            raw, end = _split_record_span(data, pos, path)
            yield _parse_record_bytes(raw, pos, end - pos, path)
            pos = end
        except MalformedRecord as err:
            yield err
            next_pos = _resync(data, pos)
            if next_pos <= pos:
                return
            pos = next_pos


def _resync(data: bytes, pos: int) -> int:
    candidates = [
        idx
        for idx in (data.find(_GZIP_MAGIC, pos + 1), data.find(b"WARC/", pos + 1))
        if idx >= 0
    ]
    return min(candidates) if candidates else len(data)


def read_record_span(path: str | Path, offset: int, length: int) -> RawRecord:
    """Random-access read of the record stored at (offset, length)."""
    with open(path, "rb") as handle:
        handle.seek(offset)
        data = handle.read(length)
    if len(data) != length:
        raise MalformedRecord("record span extends past end of file", path, offset)
    if data[:2] == _GZIP_MAGIC:
        decomp = zlib.decompressobj(wbits=16 + zlib.MAX_WBITS)
        try:
            raw = decomp.decompress(data)
        except zlib.error as exc:
            raise MalformedRecord(f"bad gzip member: {exc}", path, offset) from exc
        if not decomp.eof:
            raise MalformedRecord("truncated gzip member", path, offset)
    else:
        raw = data
    return _parse_record_bytes(raw, offset, length, path)


def read_raw_span(path: str | Path, offset: int, length: int) -> bytes:
    """The verbatim on-disk bytes of a record span."""
    with open(path, "rb") as handle:
        handle.seek(offset)
        data = handle.read(length)
    if len(data) != length:
        raise MalformedRecord("record span extends past end of file", path, offset)
    return data


def parse_http_response(block: bytes) -> tuple[int, list[tuple[str, str]], bytes]:
    """Split an HTTP response block into (status, headers, payload)."""
    head_end = block.find(_HEADER_END)
    sep_len = len(_HEADER_END)
    if head_end < 0:
        head_end = block.find(b"\n\n")
        sep_len = 2
    if head_end < 0:
        raise MalformedRecord("HTTP response head never terminates")
    head = block[:head_end].decode("iso-8859-1")
    lines = head.splitlines()
    if not lines or not lines[0].startswith("HTTP/"):
        raise MalformedRecord(f"not an HTTP response: {lines[0][:40]!r}" if lines else "empty block")
    parts = lines[0].split(None, 2)
    try:
        status = int(parts[1])
    except (IndexError, ValueError) as exc:
        raise MalformedRecord(f"bad HTTP status line: {lines[0]!r}") from exc
    headers = []
    for line in lines[1:]:
        name, sep, value = line.partition(":")
        if sep:
            headers.append((name.strip(), value.strip()))
    return status, headers, block[head_end + sep_len :]


def build_response_record(
    url: str,
    date_iso: str,
    payload: bytes,
    *,
    record_id: str,
    http_status: int = 200,
    media_type: str = "text/html",
    charset: str | None = "utf-8",
    warc_version: str = "WARC/1.0",
) -> bytes:
    """Serialize one uncompressed response record, trailing CRLFs included."""
    content_type = media_type if charset is None else f"{media_type}; charset={charset}"
    reason = {200: "OK", 301: "Moved Permanently", 302: "Found", 404: "Not Found"}.get(
        http_status, "Unknown"
    )
    http_head = (
        f"HTTP/1.1 {http_status} {reason}\r\n"
        f"Content-Type: {content_type}\r\n"
        f"Content-Length: {len(payload)}\r\n\r\n"
    ).encode("ascii")
    block = http_head + payload
    warc_head = (
        f"{warc_version}\r\n"
        f"WARC-Type: response\r\n"
        f"WARC-Record-ID: <{record_id}>\r\n"
        f"WARC-Date: {date_iso}\r\n"
        f"WARC-Target-URI: {url}\r\n"
        f"Content-Type: application/http; msgtype=response\r\n"
        f"Content-Length: {len(block)}\r\n\r\n"
    ).encode("ascii")
    return warc_head + block + _HEADER_END


def gzip_member(raw: bytes, level: int = 6) -> bytes:
    """Compress one record into a standalone gzip member (mtime 0)."""
    comp = zlib.compressobj(level, zlib.DEFLATED, 16 + zlib.MAX_WBITS)
    return comp.compress(raw) + comp.flush()


class WarcWriter:
    """Appends records to one WARC file, tracking each record's span."""

    def __init__(self, path: str | Path, *, compress: bool = True):
        self.path = Path(path)
        self.compress = compress
        self._handle = open(self.path, "wb")
        self._offset = 0

    def write_record_bytes(self, raw: bytes, *, precompressed: bool = False) -> tuple[int, int]:
        """Write one record; returns its (offset, length) span."""
        if precompressed or not self.compress:
            data = raw
        else:
            data = gzip_member(raw)
        offset = self._offset
        self._handle.write(data)
        self._offset += len(data)
        return offset, len(data)

    def write_response(
        self,
        url: str,
        date_iso: str,
        payload: bytes,
        *,
        record_id: str,
        http_status: int = 200,
        media_type: str = "text/html",
    ) -> tuple[int, int]:
        raw = build_response_record(
            url,
            date_iso,
            payload,
            record_id=record_id,
            http_status=http_status,
            media_type=media_type,
        )
        return self.write_record_bytes(raw)

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> "WarcWriter":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
