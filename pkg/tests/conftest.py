"""Shared fixtures: tiny WARC builders and a canned event scope."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import pytest

from eventcrawl.spec import TemporalScope
from eventcrawl.warc import WarcWriter, build_response_record

# One line per acceptance criterion, echoed in the terminal summary so
# the verdicts are visible without -s.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def event_scope() -> TemporalScope:
    return TemporalScope(
        event_start=datetime(2011, 3, 1, tzinfo=timezone.utc),
        event_end=datetime(2011, 3, 14, tzinfo=timezone.utc),
        lead_time=14 * 86400.0,
        cool_down_time=28 * 86400.0,
    )


def write_warc(
    path: Path,
    pages: list[dict],
    *,
    compress: bool = True,
) -> Path:
    """Write a WARC of response records from simple page dicts.

    Each page dict: url, body (str or bytes), and optional date_iso,
    status, media_type.
    """
    with WarcWriter(path, compress=compress) as writer:
        for i, page in enumerate(pages):
            body = page["body"]
            if isinstance(body, str):
                body = body.encode("utf-8")
            record = build_response_record(
                page["url"],
                page.get("date_iso", "2011-03-05T12:00:00Z"),
                body,
                record_id=f"urn:uuid:00000000-0000-0000-0000-{i:012d}",
                http_status=page.get("status", 200),
                media_type=page.get("media_type", "text/html"),
            )
            writer.write_record_bytes(record)
    return path


def page_html(text: str = "", links: list[str] = (), meta: dict | None = None) -> str:
    meta_tags = "".join(
        f'<meta property="{k}" content="{v}">' for k, v in (meta or {}).items()
    )
    anchors = "".join(f'<a href="{href}">go</a> ' for href in links)
    return f"<html><head>{meta_tags}</head><body><p>{text}</p>{anchors}</body></html>"
