"""Timestamp and duration handling.

All time arithmetic is seconds since epoch, UTC. Archival capture times
use the 14-digit ``YYYYMMDDhhmmss`` form and must round-trip exactly.
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone

__all__ = [
    "format_iso",
    "format_ts14",
    "parse_duration",
    "parse_iso8601",
    "parse_ts14",
    "to_epoch",
]

_TS14_RE = re.compile(r"^\d{14}$")

# Humane duration units; months and years use fixed civil approximations.
_DURATION_UNITS = {
    "s": 1.0,
    "h": 3600.0,
    "d": 86400.0,
    "w": 7 * 86400.0,
    "m": 30 * 86400.0,
    "y": 365 * 86400.0,
}

_DURATION_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([shdwmy])?\s*$", re.IGNORECASE)


def parse_ts14(value: str) -> datetime:
    """Parse a 14-digit archival timestamp into an aware UTC datetime."""
    if not _TS14_RE.match(value):
        raise ValueError(f"not a 14-digit timestamp: {value!r}")
    try:
        naive = datetime.strptime(value, "%Y%m%d%H%M%S")
    except ValueError as exc:
        raise ValueError(f"invalid archival timestamp: {value!r}") from exc
    return naive.replace(tzinfo=timezone.utc)


def format_ts14(when: datetime) -> str:
    return _as_utc(when).strftime("%Y%m%d%H%M%S")


def parse_iso8601(value: str, *, end_of_day: bool = False) -> datetime:
    """Parse an ISO-8601 date or date-time into an aware UTC datetime.

    Date-only values expand to 00:00:00, or 23:59:59 when ``end_of_day``
    is set. Naive date-times are taken as UTC.
    """
    text = value.strip()
    if not text:
        raise ValueError("empty timestamp")
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValueError(f"invalid ISO-8601 timestamp: {value!r}") from exc
    if len(text) == 10 and end_of_day:
        parsed = parsed + timedelta(hours=23, minutes=59, seconds=59)
    return _as_utc(parsed)


def format_iso(when: datetime) -> str:
    return _as_utc(when).strftime("%Y-%m-%dT%H:%M:%SZ")


def to_epoch(when: datetime) -> float:
    return _as_utc(when).timestamp()


def parse_duration(value: str | int | float) -> float:
    """Normalize a duration to seconds.

    Accepts a bare number of seconds or a number with a one-letter unit:
    ``s`` seconds, ``h`` hours, ``d`` days, ``w`` weeks, ``m`` months
    (30 days), ``y`` years (365 days).
    """
    if isinstance(value, (int, float)):
        seconds = float(value)
    else:
        match = _DURATION_RE.match(value)
        if not match:
            raise ValueError(f"invalid duration: {value!r}")
        amount, unit = match.groups()
        seconds = float(amount) * _DURATION_UNITS[(unit or "s").lower()]
    if seconds < 0:
        raise ValueError(f"negative duration: {value!r}")
    return seconds


def _as_utc(when: datetime) -> datetime:
    if when.tzinfo is None:
        return when.replace(tzinfo=timezone.utc)
    return when.astimezone(timezone.utc)
