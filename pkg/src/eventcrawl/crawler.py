"""Priority-driven focused crawl over the archive's link graph.

Seeds enter the frontier at maximal priority; each fetched document is
scored against the collection specification and its outgoing links are
enqueued at the linking document's strategy-dependent relevance. The
crawl stops when the frontier empties or the document budget is met.
URLs absent from the archive go to the missing set and are never
retried.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from . import warc
from .archive import ArchiveIndex, ArchivedDocument, SnapshotRecord, fetch_document
from .htmlscan import outlinks as _page_outlinks
from .relevance import (
    RelevanceScore,
    extract_document_time,
    temporal_relevance,
    topical_relevance,
)
from .spec import CollectionSpecification, TemporalScope
from .text import (
    IdfDictionary,
    KeywordBoost,
    TermVector,
    build_reference_vector,
    default_idf_dictionary,
    get_analyzer,
    vectorize,
)
from .urlnorm import canonicalize_url

__all__ = [
    "CollectionItem",
    "CrawlResult",
    "CrawlStrategy",
    "Frontier",
    "FrontierEntry",
    "TraceRecord",
    "extract_outlinks",
    "run_crawl",
    "select_snapshot",
]

logger = logging.getLogger(__name__)

SEED_PRIORITY = math.inf

TRACE_HEADER = "step,action,url,priority,snapshot_time,topical,temporal,combined"


class CrawlStrategy(Enum):
    """Frontier prioritization strategies compared in the evaluation."""

    UNFOCUSED = "unfocused"
    CONTENT_FOCUSED = "c-f"
    TIME_FOCUSED = "t-f"
    COMBINED = "ct-f"

    @classmethod
    def from_name(cls, name: str) -> "CrawlStrategy":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown strategy {name!r}; valid: {valid}") from None

    def priority_for(self, score: RelevanceScore) -> float:
        if self is CrawlStrategy.UNFOCUSED:
            return 1.0
        if self is CrawlStrategy.CONTENT_FOCUSED:
            return score.topical
        if self is CrawlStrategy.TIME_FOCUSED:
            return score.temporal
        return score.combined


@dataclass(frozen=True)
class FrontierEntry:
    url: str
    priority: float
    sequence: int


class Frontier:
    """Max-priority queue of URLs with FIFO order among equal priorities.

    Each URL appears at most once. Re-adding a queued URL keeps the
    entry's original insertion sequence and raises its priority if the
    new one is higher; lower or equal rediscoveries are ignored.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, str]] = []
        self._entries: dict[str, FrontierEntry] = {}
        self._sequence = itertools.count()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, url: str) -> bool:
        return url in self._entries

    def push(self, url: str, priority: float) -> None:
        if math.isnan(priority):
            raise ValueError("frontier priority must not be NaN")
        current = self._entries.get(url)
        if current is None:
            entry = FrontierEntry(url, priority, next(self._sequence))
        elif priority > current.priority:
            entry = FrontierEntry(url, priority, current.sequence)
        else:
            return
        self._entries[url] = entry
        heapq.heappush(self._heap, (-entry.priority, entry.sequence, url))

    def pop(self) -> FrontierEntry:
        while self._heap:
            neg_priority, sequence, url = heapq.heappop(self._heap)
            entry = self._entries.get(url)
            if entry is None or entry.priority != -neg_priority or entry.sequence != sequence:
                continue  # superseded by a priority update
            del self._entries[url]
            return entry
        raise IndexError("pop from an empty frontier")


def select_snapshot(
    snapshots: list[SnapshotRecord], scope: TemporalScope
) -> SnapshotRecord:
    """Choose the capture to represent a URL.

    The earliest capture inside the event interval wins; if none falls
    inside, the capture closest to the interval does, earlier captures
    breaking distance ties. ``snapshots`` must be non-empty and sorted
    ascending by capture time.
    """
    start, end = scope.start_epoch, scope.end_epoch
    best = None
    best_key = None
    for snapshot in snapshots:
        t = snapshot.capture_epoch()
        if start <= t <= end:
            return snapshot  # ascending order: first inside is the earliest
        distance = start - t if t < start else t - end
        key = (distance, snapshot.capture_time)
        if best_key is None or key < best_key:
            best, best_key = snapshot, key
    assert best is not None, "select_snapshot requires a non-empty snapshot list"
    return best


def extract_outlinks(document: ArchivedDocument) -> list[str]:
    """Canonical link targets of a document, first-occurrence order."""
    return _page_outlinks(document.scanned(), document.snapshot.canonical_url)


@dataclass(frozen=True)
class CollectionItem:
    snapshot: SnapshotRecord
    score: RelevanceScore
    outlinks: tuple[str, ...]


@dataclass(frozen=True)
class TraceRecord:
    step: int
    action: str  # fetch | miss | skip
    url: str
    priority: float
    snapshot_time: str = ""
    topical: float | None = None
    temporal: float | None = None
    combined: float | None = None

    def to_csv_row(self) -> str:
        def num(value: float | None) -> str:
            return "" if value is None else repr(value)

        return (
            f"{self.step},{self.action},{self.url},{repr(self.priority)},"
            f"{self.snapshot_time},{num(self.topical)},{num(self.temporal)},"
            f"{num(self.combined)}"
        )


@dataclass
class CrawlResult:
    collection: list[CollectionItem]
    missing: set[str]
    trace: list[TraceRecord]
    queued_at_end: int
    strategy: CrawlStrategy

    @property
    def fetched_urls(self) -> list[str]:
        return [item.snapshot.canonical_url for item in self.collection]

    @property
    def urls_considered(self) -> int:
        return len(self.collection) + len(self.missing) + self.queued_at_end

    def accumulated_topical(self) -> float:
        return sum(item.score.topical for item in self.collection)


def run_crawl(
    spec: CollectionSpecification,
    index: ArchiveIndex,
    strategy: CrawlStrategy = CrawlStrategy.COMBINED,
    *,
    idf: IdfDictionary | None = None,
    boost: KeywordBoost | None = None,
    half_life_gamma: bool = False,
) -> CrawlResult:
    """Run one focused extraction over the archive.

    Reference documents must be resolvable up front (failure aborts the
    crawl); snapshots whose stored bytes are unreadable count as missing
    and appear in the trace as ``skip``.
    """
    idf = idf or default_idf_dictionary()
    reference = build_reference_vector(spec.topical, idf, boost, index=index)
    analyzer = get_analyzer(spec.topical.language)
    scope = spec.temporal
    alpha = spec.alpha

    frontier = Frontier()
    for seed in spec.seeds:
        frontier.push(canonicalize_url(seed), SEED_PRIORITY)

    collection: list[CollectionItem] = []
    fetched: set[str] = set()
    missing: set[str] = set()
    trace: list[TraceRecord] = []
    step = 0

    while len(frontier) and len(collection) < spec.target_size:
        entry = frontier.pop()
        step += 1
        snapshots = index.resolve_snapshots(entry.url)
        if not snapshots:
            missing.add(entry.url)
            trace.append(TraceRecord(step, "miss", entry.url, entry.priority))
            continue

        snapshot = select_snapshot(snapshots, scope)
        try:
            document = fetch_document(index, snapshot)
        except warc.MalformedRecord as exc:
            logger.warning("unreadable snapshot for %s: %s", entry.url, exc)
            missing.add(entry.url)
            trace.append(
                TraceRecord(step, "skip", entry.url, entry.priority, snapshot.capture_time)
            )
            continue

        score = _score_document(
            document, reference, analyzer, scope, alpha, idf, half_life_gamma
        )
        links = tuple(extract_outlinks(document))
        collection.append(CollectionItem(snapshot, score, links))
        fetched.add(entry.url)

        priority = strategy.priority_for(score)
        for target in links:
            if target not in fetched and target not in missing:
                frontier.push(target, priority)

        trace.append(
            TraceRecord(
                step,
                "fetch",
                entry.url,
                entry.priority,
                snapshot.capture_time,
                score.topical,
                score.temporal,
                score.combined,
            )
        )

    return CrawlResult(
        collection=collection,
        missing=missing,
        trace=trace,
        queued_at_end=len(frontier),
        strategy=strategy,
    )


def _score_document(
    document: ArchivedDocument,
    reference: TermVector,
    analyzer,
    scope: TemporalScope,
    alpha: float,
    idf: IdfDictionary,
    half_life_gamma: bool,
) -> RelevanceScore:
    doc_vector = vectorize(analyzer.tokens(document.scanned().text), idf)
    topical = topical_relevance(doc_vector, reference)
    doc_time = extract_document_time(document)
    temporal = temporal_relevance(
        doc_time.epoch(), scope, half_life_gamma=half_life_gamma
    )
    return RelevanceScore.combine(topical, temporal, alpha)


def write_trace(trace: Iterable[TraceRecord], path) -> None:
    """Write the per-fetch trace as line-delimited CSV."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(TRACE_HEADER + "\n")
        for record in trace:
            handle.write(record.to_csv_row() + "\n")
