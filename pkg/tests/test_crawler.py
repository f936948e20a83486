import random
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings, strategies as st

from eventcrawl.archive import ArchiveIndex, ArchivedDocument, SnapshotRecord, build_index
from eventcrawl.crawler import (
    CrawlStrategy,
    Frontier,
    extract_outlinks,
    run_crawl,
    select_snapshot,
)
from eventcrawl.spec import (
    CollectionSpecification,
    ReferenceDocument,
    TemporalScope,
    TopicalScope,
)
from eventcrawl.text import IdfDictionary

from conftest import page_html, write_warc
from oracles import reference_bfs, reference_crawl, select_snapshot_oracle

UTC = timezone.utc
IDF = IdfDictionary({}, corpus_size=1000)


def snapshot_at(ts14: str) -> SnapshotRecord:
    return SnapshotRecord("http://e.de/x", ts14, "none.warc", 0, 1)


class TestSelectSnapshot:
    def test_earliest_within_interval_wins(self, event_scope):
        snaps = [
            snapshot_at("20110215000000"),  # before
            snapshot_at("20110303000000"),  # during (earliest)
            snapshot_at("20110310000000"),  # during
        ]
        assert select_snapshot(snaps, event_scope).capture_time == "20110303000000"

    def test_closest_when_all_outside(self, event_scope):
        snaps = [
            snapshot_at("20110319000000"),  # 5 days after end
            snapshot_at("20110322000000"),  # hmm: farther
        ]
        # distances: 2011-03-19 is 5d after 03-14; 03-22 is 8d after.
        assert select_snapshot(snaps, event_scope).capture_time == "20110319000000"

    def test_single_capture(self, event_scope):
        snaps = [snapshot_at("20150101000000")]
        assert select_snapshot(snaps, event_scope) is snaps[0]

    def test_distance_tie_prefers_earlier(self):
        scope = TemporalScope(
            event_start=datetime(2011, 3, 10, tzinfo=UTC),
            event_end=datetime(2011, 3, 20, tzinfo=UTC),
        )
        snaps = [snapshot_at("20110308000000"), snapshot_at("20110322000000")]
        assert select_snapshot(snaps, scope).capture_time == "20110308000000"

    def test_matches_exhaustive_oracle_randomized(self, event_scope):
        rng = random.Random(1234)
        base = int(event_scope.start_epoch) - 40 * 86400
        for _ in range(500):
            count = rng.randint(1, 8)
            epochs = sorted(rng.randrange(base, base + 100 * 86400) for _ in range(count))
            snaps = [
                snapshot_at(
                    datetime.fromtimestamp(e, tz=UTC).strftime("%Y%m%d%H%M%S")
                )
                for e in epochs
            ]
            assert select_snapshot(snaps, event_scope) == select_snapshot_oracle(
                snaps, event_scope
            )


class TestFrontier:
    def test_pop_order_priority_then_fifo(self):
        frontier = Frontier()
        frontier.push("http://e.de/a", 0.5)
        frontier.push("http://e.de/b", 0.9)
        frontier.push("http://e.de/c", 0.5)
        order = [frontier.pop().url for _ in range(3)]
        assert order == ["http://e.de/b", "http://e.de/a", "http://e.de/c"]

    def test_url_uniqueness_and_priority_upgrade(self):
        frontier = Frontier()
        frontier.push("http://e.de/a", 0.1)
        frontier.push("http://e.de/b", 0.5)
        frontier.push("http://e.de/a", 0.9)  # upgrade, keeps original sequence
        assert len(frontier) == 2
        entry = frontier.pop()
        assert entry.url == "http://e.de/a" and entry.priority == 0.9
        assert entry.sequence == 0

    def test_downgrade_ignored(self):
        frontier = Frontier()
        frontier.push("http://e.de/a", 0.9)
        frontier.push("http://e.de/a", 0.1)
        assert frontier.pop().priority == 0.9
        assert len(frontier) == 0

    def test_pop_empty_raises(self):
        with pytest.raises(IndexError):
            Frontier().pop()

    def test_nan_priority_rejected(self):
        with pytest.raises(ValueError):
            Frontier().push("http://e.de/a", float("nan"))

    @settings(max_examples=200)
    @given(
        st.lists(
            st.tuples(
                st.sampled_from(["u0", "u1", "u2", "u3", "u4", "u5"]),
                st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0, float("inf")]),
            ),
            max_size=30,
        )
    )
    def test_matches_sort_based_oracle(self, operations):
        frontier = Frontier()
        oracle: dict[str, tuple[float, int]] = {}
        sequence = 0
        for url, priority in operations:
            frontier.push(url, priority)
            if url not in oracle:
                oracle[url] = (priority, sequence)
                sequence += 1
            elif priority > oracle[url][0]:
                oracle[url] = (priority, oracle[url][1])
        popped = []
        while len(frontier):
            popped.append(frontier.pop().url)
        expected = [
            url
            for url, _ in sorted(oracle.items(), key=lambda kv: (-kv[1][0], kv[1][1]))
        ]
        assert popped == expected


class TestExtractOutlinks:
    def _doc(self, url: str, body: str) -> ArchivedDocument:
        return ArchivedDocument(
            snapshot=SnapshotRecord(url, "20110305120000", "none.warc", 0, 1),
            headers=[("Content-Type", "text/html")],
            body=body.encode("utf-8"),
        )

    def test_resolution_and_filtering(self):
        body = (
            '<a href="/a">a</a><a href="b.html">b</a>'
            '<a href="#frag">f</a><a href="mailto:x@y">m</a>'
        )
        doc = self._doc("http://e.de/d/", body)
        assert extract_outlinks(doc) == ["http://e.de/a", "http://e.de/d/b.html"]

    def test_duplicates_collapse_to_first(self):
        body = '<a href="/a">1</a><a href="/b">2</a><a href="/a#x">3</a>'
        doc = self._doc("http://e.de/", body)
        assert extract_outlinks(doc) == ["http://e.de/a", "http://e.de/b"]

    def test_no_anchors(self):
        assert extract_outlinks(self._doc("http://e.de/", "<p>plain</p>")) == []

    def test_base_element_honored(self):
        body = '<base href="http://other.de/dir/"><a href="x.html">x</a>'
        assert extract_outlinks(self._doc("http://e.de/", body)) == [
            "http://other.de/dir/x.html"
        ]

    def test_fragment_only_link_dropped(self):
        doc = self._doc("http://e.de/page", '<a href="#top">top</a>')
        assert extract_outlinks(doc) == []


def make_spec(seeds, scope, *, target_size=100, alpha=0.5, keywords=()):
    return CollectionSpecification(
        name="fixture",
        topical=TopicalScope(
            reference_documents=(ReferenceDocument("inline", "alpha beta gamma delta"),),
            keywords=tuple(keywords),
            language="none",
        ),
        temporal=scope,
        seeds=tuple(seeds),
        target_size=target_size,
    )


def star_archive(tmp_path, event_scope):
    pages = [
        {
            "url": "http://e.de/seed",
            "body": page_html("alpha beta", ["/r1", "/r2", "/r3"]),
            "date_iso": "2011-03-05T10:00:00Z",
        },
        {"url": "http://e.de/r1", "body": page_html("alpha"), "date_iso": "2011-03-06T10:00:00Z"},
        {"url": "http://e.de/r2", "body": page_html("beta"), "date_iso": "2011-03-07T10:00:00Z"},
        {"url": "http://e.de/r3", "body": page_html("gamma"), "date_iso": "2011-03-08T10:00:00Z"},
    ]
    write_warc(tmp_path / "star.warc.gz", pages)
    build_index([tmp_path / "star.warc.gz"], tmp_path / "index.cdx")
    return ArchiveIndex.open(tmp_path / "index.cdx")


class TestRunCrawl:
    def test_star_graph_fetches_all(self, tmp_path, event_scope):
        index = star_archive(tmp_path, event_scope)
        spec = make_spec(["http://e.de/seed"], event_scope, target_size=10)
        result = run_crawl(spec, index, CrawlStrategy.COMBINED, idf=IDF)
        assert set(result.fetched_urls) == {
            "http://e.de/seed",
            "http://e.de/r1",
            "http://e.de/r2",
            "http://e.de/r3",
        }
        assert result.missing == set()
        assert len(result.trace) == 4
        assert [t.action for t in result.trace] == ["fetch"] * 4

    def test_absent_outlink_goes_to_missing_once(self, tmp_path, event_scope):
        pages = [
            {
                "url": "http://e.de/seed",
                "body": page_html("alpha", ["/gone", "/r1"]),
            },
            {"url": "http://e.de/r1", "body": page_html("beta", ["/gone"])},
        ]
        write_warc(tmp_path / "a.warc.gz", pages)
        build_index([tmp_path / "a.warc.gz"], tmp_path / "index.cdx")
        index = ArchiveIndex.open(tmp_path / "index.cdx")
        spec = make_spec(["http://e.de/seed"], event_scope)
        result = run_crawl(spec, index, CrawlStrategy.COMBINED, idf=IDF)
        assert result.missing == {"http://e.de/gone"}
        miss_steps = [t for t in result.trace if t.action == "miss"]
        assert len(miss_steps) == 1

    def test_target_size_one_stops_at_seed(self, tmp_path, event_scope):
        index = star_archive(tmp_path, event_scope)
        spec = make_spec(["http://e.de/seed"], event_scope, target_size=1)
        result = run_crawl(spec, index, CrawlStrategy.COMBINED, idf=IDF)
        assert result.fetched_urls == ["http://e.de/seed"]
        assert len(result.collection) == 1

    def test_no_url_fetched_twice(self, tmp_path, event_scope):
        # Cycle: seed <-> r1, plus self-links.
        pages = [
            {"url": "http://e.de/seed", "body": page_html("alpha", ["/r1", "/seed"])},
            {"url": "http://e.de/r1", "body": page_html("beta", ["/seed", "/r1"])},
        ]
        write_warc(tmp_path / "a.warc.gz", pages)
        build_index([tmp_path / "a.warc.gz"], tmp_path / "index.cdx")
        index = ArchiveIndex.open(tmp_path / "index.cdx")
        spec = make_spec(["http://e.de/seed"], event_scope)
        result = run_crawl(spec, index, CrawlStrategy.COMBINED, idf=IDF)
        fetch_urls = [t.url for t in result.trace if t.action == "fetch"]
        assert len(fetch_urls) == len(set(fetch_urls)) == 2

    def test_collection_and_missing_disjoint(self, tmp_path, event_scope):
        pages = [
            {"url": "http://e.de/seed", "body": page_html("alpha", ["/gone", "/r1"])},
            {"url": "http://e.de/r1", "body": page_html("beta")},
        ]
        write_warc(tmp_path / "a.warc.gz", pages)
        build_index([tmp_path / "a.warc.gz"], tmp_path / "index.cdx")
        index = ArchiveIndex.open(tmp_path / "index.cdx")
        result = run_crawl(
            make_spec(["http://e.de/seed"], event_scope), index, idf=IDF
        )
        assert set(result.fetched_urls).isdisjoint(result.missing)

    def test_outlink_priority_equals_parent_score(self, tmp_path, event_scope):
        # Tree: seed -> a -> b; no rediscovery, so the child's pop
        # priority must equal its parent's strategy score exactly.
        pages = [
            {"url": "http://e.de/seed", "body": page_html("alpha beta gamma", ["/a"])},
            {"url": "http://e.de/a", "body": page_html("alpha beta", ["/b"])},
            {"url": "http://e.de/b", "body": page_html("delta")},
        ]
        write_warc(tmp_path / "a.warc.gz", pages)
        build_index([tmp_path / "a.warc.gz"], tmp_path / "index.cdx")
        index = ArchiveIndex.open(tmp_path / "index.cdx")
        spec = make_spec(["http://e.de/seed"], event_scope)
        result = run_crawl(spec, index, CrawlStrategy.CONTENT_FOCUSED, idf=IDF)
        by_url = {t.url: t for t in result.trace}
        assert by_url["http://e.de/a"].priority == by_url["http://e.de/seed"].topical
        assert by_url["http://e.de/b"].priority == by_url["http://e.de/a"].topical

    def test_unfocused_equals_reference_bfs(self, tmp_path, event_scope):
        rng = random.Random(99)
        n = 20
        urls = [f"http://e.de/p{i}" for i in range(n)]
        pages = []
        for i, url in enumerate(urls):
            links = [f"/p{rng.randrange(n)}" for _ in range(3)]
            pages.append(
                {
                    "url": url,
                    "body": page_html(f"alpha w{i}", links + ["/absent0", "/p1"]),
                    "date_iso": "2011-03-05T10:00:00Z",
                }
            )
        write_warc(tmp_path / "g.warc.gz", pages)
        build_index([tmp_path / "g.warc.gz"], tmp_path / "index.cdx")
        index = ArchiveIndex.open(tmp_path / "index.cdx")
        spec = make_spec([urls[0], urls[3]], event_scope, target_size=50)
        result = run_crawl(spec, index, CrawlStrategy.UNFOCUSED, idf=IDF)
        bfs_order, bfs_missing = reference_bfs(spec, index)
        assert result.fetched_urls == bfs_order
        assert result.missing == bfs_missing

    def test_unreadable_snapshot_counts_as_missing_with_skip_trace(
        self, tmp_path, event_scope
    ):
        pages = [
            {"url": "http://e.de/seed", "body": page_html("alpha", ["/r1"])},
            {"url": "http://e.de/r1", "body": page_html("beta " * 100)},
        ]
        warc_path = write_warc(tmp_path / "a.warc.gz", pages)
        build_index([warc_path], tmp_path / "index.cdx")
        index = ArchiveIndex.open(tmp_path / "index.cdx")
        # Corrupt the second record's compressed stream after indexing.
        snapshot = index.resolve_snapshots("http://e.de/r1")[0]
        with open(warc_path, "r+b") as handle:
            handle.seek(snapshot.offset + snapshot.length // 2)
            handle.write(b"\xff" * 16)
        spec = make_spec(["http://e.de/seed"], event_scope)
        result = run_crawl(spec, index, CrawlStrategy.COMBINED, idf=IDF)
        assert result.missing == {"http://e.de/r1"}
        actions = {t.url: t.action for t in result.trace}
        assert actions["http://e.de/r1"] == "skip"

    @pytest.mark.parametrize("strategy", list(CrawlStrategy))
    def test_matches_reference_simulation(self, tmp_path, event_scope, strategy):
        rng = random.Random(hash(strategy.value) & 0xFFFF)
        index, spec = _random_fixture(tmp_path, event_scope, rng, n_urls=30)
        result = run_crawl(spec, index, strategy, idf=IDF)
        expected_order, expected_missing = reference_crawl(
            spec, index, strategy.value, IDF
        )
        assert result.fetched_urls == expected_order
        assert result.missing == expected_missing


def _random_fixture(tmp_path, event_scope, rng, n_urls=30, name="rand"):
    vocab = ["alpha", "beta", "gamma", "delta", "epsi", "zeta", "eta", "theta"]
    urls = [f"http://e.de/{name}{i}" for i in range(n_urls)]
    base_epoch = int(event_scope.start_epoch) - 60 * 86400
    pages = []
    for i, url in enumerate(urls):
        words = " ".join(rng.choices(vocab, k=rng.randint(3, 12)))
        links = [f"/{name}{rng.randrange(n_urls)}" for _ in range(rng.randint(0, 4))]
        if rng.random() < 0.3:
            links.append(f"/absent{rng.randrange(5)}")
        when = datetime.fromtimestamp(
            base_epoch + rng.randrange(0, 120 * 86400), tz=UTC
        )
        pages.append(
            {
                "url": url,
                "body": page_html(words, links),
                "date_iso": when.strftime("%Y-%m-%dT%H:%M:%SZ"),
            }
        )
    write_warc(tmp_path / f"{name}.warc.gz", pages)
    build_index([tmp_path / f"{name}.warc.gz"], tmp_path / f"{name}.cdx")
    index = ArchiveIndex.open(tmp_path / f"{name}.cdx")
    seeds = rng.sample(urls, k=min(2, n_urls))
    spec = make_spec(seeds, event_scope, target_size=n_urls * 2)
    return index, spec
