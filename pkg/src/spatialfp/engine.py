"""End-to-end mining pipeline with selectable backend.

The compiled kernels are used when the extension built and the
SPATIALFP_PURE_PYTHON environment variable is not set; the pure Python
modules are the fallback and the reference. Both produce identical
pattern lists, byte for byte after serialization.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import PointOutOfBounds
from .grid import Gid, Grid, encode
from .spatial_mining import (SpatialPattern, expand_sigmas, mine_tree,
                             sort_patterns)
from .spatial_tree import (ScanStats, SpatialTree, WordTable, filter_sort,
                           insert_record, scan_counts)
from .text import GeoRecord

try:
    from ._speedups import FastMiner
    HAVE_SPEEDUPS = True
except ImportError:
    FastMiner = None
    HAVE_SPEEDUPS = False

PURE_ENV = "SPATIALFP_PURE_PYTHON"


def available_backends() -> tuple[str, ...]:
    return ("pure", "fast") if HAVE_SPEEDUPS else ("pure",)


def default_backend() -> str:
    if HAVE_SPEEDUPS and not os.environ.get(PURE_ENV):
        return "fast"
    return "pure"


def resolve_backend(name: str | None) -> str:
    if name in (None, "auto"):
        return default_backend()
    if name == "pure":
        return "pure"
    if name == "fast":
        if not HAVE_SPEEDUPS:
            raise RuntimeError("compiled backend requested but not built")
        return "fast"
    raise ValueError(f"unknown backend {name!r}")


@dataclass
class MineReport:
    """Everything the pipeline learned besides the patterns themselves."""

    backend: str = "pure"
    records: int = 0
    mined: int = 0
    skipped: int = 0
    distinct_words: int = 0
    retained_words: int = 0
    cell_entries: int = 0
    first_scan_ms: float = 0.0
    tree_build_ms: float = 0.0
    growth_ms: float = 0.0
    patterns_by_level: dict[int, int] = field(default_factory=dict)
    words: "WordTable | None" = None  # retained-word table, for rendering

    @property
    def pattern_count(self) -> int:
        return sum(self.patterns_by_level.values())


def mine(source: Iterable[GeoRecord], sigma: int | Sequence[int], grid: Grid,
         backend: str | None = None,
         after_scan: Callable[[], None] | None = None,
         ) -> tuple[list[SpatialPattern], MineReport]:
    """Mine a replayable record source; returns sorted patterns plus a report.

    ``sigma`` is a single threshold or a per-level list (root first).
    The word-retention pass uses the smallest level threshold, which
    never drops a word that could still qualify at some level.
    ``after_scan`` runs between the passes; raising there aborts the run.
    """
    sigmas = expand_sigmas(sigma, grid.height)
    chosen = resolve_backend(backend)
    report = MineReport(backend=chosen)
    stats = ScanStats()

    t0 = time.perf_counter()
    words, header = scan_counts(source, min(sigmas), grid, stats)
    if after_scan is not None:
        after_scan()
    t1 = time.perf_counter()

    if chosen == "fast":
        miner = FastMiner(len(words), grid.height)
        rank = words.rank
        for rec in source:
            try:
                leaf = encode(rec.point, grid)
            except PointOutOfBounds:
                continue
            ranks = sorted(rank[w] for w in rec.words if w in rank)
            miner.insert(ranks, leaf.code)
        miner.finalize()
        t2 = time.perf_counter()
        raw = miner.mine(sigmas)
        order = words.order
        patterns = [
            SpatialPattern(frozenset(order[r] for r in ranks), Gid(level, code), count)
            for ranks, level, code, count in raw
        ]
        patterns = sort_patterns(patterns, words)
        t3 = time.perf_counter()
    else:
        tree = SpatialTree(words, header, grid.height)
        for rec in source:
            try:
                leaf = encode(rec.point, grid)
            except PointOutOfBounds:
                continue
            wids = filter_sort(rec.words, words)
            if wids:
                insert_record(tree, wids, leaf.code)
        t2 = time.perf_counter()
        patterns = mine_tree(tree, sigmas)
        t3 = time.perf_counter()

    report.records = stats.records
    report.skipped = stats.skipped
    report.mined = stats.records - stats.skipped
    report.distinct_words = stats.distinct_words
    report.retained_words = len(words)
    report.cell_entries = len(header)
    report.first_scan_ms = (t1 - t0) * 1000.0
    report.tree_build_ms = (t2 - t1) * 1000.0
    report.growth_ms = (t3 - t2) * 1000.0
    by_level: dict[int, int] = {}
    for p in patterns:
        by_level[p.gid.level] = by_level.get(p.gid.level, 0) + 1
    report.patterns_by_level = by_level
    report.words = words
    return patterns, report
