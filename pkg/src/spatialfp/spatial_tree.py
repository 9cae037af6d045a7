"""Cell-annotated prefix tree built in two streaming passes.

Pass one counts every word globally and per leaf cell; words whose
global count falls below sigma are dropped for good. Pass two re-reads
the same records and inserts each surviving wordset, sorted by global
frequency, into a prefix tree whose nodes carry per-leaf-cell counts.
The per-(word, cell) header keeps the pass-one counts plus links to
every tree node holding that word for that cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InconsistentScan, OrderViolation, PointOutOfBounds
from .grid import Gid, Grid, encode, gid_str
from .text import GeoRecord


@dataclass
class ScanStats:
    """Counters filled while scanning a record source."""

    records: int = 0        # records consumed, in-box or not
    skipped: int = 0        # records outside the bounding box
    distinct_words: int = 0  # words seen before frequency filtering


class WordTable:
    """Retained words with their global counts and the global order.

    Order is descending count, ties ascending word id; ``rank`` maps a
    word id to its position in that order.
    """

    def __init__(self, counts: dict[int, int]):
        self.counts = counts
        self.order: list[int] = sorted(counts, key=lambda w: (-counts[w], w))
        self.rank: dict[int, int] = {w: i for i, w in enumerate(self.order)}

    def __len__(self) -> int:
        return len(self.order)

    def __contains__(self, wid: int) -> bool:
        return wid in self.counts


class CellEntry:
    __slots__ = ("count", "nodes")

    def __init__(self):
        self.count = 0
        self.nodes: list[SpatialNode] = []


class CellTable:
    """Per-(word, leaf cell) counts and node links, indexed by word."""

    def __init__(self):
        self._by_word: dict[int, dict[int, CellEntry]] = {}

    def add_count(self, wid: int, cell: int, k: int = 1) -> None:
        cells = self._by_word.get(wid)
        if cells is None:
            cells = self._by_word[wid] = {}
        entry = cells.get(cell)
        if entry is None:
            entry = cells[cell] = CellEntry()
        entry.count += k

    def prune(self, keep: WordTable) -> None:
        for wid in [w for w in self._by_word if w not in keep]:
            del self._by_word[wid]

    def cells_of(self, wid: int) -> dict[int, CellEntry]:
        return self._by_word.get(wid, {})

    def entry(self, wid: int, cell: int) -> CellEntry | None:
        return self._by_word.get(wid, {}).get(cell)

    def add_link(self, wid: int, cell: int, node: "SpatialNode") -> None:
        entry = self._by_word.get(wid, {}).get(cell)
        if entry is None:
            raise InconsistentScan(
                f"(word {wid}, cell {cell}) was never counted in the first pass")
        entry.nodes.append(node)

    def __len__(self) -> int:
        return sum(len(cells) for cells in self._by_word.values())

    def items(self) -> Iterator[tuple[int, int, CellEntry]]:
        for wid, cells in self._by_word.items():
            for cell, entry in cells.items():
                yield wid, cell, entry


class SpatialNode:
    __slots__ = ("wid", "parent", "children", "cells")

    def __init__(self, wid: int, parent: "SpatialNode | None"):
        self.wid = wid
        self.parent = parent
        self.children: dict[int, SpatialNode] = {}
        self.cells: dict[int, int] = {}  # leaf cell code -> count


class SpatialTree:
    def __init__(self, words: WordTable, header: CellTable, height: int):
        self.words = words
        self.header = header
        self.height = height
        self.root = SpatialNode(-1, None)
        self._nodes_by_word: dict[int, list[SpatialNode]] = {}

    def nodes_of(self, wid: int) -> list[SpatialNode]:
        """Every tree node holding ``wid``, in creation order."""
        return self._nodes_by_word.get(wid, [])


def scan_counts(records: Iterable[GeoRecord], sigma: int, grid: Grid,
                stats: ScanStats | None = None) -> tuple[WordTable, CellTable]:
    """First pass: global word counts and the per-(word, cell) skeleton.

    Returns the retained words (global count >= sigma) and the cell
    table restricted to them, counts filled in and node links empty.
    """
    if sigma < 1:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    counts: dict[int, int] = {}
    header = CellTable()
    for rec in records:
        if stats is not None:
            stats.records += 1
        try:
            leaf = encode(rec.point, grid)
        except PointOutOfBounds:
            if stats is not None:
                stats.skipped += 1
            continue
        for wid in rec.words:
            counts[wid] = counts.get(wid, 0) + 1
            header.add_count(wid, leaf.code)
    if stats is not None:
        stats.distinct_words = len(counts)
    words = WordTable({w: c for w, c in counts.items() if c >= sigma})
    header.prune(words)
    return words, header


def filter_sort(wordset: frozenset[int] | set[int], words: WordTable) -> list[int]:
    """Drop unretained words and sort the rest by the global order."""
    rank = words.rank
    return sorted((w for w in wordset if w in rank), key=rank.__getitem__)


def insert_record(tree: SpatialTree, sorted_wids: list[int], cell: int) -> None:
    """Second-pass insertion of one record's surviving words.

    Walks or extends the prefix path, bumps the touched nodes' counts
    for ``cell``, and links each (word, cell) header entry to a node the
    first time that node sees that cell.
    """
    rank = tree.words.rank
    node = tree.root
    prev_rank = -1
    for wid in sorted_wids:
        r = rank.get(wid)
        if r is None:
            raise OrderViolation(f"word {wid} is not retained in this tree")
        if r <= prev_rank:
            raise OrderViolation("words not sorted by the tree's global order")
        prev_rank = r
        child = node.children.get(wid)
        if child is None:
            child = SpatialNode(wid, node)
            node.children[wid] = child
            tree._nodes_by_word.setdefault(wid, []).append(child)
            child.cells[cell] = 1
            tree.header.add_link(wid, cell, child)
        else:
            seen = child.cells.get(cell)
            if seen is None:
                child.cells[cell] = 1
                tree.header.add_link(wid, cell, child)
            else:
                child.cells[cell] = seen + 1
        node = child


def build_tree(source: Iterable[GeoRecord], sigma: int, grid: Grid,
               stats: ScanStats | None = None) -> SpatialTree:
    """Two passes over a replayable record source; see the module docstring."""
    words, header = scan_counts(source, sigma, grid, stats)
    tree = SpatialTree(words, header, grid.height)
    for rec in source:
        try:
            leaf = encode(rec.point, grid)
        except PointOutOfBounds:
            continue
        wids = filter_sort(rec.words, words)
        if wids:
            insert_record(tree, wids, leaf.code)
    return tree


def dump(tree: SpatialTree, name_of=None) -> str:
    """Indented debug rendering: one node per line, "word [cell:count, ...]"."""
    if name_of is None:
        name_of = str
    lines = ["(root)"]

    def walk(node: SpatialNode, depth: int) -> None:
        rank = tree.words.rank
        for child in sorted(node.children.values(), key=lambda n: rank[n.wid]):
            cells = ", ".join(
                f"{gid_str(Gid(tree.height, code))}:{child.cells[code]}"
                for code in sorted(child.cells))
            lines.append(f"{'  ' * depth}{name_of(child.wid)} [{cells}]")
            walk(child, depth + 1)

    walk(tree.root, 1)
    return "\n".join(lines)


def tree_equal(a: SpatialTree, b: SpatialTree) -> bool:
    """Structural equality: same shape, same per-node cell counts."""

    def node_eq(x: SpatialNode, y: SpatialNode) -> bool:
        if x.wid != y.wid or x.cells != y.cells:
            return False
        if x.children.keys() != y.children.keys():
            return False
        return all(node_eq(x.children[w], y.children[w]) for w in x.children)

    return a.height == b.height and a.words.counts == b.words.counts \
        and node_eq(a.root, b.root)
