# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree construction and mining kernels.

Mirrors the pure Python path in spatial_tree/spatial_mining but stores
the tree in flat arrays and C++ maps, and speaks dense word ranks
(positions in the global order) instead of raw word ids. Per-node cell
counts are logged as (node, cell) events during insertion and compacted
into a sorted CSR layout once, which keeps per-level aggregation a
linear scan with no hashing on the hot path.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libc.stdint cimport int32_t, int64_t
from libcpp.algorithm cimport sort
from libcpp.pair cimport pair
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

from .errors import OrderViolation

ctypedef pair[int64_t, int64_t] I64Pair
ctypedef pair[int64_t, I64Pair] AncNodeWeight


cdef void _reverse(vector[int32_t]& v):
    cdef size_t i = 0
    cdef size_t j = v.size()
    cdef int32_t t
    while j > i + 1:
        j -= 1
        t = v[i]
        v[i] = v[j]
        v[j] = t
        i += 1


cdef class FastMiner:
    """Array-backed spatial prefix tree plus the multi-level miner.

    insert() takes each record's retained words as ascending rank lists
    with the record's leaf cell code; mine() returns raw tuples of
    (ranks, level, cell code, count) for the wrapper to translate.
    """

    cdef int32_t n_ranks
    cdef int height
    cdef int64_t stride
    cdef bint finalized
    cdef vector[int32_t] rank_of
    cdef vector[int32_t] parent_of
    cdef unordered_map[int64_t, int32_t] child
    cdef vector[I64Pair] events
    cdef vector[int64_t] cellvals
    cdef vector[int64_t] cellcounts
    cdef vector[int64_t] start
    cdef vector[vector[int32_t]] by_rank

    def __cinit__(self, int n_ranks, int height):
        if n_ranks < 0 or n_ranks >= 2**31:
            raise ValueError(f"n_ranks out of range: {n_ranks}")
        if height < 0 or height > 31:
            raise ValueError(f"height out of range: {height}")
        self.n_ranks = n_ranks
        self.height = height
        self.stride = n_ranks if n_ranks > 0 else 1
        self.finalized = False
        self.rank_of.push_back(-1)
        self.parent_of.push_back(0)

    @property
    def node_count(self):
        return self.rank_of.size() - 1

    def insert(self, ranks, long long cell):
        """Insert one record: strictly ascending ranks, leaf cell code."""
        if self.finalized:
            raise RuntimeError("cannot insert after finalize")
        cdef int32_t cur = 0
        cdef int32_t prev = -1
        cdef int32_t r, nxt
        cdef int64_t key
        cdef Py_ssize_t i, n = len(ranks)
        cdef unordered_map[int64_t, int32_t].iterator it
        for i in range(n):
            r = ranks[i]
            if r <= prev or r >= self.n_ranks:
                raise OrderViolation(f"rank {r} out of order or range")
            prev = r
            key = <int64_t>cur * self.stride + r
            it = self.child.find(key)
            if it == self.child.end():
                nxt = <int32_t>self.rank_of.size()
                self.rank_of.push_back(r)
                self.parent_of.push_back(cur)
                self.child[key] = nxt
                cur = nxt
            else:
                cur = deref(it).second
            self.events.push_back(I64Pair(cur, cell))

    def finalize(self):
        """Compact the event log into per-node sorted cell counts."""
        if self.finalized:
            return
        sort(self.events.begin(), self.events.end())
        cdef int64_t n_nodes = <int64_t>self.rank_of.size()
        self.start.resize(n_nodes + 1)
        cdef int64_t i = 0
        cdef int64_t m = <int64_t>self.events.size()
        cdef int64_t node, cell, run
        cdef int64_t next_fill = 0
        while i < m:
            node = self.events[i].first
            while next_fill <= node:
                self.start[next_fill] = <int64_t>self.cellvals.size()
                next_fill += 1
            cell = self.events[i].second
            run = 0
            while i < m and self.events[i].first == node and self.events[i].second == cell:
                run += 1
                i += 1
            self.cellvals.push_back(cell)
            self.cellcounts.push_back(run)
        while next_fill <= n_nodes:
            self.start[next_fill] = <int64_t>self.cellvals.size()
            next_fill += 1
        self.events.clear()
        self.events.shrink_to_fit()
        self.by_rank.resize(self.n_ranks)
        cdef int32_t nd
        for nd in range(1, <int32_t>n_nodes):
            self.by_rank[self.rank_of[nd]].push_back(nd)
        self.finalized = True

    def mine(self, sigmas):
        """All spatially frequent rank sets per level; see class docstring."""
        self.finalize()
        cdef vector[int64_t] sv
        for s in sigmas:
            if s < 1:
                raise ValueError("every sigma must be >= 1")
            sv.push_back(s)
        if <int>sv.size() != self.height + 1:
            raise ValueError(f"need {self.height + 1} per-level sigmas, got {sv.size()}")
        cdef list out = []
        cdef int level, shift
        for level in range(self.height, -1, -1):
            shift = 2 * (self.height - level)
            self._mine_level(level, shift, sv[level], out)
        return out

    cdef void _mine_level(self, int level, int shift, int64_t sigma, list out):
        cdef vector[AncNodeWeight] triples
        cdef vector[vector[int32_t]] paths
        cdef vector[int64_t] weights
        cdef vector[int32_t] path
        cdef int32_t r, node, p
        cdef size_t bi, k, kk, n, g0
        cdef int64_t j, end, anc, w, total
        for r in range(self.n_ranks - 1, -1, -1):
            triples.clear()
            for bi in range(self.by_rank[r].size()):
                node = self.by_rank[r][bi]
                j = self.start[node]
                end = self.start[node + 1]
                while j < end:
                    anc = self.cellvals[j] >> shift
                    w = self.cellcounts[j]
                    j += 1
                    while j < end and (self.cellvals[j] >> shift) == anc:
                        w += self.cellcounts[j]
                        j += 1
                    triples.push_back(AncNodeWeight(anc, I64Pair(node, w)))
            if triples.size() == 0:
                continue
            sort(triples.begin(), triples.end())
            k = 0
            n = triples.size()
            while k < n:
                anc = triples[k].first
                total = 0
                g0 = k
                while k < n and triples[k].first == anc:
                    total += triples[k].second.second
                    k += 1
                if total < sigma:
                    continue
                out.append(((r,), level, anc, total))
                paths.clear()
                weights.clear()
                for kk in range(g0, k):
                    node = <int32_t>triples[kk].second.first
                    path.clear()
                    p = self.parent_of[node]
                    while p != 0:
                        path.push_back(self.rank_of[p])
                        p = self.parent_of[p]
                    if path.size() > 0:
                        _reverse(path)
                        paths.push_back(path)
                        weights.push_back(triples[kk].second.second)
                if paths.size() > 0:
                    self._cond_mine(paths, weights, sigma, (r,), level, anc, out)

    cdef void _cond_mine(self, vector[vector[int32_t]]& paths,
                         vector[int64_t]& weights, int64_t sigma,
                         tuple suffix, int level, int64_t anc, list out):
        # Weighted FP-growth over prefix paths already in ascending rank order.
        cdef unordered_map[int32_t, int64_t] totals
        cdef size_t i, j
        cdef int32_t rr
        for i in range(paths.size()):
            for j in range(paths[i].size()):
                rr = paths[i][j]
                totals[rr] = totals[rr] + weights[i]
        cdef vector[int32_t] freq
        cdef unordered_map[int32_t, int64_t].iterator it = totals.begin()
        while it != totals.end():
            if deref(it).second >= sigma:
                freq.push_back(deref(it).first)
            inc(it)
        if freq.size() == 0:
            return
        sort(freq.begin(), freq.end())

        cdef vector[int32_t] lrank
        cdef vector[int32_t] lparent
        cdef vector[int64_t] lcount
        cdef unordered_map[int64_t, int32_t] lchild
        cdef unordered_map[int32_t, vector[int32_t]] lnodes
        lrank.push_back(-1)
        lparent.push_back(0)
        lcount.push_back(0)
        cdef int32_t cur, nxt
        cdef int64_t key
        cdef unordered_map[int64_t, int32_t].iterator cit
        for i in range(paths.size()):
            cur = 0
            for j in range(paths[i].size()):
                rr = paths[i][j]
                if totals[rr] < sigma:
                    continue
                key = <int64_t>cur * self.stride + rr
                cit = lchild.find(key)
                if cit == lchild.end():
                    nxt = <int32_t>lrank.size()
                    lrank.push_back(rr)
                    lparent.push_back(cur)
                    lcount.push_back(0)
                    lchild[key] = nxt
                    lnodes[rr].push_back(nxt)
                    cur = nxt
                else:
                    cur = deref(cit).second
                lcount[cur] = lcount[cur] + weights[i]

        cdef int fi
        cdef int32_t y, nd, p
        cdef vector[vector[int32_t]] sub_paths
        cdef vector[int64_t] sub_weights
        cdef vector[int32_t] spath
        cdef vector[int32_t]* ylist
        cdef tuple new_suffix
        for fi in range(<int>freq.size() - 1, -1, -1):
            y = freq[fi]
            new_suffix = suffix + (y,)
            out.append((new_suffix, level, anc, totals[y]))
            sub_paths.clear()
            sub_weights.clear()
            ylist = &lnodes[y]
            for i in range(ylist[0].size()):
                nd = ylist[0][i]
                spath.clear()
                p = lparent[nd]
                while p != 0:
                    spath.push_back(lrank[p])
                    p = lparent[p]
                if spath.size() > 0:
                    _reverse(spath)
                    sub_paths.push_back(spath)
                    sub_weights.push_back(lcount[nd])
            if sub_paths.size() > 0:
                self._cond_mine(sub_paths, sub_weights, sigma, new_suffix,
                                level, anc, out)
