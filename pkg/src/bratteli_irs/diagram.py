"""Bratteli diagrams given by incidence matrices.

Levels are numbered from 1; level 0 is the root.  ``F_n`` (``matrix(n)``) is
the ``|V_{n+1}| x |V_n|`` incidence matrix between levels n and n+1, with the
row index naming the vertex of the higher level.

Edges from ``w`` in ``V_n`` to ``v`` in ``V_{n+1}`` are numbered locally
``0 .. f_{v,w}-1``; root edges into ``v`` in ``V_1`` are numbered
``0 .. root_edges[v]-1``.  A finite path is stored as its list of target
vertices and local edge indices.  Paths ending at the same vertex are ordered
lexicographically on ``((v_1, e_1), ..., (v_n, e_n))`` and the position in
that order is the path's canonical label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceeded, InputError, LevelOutOfRange

TRUNCATED = "truncated"
STATIONARY = "stationary"
POLYNOMIAL = "polynomial-example"
CONTINUATIONS = (TRUNCATED, STATIONARY, POLYNOMIAL)

DEFAULT_ENUMERATION_CAP = 10**6
DEFAULT_SEARCH_SPAN = 25

Matrix = tuple[tuple[int, ...], ...]

_INT64_SAFE = 2**62


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Exact integer matrix product."""
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def identity_matrix(k: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


def polynomial_matrix(n: int) -> Matrix:
    return ((1, 1), (n, 1))


@dataclass(frozen=True)
class BratteliDiagram:
    """Finite prefix of incidence matrices plus a continuation rule."""

    root_edges: tuple[int, ...]
    matrices: tuple[Matrix, ...] = ()
    continuation: str = TRUNCATED
    enumeration_cap: int = field(default=DEFAULT_ENUMERATION_CAP, compare=False)
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        root = tuple(int(x) for x in self.root_edges)
        mats = tuple(tuple(tuple(int(x) for x in row) for row in m) for m in self.matrices)
        object.__setattr__(self, "root_edges", root)
        object.__setattr__(self, "matrices", mats)
        self._validate()

    def _validate(self):
        if self.continuation not in CONTINUATIONS:
            raise InputError(f"unknown continuation {self.continuation!r}; expected one of {CONTINUATIONS}")
        if not self.root_edges:
            raise InputError("root_edges: level 1 needs at least one vertex")
        for v, k in enumerate(self.root_edges):
            if k < 1:
                raise InputError(f"root_edges[{v}] = {k}: every level-1 vertex needs a root edge")
        width = len(self.root_edges)
        for n, m in enumerate(self.matrices, start=1):
            _check_matrix(m, n, width)
            width = len(m)
        if self.continuation == STATIONARY:
            if not self.matrices:
                raise InputError("stationary continuation needs at least one matrix")
            last = self.matrices[-1]
            if len(last) != len(last[0]):
                raise InputError("stationary continuation needs a square last matrix")
        if self.continuation == POLYNOMIAL and width != 2:
            raise InputError("polynomial-example continuation needs 2 vertices at the last stored level")

    @property
    def level_count(self) -> int:
        """Number of explicitly stored levels."""
        return len(self.matrices) + 1

    @property
    def is_infinite(self) -> bool:
        return self.continuation != TRUNCATED

    def check_level(self, n: int) -> None:
        if n < 1:
            raise LevelOutOfRange(f"level {n}: levels start at 1")
        if not self.is_infinite and n > self.level_count:
            raise LevelOutOfRange(f"level {n} beyond the {self.level_count} stored levels of a truncated diagram")

    def matrix(self, n: int) -> Matrix:
        """Incidence matrix F_n between levels n and n+1."""
        self.check_level(n + 1)
        if n <= len(self.matrices):
            return self.matrices[n - 1]
        if self.continuation == STATIONARY:
            return self.matrices[-1]
        return polynomial_matrix(n)

    def num_vertices(self, n: int) -> int:
        self.check_level(n)
        if n == 1:
            return len(self.root_edges)
        return len(self.matrix(n - 1))

    def path_counts(self, n: int) -> tuple[int, ...]:
        """h^{(n)}: number of root paths ending at each vertex of level n."""
        self.check_level(n)
        counts = self._memo.setdefault("h", [self.root_edges])
        while len(counts) < n:
            k = len(counts)
            f = self.matrix(k)
            prev = counts[-1]
            counts.append(tuple(sum(a * b for a, b in zip(row, prev)) for row in f))
        return counts[n - 1]

    def total_paths(self, n: int) -> int:
        return sum(self.path_counts(n))

    def edges_into(self, n: int, v: int, u: int) -> int:
        """Number of edges from u (level n-1, or the root when n == 1) into v at level n."""
        if n == 1:
            return self.root_edges[v]
        return self.matrix(n - 1)[v][u]


def _check_matrix(m: Matrix, n: int, width: int) -> None:
    if not m or not m[0]:
        raise InputError(f"matrix F_{n} is empty")
    for i, row in enumerate(m):
        if len(row) != width:
            raise InputError(f"matrix F_{n} row {i} has {len(row)} entries; level {n} has {width} vertices")
        if any(x < 0 for x in row):
            raise InputError(f"matrix F_{n} row {i} has a negative entry")
        if not any(row):
            raise InputError(f"matrix F_{n} has a zero row {i}: vertex {i} of level {n + 1} has no incoming edge")
    for j in range(width):
        if not any(row[j] for row in m):
            raise InputError(f"matrix F_{n} has a zero column {j}: vertex {j} of level {n} has no outgoing edge")


# -- built-in families -------------------------------------------------------


def odometer(k: int = 2, root: int | None = None) -> BratteliDiagram:
    """One vertex per level, k edges between consecutive levels."""
    return BratteliDiagram((k if root is None else root,), (((k,),),), STATIONARY)


def stationary(matrix: Sequence[Sequence[int]], root_edges: Sequence[int]) -> BratteliDiagram:
    return BratteliDiagram(tuple(root_edges), (tuple(map(tuple, matrix)),), STATIONARY)


def all_ones(k: int = 2) -> BratteliDiagram:
    return stationary([[1] * k for _ in range(k)], [1] * k)


def polynomial_example() -> BratteliDiagram:
    """F_n = [[1, 1], [n, 1]] with one root edge into each level-1 vertex."""
    return BratteliDiagram((1, 1), (), POLYNOMIAL)


# -- paths -------------------------------------------------------------------


@dataclass(frozen=True)
class FinitePath:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) or not self.vertices:
            raise InputError("a path needs one target vertex per edge and at least one edge")

    @property
    def level(self) -> int:
        return len(self.edges)

    @property
    def target(self) -> int:
        return self.vertices[-1]

    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.vertices, self.edges))

    def prefix(self, n: int) -> "FinitePath":
        return FinitePath(self.vertices[:n], self.edges[:n])

    def extend(self, v: int, e: int) -> "FinitePath":
        return FinitePath(self.vertices + (v,), self.edges + (e,))


def check_path(d: BratteliDiagram, p: FinitePath) -> None:
    d.check_level(p.level)
    u = 0
    for i, (v, e) in enumerate(zip(p.vertices, p.edges), start=1):
        if not 0 <= v < d.num_vertices(i):
            raise InputError(f"step {i}: vertex {v} not on level {i}")
        if not 0 <= e < d.edges_into(i, v, u):
            raise InputError(f"step {i}: no edge {e} into vertex {v}")
        u = v


def path_counts(d: BratteliDiagram, n: int) -> tuple[int, ...]:
    return d.path_counts(n)


def telescope(d: BratteliDiagram, n: int, m: int) -> Matrix:
    """F_{m-1} ... F_n: entry (v, w) counts paths from w in V_n to v in V_m."""
    if not 1 <= n < m:
        raise LevelOutOfRange(f"telescope needs 1 <= n < m, got n={n}, m={m}")
    d.check_level(m)
    key = ("tel", n, m)
    if key not in d._memo:
        t = d.matrix(n)
        for k in range(n + 1, m):
            t = matmul(d.matrix(k), t)
        d._memo[key] = t
    return d._memo[key]


def _iter_paths(d: BratteliDiagram, n: int, v: int) -> Iterator[FinitePath]:
    # depth-first in lexicographic order, pruning branches that cannot reach v
    reach = {i: telescope(d, i, n)[v] for i in range(1, n)}
    verts: list[int] = []
    edges: list[int] = []

    def walk(i: int, u: int):
        if i > n:
            yield FinitePath(tuple(verts), tuple(edges))
            return
        candidates = [v] if i == n else [w for w in range(d.num_vertices(i)) if reach[i][w]]
        for w in candidates:
            for e in range(d.edges_into(i, w, u)):
                verts.append(w)
                edges.append(e)
                yield from walk(i + 1, w)
                verts.pop()
                edges.pop()

    yield from walk(1, 0)


def enumerate_paths(d: BratteliDiagram, n: int, v: int, cap: int | None = None) -> list[FinitePath]:
    """All paths from the root to v in V_n, in canonical order."""
    cap = d.enumeration_cap if cap is None else cap
    h = d.path_counts(n)[v]
    if h > cap:
        raise CapExceeded(f"{h} paths end at vertex {v} of level {n}; cap is {cap}")
    return list(_iter_paths(d, n, v))


# -- vectorized ranking ------------------------------------------------------


def _dtype(d: BratteliDiagram, n: int):
    return np.int64 if max(d.path_counts(n)) < _INT64_SAFE else object


def _rank_tables(d: BratteliDiagram, n: int):
    """Per step i: (C_i[t, u, v], W_i[t, v]) with W_i = telescope(i, n)."""
    key = ("rank", n)
    if key in d._memo:
        return d._memo[key]
    dtype = _dtype(d, n)
    tables = []
    for i in range(1, n + 1):
        w = identity_matrix(d.num_vertices(n)) if i == n else telescope(d, i, n)
        wa = np.array(w, dtype=dtype).reshape(d.num_vertices(n), d.num_vertices(i))
        if i == 1:
            f = np.array(d.root_edges, dtype=dtype).reshape(-1, 1)
        else:
            f = np.array(d.matrix(i - 1), dtype=dtype)
        # contributions of each (v', u): paths through an earlier step choice v' from source u
        contrib = wa[:, :, None] * f[None, :, :]  # [t, v', u]
        c = np.zeros_like(contrib)
        c[:, 1:, :] = np.cumsum(contrib, axis=1)[:, :-1, :]
        tables.append((np.ascontiguousarray(c.transpose(0, 2, 1)), wa))  # C[t, u, v]
    d._memo[key] = tables
    return tables


def rank_paths(d: BratteliDiagram, verts: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Canonical labels of a batch of paths given as (N, n) vertex/edge arrays."""
    n = verts.shape[1]
    tables = _rank_tables(d, n)
    t = verts[:, n - 1]
    u = np.zeros_like(t)
    out = np.zeros(len(t), dtype=_dtype(d, n))
    for i, (c, w) in enumerate(tables):
        v = verts[:, i]
        out = out + c[t, u, v] + edges[:, i].astype(out.dtype) * w[t, v]
        u = v
    return out


def unrank_paths(d: BratteliDiagram, n: int, v: int, labels) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of rank_paths for paths ending at v in V_n."""
    tables = _rank_tables(d, n)
    dtype = _dtype(d, n)
    rest = np.array(labels, dtype=dtype).reshape(-1)
    size = len(rest)
    verts = np.zeros((size, n), dtype=np.int64)
    edges = np.zeros((size, n), dtype=np.int64)
    u = np.zeros(size, dtype=np.int64)
    for i, (c, w) in enumerate(tables):
        f = np.array(d.root_edges, dtype=dtype).reshape(-1, 1) if i == 0 else np.array(d.matrix(i), dtype=dtype)
        for cand in range(c.shape[2]):
            base = c[v, u, cand]
            count = f[cand, u] * w[v, cand]
            hit = (rest >= base) & (rest < base + count)
            verts[hit, i] = cand
            if w[v, cand]:
                edges[hit, i] = ((rest[hit] - base[hit]) // w[v, cand]).astype(np.int64)
        rest = rest - c[v, u, verts[:, i]] - edges[:, i].astype(dtype) * w[v, verts[:, i]]
        u = verts[:, i]
    return verts, edges


def path_arrays(d: BratteliDiagram, n: int, v: int) -> tuple[np.ndarray, np.ndarray]:
    """All paths into v in V_n as (h, n) vertex and edge arrays, row = label."""
    key = ("arrays", n, v)
    if key not in d._memo:
        h = d.path_counts(n)[v]
        if h > d.enumeration_cap:
            raise CapExceeded(f"{h} paths end at vertex {v} of level {n}; cap is {d.enumeration_cap}")
        verts, edges = unrank_paths(d, n, v, np.arange(h))
        verts.setflags(write=False)
        edges.setflags(write=False)
        d._memo[key] = (verts, edges)
    return d._memo[key]


def path_label(d: BratteliDiagram, p: FinitePath) -> int:
    check_path(d, p)
    verts = np.array([p.vertices], dtype=np.int64)
    edges = np.array([p.edges], dtype=np.int64)
    return int(rank_paths(d, verts, edges)[0])


def path_from_label(d: BratteliDiagram, n: int, v: int, label: int) -> FinitePath:
    h = d.path_counts(n)[v]
    if not 0 <= label < h:
        raise InputError(f"label {label} out of range for vertex {v} of level {n} ({h} paths)")
    verts, edges = unrank_paths(d, n, v, [label])
    return FinitePath(tuple(int(x) for x in verts[0]), tuple(int(x) for x in edges[0]))


def prefix_labels(d: BratteliDiagram, verts: np.ndarray, edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(vertex, label) of the level-n prefixes of a batch of paths."""
    return verts[:, n - 1], rank_paths(d, verts[:, :n], edges[:, :n])


# -- simplicity and evenness -------------------------------------------------


def is_simple_window(d: BratteliDiagram, n: int, m: int) -> bool:
    return all(x >= 1 for row in telescope(d, n, m) for x in row)


def is_even_window(d: BratteliDiagram, n: int, m: int) -> bool:
    return all(x >= 1 and x % 2 == 0 for row in telescope(d, n, m) for x in row)


def _search(pred, d, n, m_max):
    if m_max is None:
        m_max = n + DEFAULT_SEARCH_SPAN
    if not d.is_infinite:
        m_max = min(m_max, d.level_count)
    for m in range(n + 1, m_max + 1):
        if pred(d, n, m):
            return m
    return None


def is_simple_up_to(d: BratteliDiagram, n: int, m_max: int | None = None) -> int | None:
    """First m in (n, m_max] with a simple window, or None for unknown."""
    return _search(is_simple_window, d, n, m_max)


def is_even_up_to(d: BratteliDiagram, n: int, m_max: int | None = None) -> int | None:
    """First m in (n, m_max] with an even window, or None for unknown."""
    return _search(is_even_window, d, n, m_max)


def level_offsets(d: BratteliDiagram, n: int) -> np.ndarray:
    """Start of each vertex's block when level-n paths are numbered globally."""
    h = d.path_counts(n)
    return np.concatenate([[0], np.cumsum(np.array(h, dtype=object))[:-1]]).astype(np.int64)


def level_arrays(d: BratteliDiagram, n: int) -> tuple[np.ndarray, np.ndarray]:
    """All level-n paths, vertex blocks in order; row = offset[v] + label."""
    key = ("level", n)
    if key not in d._memo:
        if d.total_paths(n) > d.enumeration_cap:
            raise CapExceeded(f"{d.total_paths(n)} paths at level {n}; cap is {d.enumeration_cap}")
        parts = [path_arrays(d, n, v) for v in range(d.num_vertices(n))]
        verts = np.concatenate([p[0] for p in parts])
        edges = np.concatenate([p[1] for p in parts])
        verts.setflags(write=False)
        edges.setflags(write=False)
        d._memo[key] = (verts, edges)
    return d._memo[key]


def prefix_codes(d: BratteliDiagram, n: int, m: int) -> np.ndarray:
    """For every level-m path (global numbering), the global code of its level-n prefix."""
    key = ("prefix", n, m)
    if key not in d._memo:
        verts, edges = level_arrays(d, m)
        w, pl = prefix_labels(d, verts, edges, n)
        codes = level_offsets(d, n)[w] + pl.astype(np.int64)
        codes.setflags(write=False)
        d._memo[key] = codes
    return d._memo[key]
