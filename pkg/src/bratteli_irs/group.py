"""Elements of the AF full group as families of permutations of finite paths.

An element of ``G_n`` is one permutation of the canonical labels
``0 .. h_v^{(n)}-1`` for each vertex ``v`` of level n.  It acts on an infinite
path by permuting its level-n prefix and keeping the tail, so it embeds in
``G_m`` for every ``m >= n`` (``lift``).  Elements of different levels are
compared and multiplied after lifting to the larger level.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .clopen import ClopenSet
from .diagram import (
    BratteliDiagram,
    FinitePath,
    level_arrays,
    level_offsets,
    path_from_label,
    path_label,
    prefix_codes,
    rank_paths,
)
from .errors import CapExceeded, DepthExceeded, InputError
from .measure import InvariantMeasure, Number, ProductMeasureSpec, clopen_measure

DEFAULT_MAX_ORDER = 10**7


@dataclass(frozen=True, eq=False)
class GroupElement:
    diagram: BratteliDiagram
    level: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        perms = tuple(tuple(int(x) for x in p) for p in self.perms)
        object.__setattr__(self, "perms", perms)
        h = self.diagram.path_counts(self.level)
        if len(perms) != len(h):
            raise InputError(f"level {self.level} has {len(h)} vertices, got {len(perms)} permutations")
        for v, p in enumerate(perms):
            if sorted(p) != list(range(h[v])):
                raise InputError(f"vertex {v}: not a permutation of 0..{h[v] - 1}")

    # constructors

    @classmethod
    def identity(cls, d: BratteliDiagram, n: int = 1) -> "GroupElement":
        return cls(d, n, tuple(tuple(range(h)) for h in d.path_counts(n)))

    @classmethod
    def from_cycles(cls, d: BratteliDiagram, n: int, cycles: Mapping[int, Iterable[Sequence[int]]]) -> "GroupElement":
        """Build from disjoint cycles per vertex; unlisted vertices act trivially."""
        h = d.path_counts(n)
        perms = [list(range(x)) for x in h]
        for v, cyc_list in cycles.items():
            if not 0 <= v < len(h):
                raise InputError(f"vertex {v} is not on level {n}")
            seen: set[int] = set()
            for cyc in cyc_list:
                for x in cyc:
                    if not 0 <= x < h[v]:
                        raise InputError(f"label {x} out of range at vertex {v} (0..{h[v] - 1})")
                    if x in seen:
                        raise InputError(f"label {x} appears twice in the cycles of vertex {v}")
                    seen.add(x)
                for a, b in zip(cyc, list(cyc[1:]) + list(cyc[:1])):
                    perms[v][a] = b
        return cls(d, n, tuple(map(tuple, perms)))

    @classmethod
    def from_flat(cls, d: BratteliDiagram, n: int, flat: Sequence[int]) -> "GroupElement":
        offsets = level_offsets(d, n)
        h = d.path_counts(n)
        return cls(d, n, tuple(tuple(int(flat[o + i]) - int(o) for i in range(hv)) for o, hv in zip(offsets, h)))

    # representations

    def flat(self) -> np.ndarray:
        """Permutation of the global numbering of level-n paths."""
        offsets = level_offsets(self.diagram, self.level)
        return np.concatenate([np.asarray(p, dtype=np.int64) + o for p, o in zip(self.perms, offsets)])

    def cycles(self) -> dict[int, list[tuple[int, ...]]]:
        out = {}
        for v, p in enumerate(self.perms):
            seen, cyc_list = set(), []
            for start in range(len(p)):
                if start in seen or p[start] == start:
                    continue
                cyc, x = [], start
                while x not in seen:
                    seen.add(x)
                    cyc.append(x)
                    x = p[x]
                cyc_list.append(tuple(cyc))
            if cyc_list:
                out[v] = cyc_list
        return out

    def is_identity(self) -> bool:
        return all(p == tuple(range(len(p))) for p in self.perms)

    # lifting and group operations

    def lift(self, m: int) -> "GroupElement":
        n = self.level
        if m < n:
            raise InputError(f"cannot lift a level-{n} element down to level {m}")
        if m == n or self.is_identity():
            return self if m == n else GroupElement.identity(self.diagram, m)
        d = self.diagram
        verts, edges = level_arrays(d, m)
        low_v, low_e = level_arrays(d, n)
        image_prefix = self.flat()[prefix_codes(d, n, m)]
        new_v = np.concatenate([low_v[image_prefix], verts[:, n:]], axis=1)
        new_e = np.concatenate([low_e[image_prefix], edges[:, n:]], axis=1)
        labels = rank_paths(d, new_v, new_e).astype(np.int64)
        return GroupElement.from_flat(d, m, level_offsets(d, m)[new_v[:, -1]] + labels)

    def _pair(self, other: "GroupElement") -> tuple["GroupElement", "GroupElement"]:
        if other.diagram != self.diagram:
            raise InputError("group elements live on different diagrams")
        m = max(self.level, other.level)
        return self.lift(m), other.lift(m)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        """(g * h)(x) = g(h(x))."""
        a, b = self._pair(other)
        return GroupElement(self.diagram, a.level, tuple(tuple(pa[x] for x in pb) for pa, pb in zip(a.perms, b.perms)))

    def inverse(self) -> "GroupElement":
        inv = []
        for p in self.perms:
            q = [0] * len(p)
            for i, x in enumerate(p):
                q[x] = i
            inv.append(tuple(q))
        return GroupElement(self.diagram, self.level, tuple(inv))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        a, b = self._pair(other)
        return a.perms == b.perms

    __hash__ = None

    def __repr__(self):
        return f"GroupElement(level={self.level}, cycles={self.cycles()})"


def lift(g: GroupElement, m: int) -> GroupElement:
    return g.lift(m)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return g * h


def inverse(g: GroupElement) -> GroupElement:
    return g.inverse()


def conjugate_element(h: GroupElement, g: GroupElement) -> GroupElement:
    """h g h^{-1}."""
    return h * g * h.inverse()


# -- fixed points and the action -------------------------------------------


def fixed_set(g: GroupElement) -> ClopenSet:
    return ClopenSet(g.diagram, g.level, frozenset((v, x) for v, p in enumerate(g.perms) for x in range(len(p)) if p[x] == x))


def support(g: GroupElement) -> ClopenSet:
    return fixed_set(g).complement()


def fixed_counts(g: GroupElement) -> tuple[int, ...]:
    return tuple(sum(1 for i, x in enumerate(p) if i == x) for p in g.perms)


def fix_measure(g: GroupElement, mu: InvariantMeasure) -> Number:
    if mu.depth < g.level:
        raise DepthExceeded(f"measure depth {mu.depth} below element level {g.level}")
    return clopen_measure(mu, fixed_set(g))


def fix_measure_product(g: GroupElement, alpha: ProductMeasureSpec, measures: Sequence[InvariantMeasure]) -> Number:
    """mu_alpha(Fix_{X^{|alpha|}}(g)) = prod_i mu_i(Fix g)^{alpha_i}."""
    alpha.check(measures)
    out: Number = Fraction(1)
    for i, k in enumerate(alpha.exponents):
        if k:
            out = out * fix_measure(g, measures[i]) ** k
    return out


def act_on_clopen(g: GroupElement, a: ClopenSet) -> ClopenSet:
    m = max(g.level, a.level)
    gl, al = g.lift(m), a.lift(m)
    return ClopenSet(g.diagram, m, frozenset((v, gl.perms[v][x]) for v, x in al.labels))


def act_on_path(g: GroupElement, p: FinitePath) -> FinitePath:
    """Image of a path of depth >= level(g): the level-n prefix is permuted, the tail kept."""
    n = g.level
    if p.level < n:
        raise DepthExceeded(f"path of depth {p.level} is shorter than the element level {n}")
    head = p.prefix(n)
    image = path_from_label(g.diagram, n, head.target, g.perms[head.target][path_label(g.diagram, head)])
    return FinitePath(image.vertices + p.vertices[n:], image.edges + p.edges[n:])


# -- Young subgroups ---------------------------------------------------------


@dataclass(frozen=True)
class YoungSubgroupDescriptor:
    """Subgroup of G_n permuting only the ``free`` labels at each vertex."""

    diagram: BratteliDiagram
    level: int
    free: tuple[frozenset[int], ...]

    @property
    def order(self) -> int:
        return math.prod(math.factorial(len(f)) for f in self.free)

    def free_set(self) -> ClopenSet:
        return ClopenSet(self.diagram, self.level, frozenset((v, x) for v, f in enumerate(self.free) for x in f))

    def contains(self, g: GroupElement) -> bool:
        if g.level > self.level:
            raise DepthExceeded(f"element level {g.level} above descriptor level {self.level}")
        g = g.lift(self.level)
        return all(p[x] == x for v, p in enumerate(g.perms) for x in range(len(p)) if x not in self.free[v])

    def generators(self) -> list[GroupElement]:
        """Adjacent transpositions of the sorted free labels at each vertex."""
        gens = []
        for v, f in enumerate(self.free):
            f = sorted(f)
            for a, b in zip(f, f[1:]):
                gens.append(GroupElement.from_cycles(self.diagram, self.level, {v: [(a, b)]}))
        return gens


def _descriptor(c: ClopenSet, n: int) -> YoungSubgroupDescriptor:
    c = c.lift(n)
    free = [set() for _ in range(c.diagram.num_vertices(n))]
    for v, x in c.labels:
        free[v].add(x)
    return YoungSubgroupDescriptor(c.diagram, n, tuple(frozenset(f) for f in free))


def local_subgroup(c: ClopenSet, n: int) -> YoungSubgroupDescriptor:
    """L_n(C): elements of G_n supported by C."""
    if n < c.level:
        raise InputError(f"level {n} is below the level {c.level} of the set")
    return _descriptor(c, n)


def pointwise_stabilizer(a: ClopenSet, n: int) -> YoungSubgroupDescriptor:
    """G_n°(A): elements of G_n fixing every point of A."""
    if n < a.level:
        raise InputError(f"level {n} is below the level {a.level} of the set")
    return _descriptor(a.lift(n).complement(), n)


def generated_subgroup_order(
    gens: Sequence[GroupElement], n: int, d: BratteliDiagram | None = None, max_order: int = DEFAULT_MAX_ORDER
) -> int:
    """Order of the subgroup of G_n generated by ``gens``, by breadth-first closure."""
    if not gens:
        return 1
    d = d or gens[0].diagram
    flats = [tuple(int(x) for x in g.lift(n).flat()) for g in gens]
    start = tuple(range(d.total_paths(n)))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for s in flats:
            y = tuple(x[i] for i in s)
            if y not in seen:
                seen.add(y)
                if len(seen) > max_order:
                    raise CapExceeded(f"generated subgroup exceeds {max_order} elements")
                queue.append(y)
    return len(seen)


def random_element(desc: YoungSubgroupDescriptor, rng: np.random.Generator) -> GroupElement:
    """Uniform element of the described subgroup."""
    perms = []
    for v, h in enumerate(desc.diagram.path_counts(desc.level)):
        p = list(range(h))
        free = sorted(desc.free[v])
        for a, b in zip(free, rng.permutation(free)):
            p[a] = int(b)
        perms.append(tuple(p))
    return GroupElement(desc.diagram, desc.level, tuple(perms))


def random_group_element(d: BratteliDiagram, n: int, rng: np.random.Generator) -> GroupElement:
    """Uniform element of G_n."""
    return random_element(pointwise_stabilizer(ClopenSet.empty(d, n), n), rng)
