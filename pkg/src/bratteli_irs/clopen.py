"""Clopen subsets of the path space, represented as unions of level-n cylinders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .diagram import BratteliDiagram, FinitePath, level_offsets, path_label, prefix_codes
from .errors import InputError


@dataclass(frozen=True, eq=False)
class ClopenSet:
    """Union of the cylinders of the level-``level`` paths listed in ``labels``.

    ``labels`` holds ``(vertex, canonical label)`` pairs.
    """

    diagram: BratteliDiagram
    level: int
    labels: frozenset[tuple[int, int]]

    def __post_init__(self):
        labels = frozenset((int(v), int(x)) for v, x in self.labels)
        object.__setattr__(self, "labels", labels)
        h = self.diagram.path_counts(self.level)
        for v, x in labels:
            if not 0 <= v < len(h) or not 0 <= x < h[v]:
                raise InputError(f"({v}, {x}) is not a level-{self.level} path label")

    # constructors

    @classmethod
    def whole(cls, d: BratteliDiagram, n: int = 1) -> "ClopenSet":
        h = d.path_counts(n)
        return cls(d, n, frozenset((v, x) for v in range(len(h)) for x in range(h[v])))

    @classmethod
    def empty(cls, d: BratteliDiagram, n: int = 1) -> "ClopenSet":
        return cls(d, n, frozenset())

    @classmethod
    def cylinder(cls, d: BratteliDiagram, p: FinitePath) -> "ClopenSet":
        return cls(d, p.level, frozenset({(p.target, path_label(d, p))}))

    @classmethod
    def from_codes(cls, d: BratteliDiagram, n: int, codes: Iterable[int]) -> "ClopenSet":
        offsets = level_offsets(d, n)
        pairs = []
        for c in codes:
            v = int(np.searchsorted(offsets, c, side="right")) - 1
            pairs.append((v, int(c) - int(offsets[v])))
        return cls(d, n, frozenset(pairs))

    # views

    def codes(self) -> np.ndarray:
        offsets = level_offsets(self.diagram, self.level)
        return np.array(sorted(int(offsets[v]) + x for v, x in self.labels), dtype=np.int64)

    def mask(self) -> np.ndarray:
        """Boolean membership over the global numbering of level-``level`` paths."""
        out = np.zeros(self.diagram.total_paths(self.level), dtype=bool)
        out[self.codes()] = True
        return out

    def counts(self) -> tuple[int, ...]:
        """Number of cylinders of the set ending at each vertex."""
        out = [0] * self.diagram.num_vertices(self.level)
        for v, _ in self.labels:
            out[v] += 1
        return tuple(out)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, item):
        return item in self.labels

    # lifting and set algebra

    def lift(self, m: int) -> "ClopenSet":
        if m < self.level:
            raise InputError(f"cannot lift a level-{self.level} set down to level {m}")
        if m == self.level:
            return self
        inside = self.mask()[prefix_codes(self.diagram, self.level, m)]
        return ClopenSet.from_codes(self.diagram, m, np.flatnonzero(inside))

    def _pair(self, other: "ClopenSet") -> tuple["ClopenSet", "ClopenSet"]:
        if other.diagram != self.diagram:
            raise InputError("clopen sets live on different diagrams")
        m = max(self.level, other.level)
        return self.lift(m), other.lift(m)

    def __or__(self, other):
        a, b = self._pair(other)
        return ClopenSet(self.diagram, a.level, a.labels | b.labels)

    def __and__(self, other):
        a, b = self._pair(other)
        return ClopenSet(self.diagram, a.level, a.labels & b.labels)

    def __sub__(self, other):
        a, b = self._pair(other)
        return ClopenSet(self.diagram, a.level, a.labels - b.labels)

    def complement(self) -> "ClopenSet":
        return ClopenSet.whole(self.diagram, self.level) - self

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        a, b = self._pair(other)
        return a.labels == b.labels

    __hash__ = None

    def issubset(self, other: "ClopenSet") -> bool:
        a, b = self._pair(other)
        return a.labels <= b.labels

    def is_empty(self) -> bool:
        return not self.labels

    def is_whole(self) -> bool:
        return len(self.labels) == self.diagram.total_paths(self.level)

    def __repr__(self):
        return f"ClopenSet(level={self.level}, labels={sorted(self.labels)})"
