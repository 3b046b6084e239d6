"""Stabilizer distributions phi_alpha sampled through finite-depth traces.

A sample of phi_alpha is ``Stab(x_1, ..., x_K)`` with the coordinates drawn
independently from the ergodic measures listed by alpha.  The subgroup is
never built; a trace keeps each coordinate's depth-m prefix, which decides
membership of every element of level <= m exactly (g fixes x iff g fixes
the level(g) prefix of x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .clopen import ClopenSet
from .diagram import BratteliDiagram, FinitePath, level_offsets, path_label, rank_paths
from .errors import DepthExceeded, InputError
from .group import GroupElement, act_on_path
from .measure import InvariantMeasure, ProductMeasureSpec, sample_path, sample_paths
from .montecarlo import Estimate, frequency_estimate, run_chunks

DEPTH_MARGIN = 4


@dataclass(frozen=True)
class StabilizerTrace:
    diagram: BratteliDiagram
    alpha: ProductMeasureSpec
    coords: tuple[FinitePath, ...]
    depth: int

    def __post_init__(self):
        if len(self.coords) != self.alpha.size:
            raise InputError(f"alpha {self.alpha} needs {self.alpha.size} coordinates, got {len(self.coords)}")
        if self.depth < 1 or any(p.level != self.depth for p in self.coords):
            raise InputError(f"every coordinate must be a depth-{self.depth} path")

    @property
    def labels(self) -> tuple[int, ...]:
        return self.alpha.coordinate_labels()

    def prefix(self, j: int, n: int) -> tuple[int, int]:
        """(vertex, label) of coordinate j's level-n prefix."""
        p = self.coords[j].prefix(n)
        return p.target, path_label(self.diagram, p)

    def key(self) -> tuple:
        """Coordinates as a multiset per measure label; equal keys mean equal stabilizers."""
        groups: dict[int, list] = {}
        for lab, p in zip(self.labels, self.coords):
            groups.setdefault(lab, []).append(p.key())
        return tuple(sorted((lab, tuple(sorted(ps))) for lab, ps in groups.items()))

    def __eq__(self, other):
        if not isinstance(other, StabilizerTrace):
            return NotImplemented
        return self.alpha == other.alpha and self.depth == other.depth and self.key() == other.key()

    def __hash__(self):
        return hash((self.alpha, self.depth, self.key()))


def sample_stabilizer(
    alpha: ProductMeasureSpec, measures: Sequence[InvariantMeasure], m: int, rng: np.random.Generator, d: BratteliDiagram | None = None
) -> StabilizerTrace:
    alpha.check(measures)
    if d is None:
        if not measures:
            raise InputError("need a diagram or at least one measure")
        d = measures[0].diagram
    coords = tuple(sample_path(measures[i], m, rng) for i in alpha.coordinate_labels())
    return StabilizerTrace(d, alpha, coords, m)


def _check_level(trace: StabilizerTrace, n: int) -> None:
    if n > trace.depth:
        raise DepthExceeded(f"level {n} exceeds trace depth {trace.depth}")


def contains(trace: StabilizerTrace, g: GroupElement) -> bool:
    """Whether g lies in the stabilizer of the trace's coordinates."""
    _check_level(trace, g.level)
    for j in range(len(trace.coords)):
        v, x = trace.prefix(j, g.level)
        if g.perms[v][x] != x:
            return False
    return True


def conjugate(trace: StabilizerTrace, g: GroupElement) -> StabilizerTrace:
    """g Stab(x) g^{-1} = Stab(g x)."""
    _check_level(trace, g.level)
    return StabilizerTrace(trace.diagram, trace.alpha, tuple(act_on_path(g, p) for p in trace.coords), trace.depth)


def f_membership(trace: StabilizerTrace, a: ClopenSet) -> bool:
    """Sufficient test for Stab(x) in F(A): every coordinate lies in A."""
    _check_level(trace, a.level)
    return all(trace.prefix(j, a.level) in a.labels for j in range(len(trace.coords)))


# -- batched estimators ------------------------------------------------------


def _draw(alpha, measures, m, count, rng):
    """Per coordinate, (count, m) vertex and edge arrays."""
    return [sample_paths(measures[i], m, count, rng) for i in alpha.coordinate_labels()]


def _codes(d: BratteliDiagram, coords, n: int) -> np.ndarray:
    """(count, K) global level-n codes of the coordinates' prefixes."""
    offsets = level_offsets(d, n)
    cols = [offsets[v[:, n - 1]] + rank_paths(d, v[:, :n], e[:, :n]).astype(np.int64) for v, e in coords]
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0), dtype=np.int64)


def _prepare(alpha, measures, depth, level):
    alpha.check(measures)
    depth = level if depth is None else depth
    if depth < level:
        raise DepthExceeded(f"depth {depth} is below level {level}")
    return depth


def _pointwise(g: GroupElement, codes: np.ndarray, count: int) -> np.ndarray:
    if codes.size == 0:
        return np.ones(count, dtype=bool)
    return (g.flat()[codes] == codes).all(axis=1)


def estimate_chi(
    alpha: ProductMeasureSpec,
    g: GroupElement,
    measures: Sequence[InvariantMeasure],
    samples: int,
    depth: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> Estimate:
    """Frequency of g in sampled stabilizers; its mean is chi_alpha(g)."""
    depth = _prepare(alpha, measures, depth, g.level)
    d = g.diagram

    def draw(count, rng):
        return _pointwise(g, _codes(d, _draw(alpha, measures, depth, count, rng), g.level), count)

    return frequency_estimate(draw, samples, seed, workers)


@dataclass(frozen=True)
class ChiPrimeEstimate:
    chi_prime: Estimate
    chi: Estimate
    collision_rate: float
    gap_rate: float
    max_sample_gap: int

    @property
    def agrees(self) -> bool:
        """chi' within 3 standard errors plus the collision budget of chi."""
        se = max(self.chi.std_err, self.chi_prime.std_err)
        return abs(self.chi_prime.value - self.chi.value) <= 3 * se + self.collision_rate


def _setwise(alpha, codes, images):
    ok = np.ones(len(codes), dtype=bool)
    for lab in set(alpha.coordinate_labels()):
        cols = [j for j, x in enumerate(alpha.coordinate_labels()) if x == lab]
        ok &= (np.sort(codes[:, cols], axis=1) == np.sort(images[:, cols], axis=1)).all(axis=1)
    return ok


def _collisions(alpha, codes, images):
    labels = alpha.coordinate_labels()
    hit = np.zeros(len(codes), dtype=bool)
    for j in range(len(labels)):
        for k in range(len(labels)):
            if j != k and labels[j] == labels[k]:
                hit |= (codes[:, k] == codes[:, j]) | (codes[:, k] == images[:, j])
    return hit


def estimate_chi_prime(
    alpha: ProductMeasureSpec,
    g: GroupElement,
    measures: Sequence[InvariantMeasure],
    samples: int,
    depth: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> ChiPrimeEstimate:
    """Frequency of g K g^{-1} = K, alongside chi on the same draws.

    Traces are compared as multisets of depth-m prefixes per measure label.
    A collision is a pair of coordinates with the same label whose prefixes
    coincide or are swapped by g; every sample counted by chi' but not by
    chi has one, so the collision rate bounds the gap.
    """
    depth = _prepare(alpha, measures, g.level + DEPTH_MARGIN if depth is None else depth, g.level)
    d = g.diagram
    lifted = g.lift(depth).flat()

    def draw(count, rng):
        coords = _draw(alpha, measures, depth, count, rng)
        point = _pointwise(g, _codes(d, coords, g.level), count)
        if not coords:
            return point, point.copy(), np.zeros(count, dtype=bool)
        codes = _codes(d, coords, depth)
        images = lifted[codes]
        return point, _setwise(alpha, codes, images), _collisions(alpha, codes, images)

    parts = run_chunks(draw, samples, seed, workers)
    point = np.concatenate([p[0] for p in parts])
    setw = np.concatenate([p[1] for p in parts])
    coll = np.concatenate([p[2] for p in parts])
    if np.any(point & ~setw):
        raise ArithmeticError("pointwise-fixed trace not fixed setwise")

    def est(flags):
        p = float(flags.mean())
        return Estimate(p, float(np.sqrt(p * (1 - p) / samples)), samples, seed, workers)

    return ChiPrimeEstimate(est(setw), est(point), float(coll.mean()), float((setw & ~point).mean()), int((setw & ~point & ~coll).sum()))


def empirical_f_measure(
    alpha: ProductMeasureSpec,
    a: ClopenSet,
    measures: Sequence[InvariantMeasure],
    samples: int,
    depth: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> Estimate:
    """Frequency of traces whose coordinates all lie in A; its mean is mu_alpha(A^{|alpha|})."""
    depth = _prepare(alpha, measures, depth, a.level)
    mask = a.mask()

    def draw(count, rng):
        codes = _codes(a.diagram, _draw(alpha, measures, depth, count, rng), a.level)
        if codes.size == 0:
            return np.ones(count, dtype=bool)
        return mask[codes].all(axis=1)

    return frequency_estimate(draw, samples, seed, workers)
