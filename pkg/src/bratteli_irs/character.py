"""Characters chi_alpha and chi_reg, character axioms, and fixed-point averages.

``chi_alpha(g) = prod_i mu_i(Fix g)^{alpha_i}``; ``chi_reg`` is the indicator
of the identity.  The averages are

    (1 / |G_n°(A)|) * sum_{g in G_n°(A)} mu_alpha(Fix_{X^{|alpha|}}(g))

over the Young subgroup ``G_n°(A)`` of elements fixing A pointwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clopen import ClopenSet
from .diagram import BratteliDiagram
from .errors import CapExceeded, HypothesisViolation, InputError
from .group import GroupElement, YoungSubgroupDescriptor, fix_measure_product, pointwise_stabilizer
from .measure import RATIONAL, InvariantMeasure, Number, ProductMeasureSpec, product_clopen_measure
from .montecarlo import Estimate, mean_estimate

ALPHA = "alpha"
REGULAR = "regular"
COMBINATION = "combination"

PSD_TOL = 1e-9
FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class CharacterSpec:
    kind: str
    alpha: ProductMeasureSpec | None = None
    parts: tuple[tuple[Number, "CharacterSpec"], ...] = ()

    def __post_init__(self):
        if self.kind == ALPHA and self.alpha is None:
            raise InputError("alpha character needs a multi-index")
        if self.kind == COMBINATION:
            if not self.parts or any(w < 0 for w, _ in self.parts):
                raise InputError("combination weights must be nonnegative and non-empty")
            total = sum(w for w, _ in self.parts)
            if abs(total - 1) > FLOAT_TOL:
                raise InputError(f"combination weights sum to {total}, not 1")
        elif self.kind not in (ALPHA, REGULAR):
            raise InputError(f"unknown character kind {self.kind!r}")

    @classmethod
    def of(cls, alpha: ProductMeasureSpec | Sequence[int] | str) -> "CharacterSpec":
        if isinstance(alpha, str):
            alpha = ProductMeasureSpec.parse(alpha)
        elif not isinstance(alpha, ProductMeasureSpec):
            alpha = ProductMeasureSpec(tuple(alpha))
        return cls(ALPHA, alpha)

    @classmethod
    def regular(cls) -> "CharacterSpec":
        return cls(REGULAR)

    @classmethod
    def combination(cls, parts: Sequence[tuple[Number, "CharacterSpec"]]) -> "CharacterSpec":
        return cls(COMBINATION, parts=tuple(parts))


def evaluate(spec: CharacterSpec, g: GroupElement, measures: Sequence[InvariantMeasure]) -> Number:
    if spec.kind == ALPHA:
        return fix_measure_product(g, spec.alpha, measures)
    if spec.kind == REGULAR:
        return Fraction(int(g.is_identity()))
    return sum(w * evaluate(part, g, measures) for w, part in spec.parts)


@dataclass
class CentralityReport:
    max_diff: float
    diffs: list[Number]
    exact: bool

    @property
    def passed(self) -> bool:
        return self.max_diff == 0 if self.exact else self.max_diff <= FLOAT_TOL


def _is_exact(measures: Sequence[InvariantMeasure]) -> bool:
    return all(m.mode == RATIONAL for m in measures)


def check_central(
    spec: CharacterSpec, pairs: Sequence[tuple[GroupElement, GroupElement]], measures: Sequence[InvariantMeasure]
) -> CentralityReport:
    """|chi(ab) - chi(ba)| over the given pairs."""
    diffs = [abs(evaluate(spec, a * b, measures) - evaluate(spec, b * a, measures)) for a, b in pairs]
    return CentralityReport(float(max(diffs, default=0)), diffs, _is_exact(measures))


def gram_matrix(spec: CharacterSpec, elements: Sequence[GroupElement], measures: Sequence[InvariantMeasure]) -> list[list[Number]]:
    inverses = [g.inverse() for g in elements]
    return [[evaluate(spec, gi * hj, measures) for hj in inverses] for gi in elements]


def check_psd(spec: CharacterSpec, elements: Sequence[GroupElement], measures: Sequence[InvariantMeasure]) -> float:
    """Smallest eigenvalue of the Gram matrix chi(g_i g_j^{-1})."""
    if len(elements) > 50:
        raise CapExceeded("check_psd takes at most 50 elements")
    gram = gram_matrix(spec, elements, measures)
    m = len(gram)
    for i in range(m):
        for j in range(i):
            if abs(gram[i][j] - gram[j][i]) > FLOAT_TOL:
                raise ArithmeticError(f"Gram matrix is not symmetric at ({i}, {j}); evaluate is inconsistent")
    return float(np.linalg.eigvalsh(np.array(gram, dtype=float)).min())


# -- averages over pointwise stabilizers ------------------------------------


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _falling(x: int, k: int) -> int:
    return math.perm(x, k) if k <= x else 0


def _zero(measures):
    return Fraction(0) if _is_exact(measures) else 0.0


def exact_average(
    desc: YoungSubgroupDescriptor,
    alpha: ProductMeasureSpec,
    measures: Sequence[InvariantMeasure],
    max_paths: int = 300,
    max_size: int = 3,
) -> Number:
    """Exact mean of mu_alpha(Fix g) over the uniform element g of the subgroup.

    Expanding the product over the |alpha| coordinates gives a sum over tuples
    of level-n paths of the product of their cylinder masses times the
    probability that a uniform g fixes all of them, which is
    prod_v (free_v - d_v)! / free_v! with d_v the number of distinct free
    tuple members at v.  Tuples are grouped by the pattern of equal entries
    (a set partition of the coordinates) and by the (vertex, free or fixed)
    class of each distinct entry; only class sizes enter.
    """
    d = desc.diagram
    n = desc.level
    alpha.check(measures)
    if alpha.size > max_size:
        raise CapExceeded(f"|alpha| = {alpha.size} exceeds {max_size}")
    if d.total_paths(n) > max_paths:
        raise CapExceeded(f"{d.total_paths(n)} level-{n} paths exceed {max_paths}")
    labels = alpha.coordinate_labels()
    q = [measures[i].q(n) if alpha.exponents[i] else None for i in range(len(alpha.exponents))]
    h = d.path_counts(n)
    free = [len(f) for f in desc.free]
    # class c = (vertex, is_free) with size and per-coordinate mass
    classes = [(v, True, free[v]) for v in range(len(h))] + [(v, False, h[v] - free[v]) for v in range(len(h))]
    exact = _is_exact(measures)
    if not labels:
        return _zero(measures) + 1
    total = _zero(measures)
    for blocks in _set_partitions(list(range(len(labels)))):
        for assign in itertools.product(range(len(classes)), repeat=len(blocks)):
            used = [0] * len(classes)
            weight = Fraction(1) if exact else 1.0
            for block, c in zip(blocks, assign):
                used[c] += 1
                for j in block:
                    weight *= q[labels[j]][classes[c][0]]
            tuples, fix_prob = 1, Fraction(1)
            for c, k in enumerate(used):
                if not k:
                    continue
                ways = _falling(classes[c][2], k)
                if not ways:
                    break
                tuples *= ways
                if classes[c][1]:
                    fix_prob /= ways
            else:
                total += weight * tuples * (fix_prob if exact else float(fix_prob))
    return total


def brute_force_average(
    desc: YoungSubgroupDescriptor, alpha: ProductMeasureSpec, measures: Sequence[InvariantMeasure], max_order: int = 10**5
) -> Number:
    """Same mean by running over every element of the subgroup."""
    if desc.order > max_order:
        raise CapExceeded(f"subgroup order {desc.order} exceeds {max_order}")
    alpha.check(measures)
    n = desc.level
    h = desc.diagram.path_counts(n)
    frees = [sorted(f) for f in desc.free]
    total = _zero(measures)
    for images in itertools.product(*(itertools.permutations(f) for f in frees)):
        fixed = [h[v] - len(frees[v]) + sum(1 for a, b in zip(frees[v], images[v]) if a == b) for v in range(len(h))]
        value = Fraction(1) if _is_exact(measures) else 1.0
        for i, k in enumerate(alpha.exponents):
            if k:
                value *= sum(c * x for c, x in zip(fixed, measures[i].q(n))) ** k
        total += value
    return total / desc.order


def monte_carlo_average(
    desc: YoungSubgroupDescriptor,
    alpha: ProductMeasureSpec,
    measures: Sequence[InvariantMeasure],
    samples: int,
    seed: int,
    workers: int = 1,
) -> Estimate:
    """Sample mean of mu_alpha(Fix g) over uniform draws from the subgroup."""
    alpha.check(measures)
    n = desc.level
    h = desc.diagram.path_counts(n)
    q = {i: np.array([float(x) for x in measures[i].q(n)]) for i, k in enumerate(alpha.exponents) if k}
    frees = [len(f) for f in desc.free]

    def draw(count: int, rng: np.random.Generator) -> np.ndarray:
        fixed = np.tile(np.array([hv - k for hv, k in zip(h, frees)], dtype=float), (count, 1))
        for v, k in enumerate(frees):
            if k < 2:
                fixed[:, v] += k
                continue
            base = np.arange(k)
            step = max(1, 10**7 // k)
            for lo in range(0, count, step):
                hi = min(count, lo + step)
                perms = rng.permuted(np.tile(base, (hi - lo, 1)), axis=1)
                fixed[lo:hi, v] += (perms == base).sum(axis=1)
        out = np.ones(count)
        for i, k in enumerate(alpha.exponents):
            if k:
                out *= (fixed @ q[i]) ** k
        return out

    return mean_estimate(draw, samples, seed, workers)


@dataclass
class ProfileRow:
    level: int
    subgroup_order: int
    method: str
    value: Number
    std_err: float


@dataclass
class Profile:
    rows: list[ProfileRow]
    lower_bound: Number

    @property
    def monotone(self) -> bool:
        """Non-increasing across exact rows."""
        vals = [r.value for r in self.rows if r.method == "exact"]
        return all(b <= a for a, b in zip(vals, vals[1:]))

    @property
    def bounded_below(self) -> bool:
        return all(r.value >= self.lower_bound for r in self.rows if r.method == "exact")


def average_profile(
    d: BratteliDiagram,
    a: ClopenSet,
    alpha: ProductMeasureSpec,
    measures: Sequence[InvariantMeasure],
    levels: Sequence[int],
    samples: int = 10**4,
    seed: int | None = None,
    workers: int = 1,
    max_paths: int = 300,
) -> Profile:
    """Average of mu_alpha(Fix g) over G_n°(A) for each requested level.

    Levels beyond the exact caps fall back to Monte Carlo, which needs a seed.
    """
    rows = []
    for n in levels:
        desc = pointwise_stabilizer(a, n)
        try:
            value = exact_average(desc, alpha, measures, max_paths=max_paths)
            rows.append(ProfileRow(n, desc.order, "exact", value, 0.0))
        except CapExceeded:
            if seed is None:
                raise
            est = monte_carlo_average(desc, alpha, measures, samples, seed + n, workers)
            rows.append(ProfileRow(n, desc.order, "mc", est.value, est.std_err))
    return Profile(rows, product_clopen_measure(alpha, measures, a))


# -- inclusion-exclusion ----------------------------------------------------


@dataclass
class IEPReport:
    direct: Number
    inclusion_exclusion: Number
    residual: Number
    family_size: int
    pairwise_hypothesis: bool

    @property
    def holds(self) -> bool:
        return self.residual == 0 if isinstance(self.residual, Fraction) else abs(self.residual) <= PSD_TOL


def verify_iep(
    d: BratteliDiagram,
    alpha: ProductMeasureSpec,
    measures: Sequence[InvariantMeasure],
    n: int,
    p: int,
    max_family: int = 10**4,
    max_terms: int = 10**6,
) -> IEPReport:
    """Check mu_alpha(U_C (U C)^K) against inclusion-exclusion over p-subsets of level-n cylinders.

    Raises HypothesisViolation when a single p-union is already the whole
    space; ``pairwise_hypothesis`` records whether no two p-unions cover it.
    """
    alpha.check(measures)
    total = d.total_paths(n)
    if p < 1 or p >= total:
        raise HypothesisViolation(f"p = {p}: a union of {p} of the {total} level-{n} cylinders must be a proper subset")
    if math.comb(total, p) > max_family:
        raise CapExceeded(f"{math.comb(total, p)} p-subsets exceed {max_family}")
    k = alpha.size
    if total**k > max_terms:
        raise CapExceeded(f"{total}^{k} product cylinders exceed {max_terms}")
    family = [frozenset(c) for c in itertools.combinations(range(total), p)]
    labels = alpha.coordinate_labels()
    vertex_of = np.repeat(np.arange(d.num_vertices(n)), d.path_counts(n))
    mass = {i: [measures[i].q(n)[int(vertex_of[c])] for c in range(total)] for i in set(labels)}

    direct = _zero(measures) + (1 if k == 0 else 0)
    if k:
        for tup in itertools.product(range(total), repeat=k):
            members = set(tup)
            if any(members <= s for s in family):
                term = Fraction(1) if _is_exact(measures) else 1.0
                for j, c in zip(labels, tup):
                    term *= mass[j][c]
                direct += term

    # signed count of index sets J per intersection of their unions
    coeffs: dict[frozenset, int] = {}
    for s in family:
        update = dict(coeffs)
        update[s] = update.get(s, 0) + 1
        for t, c in coeffs.items():
            key = t & s
            update[key] = update.get(key, 0) - c
        coeffs = {t: c for t, c in update.items() if c}
    iep = _zero(measures)
    for t, c in coeffs.items():
        cyl = ClopenSet.from_codes(d, n, t)
        iep += c * product_clopen_measure(alpha, measures, cyl)
    return IEPReport(direct, iep, direct - iep, len(family), 2 * p < total)
