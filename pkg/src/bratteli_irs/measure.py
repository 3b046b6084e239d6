"""Invariant measures on the path space stored as per-level cylinder weights.

A full-group invariant measure gives every cylinder ending at ``v`` in ``V_n``
the same mass ``q_v^{(n)}``; the vectors ``q^{(n)}`` must satisfy

    q_w^{(n)} = sum_v f_{v,w}^{(n)} q_v^{(n+1)}      (compatibility)
    sum_w h_w^{(n)} q_w^{(n)} = 1                    (normalization)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .clopen import ClopenSet
from .diagram import STATIONARY, BratteliDiagram, FinitePath, check_path, telescope
from .errors import ConvergenceError, DepthExceeded, InputError

RATIONAL = "rational"
FLOAT = "float"
TAU_MEAS = 1e-10
PERRON_TOL = 1e-12

Number = Union[Fraction, float]


@dataclass(frozen=True, eq=False)
class InvariantMeasure:
    diagram: BratteliDiagram
    levels: tuple[tuple[Number, ...], ...]
    mode: str = FLOAT
    label: int | None = None
    tolerance: float = TAU_MEAS

    def __post_init__(self):
        if self.mode not in (RATIONAL, FLOAT):
            raise InputError(f"unknown arithmetic mode {self.mode!r}")
        conv = Fraction if self.mode == RATIONAL else float
        levels = tuple(tuple(conv(x) for x in q) for q in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise InputError("a measure needs at least one level")
        for n, q in enumerate(levels, start=1):
            if len(q) != self.diagram.num_vertices(n):
                raise InputError(f"level {n}: {len(q)} weights for {self.diagram.num_vertices(n)} vertices")
            if any(x < 0 for x in q):
                raise InputError(f"level {n}: negative weight")
        compat, norm = self.residuals()
        limit = 0 if self.mode == RATIONAL else self.tolerance
        if compat > limit:
            raise InputError(f"weights violate compatibility (residual {float(compat):.3g})")
        if norm > limit:
            raise InputError(f"weights are not normalized (residual {float(norm):.3g})")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def q(self, n: int) -> tuple[Number, ...]:
        if not 1 <= n <= self.depth:
            raise DepthExceeded(f"level {n} requested from a depth-{self.depth} measure")
        return self.levels[n - 1]

    def vertex_mass(self, n: int) -> tuple[Number, ...]:
        """Mass of the union of all cylinders ending at each vertex: h_v q_v."""
        return tuple(h * x for h, x in zip(self.diagram.path_counts(n), self.q(n)))

    def residuals(self) -> tuple[Number, Number]:
        """Largest compatibility and normalization defects over stored levels."""
        compat: Number = 0
        norm: Number = 0
        for n in range(1, self.depth + 1):
            norm = max(norm, abs(sum(self.vertex_mass(n)) - 1))
            if n < self.depth:
                f = self.diagram.matrix(n)
                up = self.levels[n]
                for w, qw in enumerate(self.levels[n - 1]):
                    compat = max(compat, abs(qw - sum(f[v][w] * up[v] for v in range(len(f)))))
        return compat, norm

    def as_float(self) -> "InvariantMeasure":
        if self.mode == FLOAT:
            return self
        return InvariantMeasure(self.diagram, self.levels, FLOAT, self.label)


@dataclass(frozen=True)
class ProductMeasureSpec:
    """Multi-index alpha: exponent of each ergodic measure in the product."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(x) for x in self.exponents)
        if any(x < 0 for x in exps):
            raise InputError(f"alpha {exps}: exponents must be nonnegative")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def parse(cls, text: str) -> "ProductMeasureSpec":
        try:
            return cls(tuple(int(x) for x in text.replace(" ", "").split(",") if x != ""))
        except ValueError as exc:
            raise InputError(f"alpha {text!r}: expected comma-separated integers") from exc

    @property
    def size(self) -> int:
        return sum(self.exponents)

    def coordinate_labels(self) -> tuple[int, ...]:
        """Measure label of each coordinate of X^{|alpha|}, e.g. (2, 0, 1) -> (0, 0, 2)."""
        return tuple(i for i, a in enumerate(self.exponents) for _ in range(a))

    def check(self, measures: Sequence[InvariantMeasure]) -> None:
        for i, a in enumerate(self.exponents):
            if a and i >= len(measures):
                raise InputError(f"alpha uses measure {i} but only {len(measures)} measures are available")

    def __str__(self):
        return ",".join(map(str, self.exponents))


# -- construction ------------------------------------------------------------


def _is_primitive(a: np.ndarray) -> bool:
    k = len(a)
    b = (a > 0).astype(np.int64)
    p = b.copy()
    for _ in range((k - 1) ** 2 + 1):  # Wielandt bound
        if p.all():
            return True
        p = ((p @ b) > 0).astype(np.int64)
    return bool(p.all())


def _rational_perron(a: Sequence[Sequence[int]], lam: float):
    k = round(lam)
    if k < 1 or abs(k - lam) > 1e-9 * max(1.0, lam):
        return None
    import sympy

    at = sympy.Matrix(a).T
    null = (at - k * sympy.eye(at.rows)).nullspace()
    if len(null) != 1:
        return None
    vec = [Fraction(int(x.p), int(x.q)) for x in null[0]]
    if all(x <= 0 for x in vec):
        vec = [-x for x in vec]
    if any(x <= 0 for x in vec):
        return None
    return Fraction(k), vec


def _float_perron(a: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eig(a.T)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    xi = np.abs(vecs[:, i].real)
    xi /= xi.max()
    at = a.T
    for _ in range(10000):
        resid = np.max(np.abs(at @ xi - lam * xi))
        if resid <= PERRON_TOL * max(1.0, lam):
            return lam, xi
        y = at @ xi
        lam = float(y.max())
        xi = y / lam
    raise ConvergenceError(f"Perron vector did not converge (residual {resid:.3g})")


def stationary_measure(d: BratteliDiagram, depth: int = 20, mode: str = "auto") -> InvariantMeasure:
    """The unique invariant probability of a stationary diagram with a primitive matrix.

    ``mode`` is ``rational`` (fail unless the Perron data are rational),
    ``float``, or ``auto`` (rational when possible).
    """
    if d.continuation != STATIONARY:
        raise InputError("stationary_measure needs a stationary diagram")
    a = np.array(d.matrices[-1], dtype=float)
    if not _is_primitive(a):
        raise InputError("last incidence matrix is not primitive")
    base = max(1, d.level_count - 1)  # F_n is the repeated matrix for all n >= base
    depth = max(depth, base)
    lam, xi = _float_perron(a)
    exact = _rational_perron(d.matrices[-1], lam) if mode in (RATIONAL, "auto") else None
    if mode == RATIONAL and exact is None:
        raise InputError("Perron data of this diagram are not rational; use float mode")
    if exact is not None:
        lam_e, xi_e = exact
        levels = {n: [x / lam_e ** (n - base) for x in xi_e] for n in range(base, depth + 1)}
        mode_out = RATIONAL
    else:
        levels = {n: list(xi / lam ** (n - base)) for n in range(base, depth + 1)}
        mode_out = FLOAT
    for n in range(base - 1, 0, -1):
        f = d.matrix(n)
        levels[n] = [sum(f[v][w] * levels[n + 1][v] for v in range(len(f))) for w in range(len(f[0]))]
    total = sum(h * x for h, x in zip(d.path_counts(1), levels[1]))
    return InvariantMeasure(d, tuple(tuple(x / total for x in levels[n]) for n in range(1, depth + 1)), mode_out, label=0)


@dataclass
class ErgodicSetReport:
    """Estimated ergodic measures with clustering diagnostics."""

    measures: list[InvariantMeasure]
    depth: int
    tolerance: float
    compare_levels: int
    intra_spread: float
    inter_depth_spread: float
    previous_count: int
    stable: bool = field(init=False)

    def __post_init__(self):
        self.stable = self.previous_count == len(self.measures) and self.inter_depth_spread <= self.tolerance

    @property
    def count(self) -> int:
        return len(self.measures)


def _dirac_candidates(d: BratteliDiagram, depth: int) -> list[list[list[float]]]:
    """Push the uniform measure on the paths through each top vertex down to all levels."""
    h_top = d.path_counts(depth)
    cands = []
    for w in range(d.num_vertices(depth)):
        levels = []
        for n in range(1, depth):
            row = telescope(d, n, depth)[w]
            levels.append([x / h_top[w] for x in row])
        levels.append([1 / h_top[w] if v == w else 0.0 for v in range(len(h_top))])
        cands.append(levels)
    return cands


def _distance(a, b, levels: int) -> float:
    return max(abs(x - y) for n in range(levels) for x, y in zip(a[n], b[n]))


def _cluster(cands, eps: float, levels: int):
    clusters: list[list[int]] = []
    for i, c in enumerate(cands):
        for cl in clusters:
            if _distance(cands[cl[0]], c, levels) <= eps:
                cl.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def approximate_ergodic_set(
    d: BratteliDiagram, depth: int = 40, eps: float = 1e-6, compare_levels: int = 3
) -> ErgodicSetReport:
    """Estimate the ergodic measures by clustering pushed-down Dirac weights.

    The count is an estimate; ``stable`` records whether depth and depth-1
    produce the same clusters within ``eps``.
    """
    if depth < 3:
        raise InputError("approximate_ergodic_set needs depth >= 3")
    d.check_level(depth)
    compare_levels = min(compare_levels, depth - 1)

    def reps(m):
        cands = _dirac_candidates(d, m)
        clusters = _cluster(cands, eps, compare_levels)
        out, spread = [], 0.0
        for cl in clusters:
            mean = [[sum(cands[i][n][v] for i in cl) / len(cl) for v in range(len(cands[cl[0]][n]))] for n in range(m)]
            spread = max([spread] + [_distance(cands[i], mean, compare_levels) for i in cl])
            out.append(mean)
        return out, spread

    current, intra = reps(depth)
    previous, _ = reps(depth - 1)
    inter = max(min(_distance(c, p, compare_levels) for p in previous) for c in current)
    measures = [InvariantMeasure(d, tuple(map(tuple, lv)), FLOAT, label=i) for i, lv in enumerate(current)]
    return ErgodicSetReport(measures, depth, eps, compare_levels, intra, inter, len(previous))


# -- evaluation --------------------------------------------------------------


def cylinder_measure(mu: InvariantMeasure, p: FinitePath) -> Number:
    check_path(mu.diagram, p)
    return mu.q(p.level)[p.target]


def clopen_measure(mu: InvariantMeasure, a: ClopenSet) -> Number:
    q = mu.q(a.level)
    return sum((c * x for c, x in zip(a.counts(), q)), Fraction(0) if mu.mode == RATIONAL else 0.0)


def product_clopen_measure(alpha: ProductMeasureSpec, measures: Sequence[InvariantMeasure], a: ClopenSet) -> Number:
    """mu_alpha(A^{|alpha|}) = prod_i mu_i(A)^{alpha_i}."""
    alpha.check(measures)
    out: Number = Fraction(1)
    for i, k in enumerate(alpha.exponents):
        if k:
            out = out * clopen_measure(measures[i], a) ** k
    return out


# -- sampling ----------------------------------------------------------------


def sample_paths(mu: InvariantMeasure, m: int, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``size`` independent level-m paths; returns (size, m) vertex and edge arrays.

    Each step picks the next vertex v with probability f_{v,u} q_v / q_u and
    then one of the f_{v,u} parallel edges uniformly.
    """
    d = mu.diagram
    mu.q(m)
    verts = np.zeros((size, m), dtype=np.int64)
    edges = np.zeros((size, m), dtype=np.int64)
    u = np.zeros(size, dtype=np.int64)
    for i in range(1, m + 1):
        q = np.array([float(x) for x in mu.q(i)])
        if i == 1:
            f = np.array(d.root_edges, dtype=float).reshape(-1, 1)
            q_src = np.array([1.0])
        else:
            f = np.array(d.matrix(i - 1), dtype=float)
            q_src = np.array([float(x) for x in mu.q(i - 1)])
        step = np.zeros(size, dtype=np.int64)
        for src in range(f.shape[1]):
            idx = np.flatnonzero(u == src)
            if not len(idx):
                continue
            probs = f[:, src] * q / q_src[src]
            step[idx] = rng.choice(len(probs), size=len(idx), p=probs / probs.sum())
        fan = np.array(d.root_edges if i == 1 else d.matrix(i - 1), dtype=np.int64).reshape(f.shape)[step, u]
        verts[:, i - 1] = step
        edges[:, i - 1] = rng.integers(0, fan)
        u = step
    return verts, edges


def sample_path(mu: InvariantMeasure, m: int, rng: np.random.Generator) -> FinitePath:
    verts, edges = sample_paths(mu, m, 1, rng)
    return FinitePath(tuple(int(x) for x in verts[0]), tuple(int(x) for x in edges[0]))
