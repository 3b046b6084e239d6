"""Exact Hermite evaluation in Z[i, sqrt2] and the path-count identities of the
polynomial example diagram F_n = [[1, 1], [n, 1]].

Elements of Z[i, sqrt2] are ``a + b*i + c*sqrt2 + d*i*sqrt2`` with integer
coefficients, so the value 2 (-i/sqrt2)^k H_k(i sqrt2) is computed without
rounding and is checked to be a rational integer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import BratteliDiagram, polynomial_example


@dataclass(frozen=True)
class QI2:
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    def __add__(self, o: "QI2") -> "QI2":
        return QI2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "QI2") -> "QI2":
        return QI2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __mul__(self, o):
        if isinstance(o, int):
            return QI2(self.a * o, self.b * o, self.c * o, self.d * o)
        # basis products: i^2 = -1, sqrt2^2 = 2
        a = self.a * o.a - self.b * o.b + 2 * self.c * o.c - 2 * self.d * o.d
        b = self.a * o.b + self.b * o.a + 2 * self.c * o.d + 2 * self.d * o.c
        c = self.a * o.c + self.c * o.a - self.b * o.d - self.d * o.b
        d = self.a * o.d + self.d * o.a + self.b * o.c + self.c * o.b
        return QI2(a, b, c, d)

    __rmul__ = __mul__

    def div_sqrt2(self) -> "QI2":
        """Exact division by sqrt2; fails if the quotient leaves the ring."""
        if self.a % 2 or self.b % 2:
            raise ArithmeticError(f"{self} is not divisible by sqrt2 in Z[i, sqrt2]")
        return QI2(self.c, self.d, self.a // 2, self.b // 2)

    def as_int(self) -> int:
        if self.b or self.c or self.d:
            raise ArithmeticError(f"{self} is not a rational integer")
        return self.a


ONE = QI2(1)
I = QI2(0, 1)
I_SQRT2 = QI2(0, 0, 0, 1)


def hermite(k: int, x: QI2) -> QI2:
    """Physicists' Hermite polynomial: H_0 = 1, H_1 = 2x, H_{j+1} = 2x H_j - 2j H_{j-1}."""
    prev, cur = ONE, x * 2
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, x * cur * 2 - prev * (2 * j)
    return cur


def hermite_count(n: int) -> int:
    """2 (-i/sqrt2)^{n-2} H_{n-2}(i sqrt2), for n >= 2."""
    k = n - 2
    value = hermite(k, I_SQRT2) * 2
    minus_i = QI2(0, -1)
    for _ in range(k):
        value = (value * minus_i).div_sqrt2()
    return value.as_int()


@dataclass
class HermiteReport:
    labeling: str | None
    rows: list[tuple[int, int, int, int, int | None]]  # n, h_bottom, h_top, hermite, recurrence
    bottom_ok: dict[str, bool]
    top_ok: dict[str, bool]

    @property
    def passed(self) -> bool:
        return self.labeling is not None


def check_hermite(d: BratteliDiagram | None = None, n_max: int = 20) -> HermiteReport:
    """Test both vertex labelings of the two-vertex diagram against the identities.

    Labeling ``row0-bottom`` reads vertex 0 as the bottom vertex; ``row1-bottom``
    swaps them.  The bottom counts must equal the Hermite values for
    n = 2..n_max and the top counts must satisfy
    h_t(n) = n h_b(n-1) + (n-3) h_b(n-2) for n = 3..n_max.
    """
    d = d or polynomial_example()
    counts = {n: d.path_counts(n) for n in range(1, n_max + 1)}
    herm = {n: hermite_count(n) for n in range(2, n_max + 1)}
    bottom_ok, top_ok = {}, {}
    for name, b, t in (("row0-bottom", 0, 1), ("row1-bottom", 1, 0)):
        hb = {n: counts[n][b] for n in counts}
        ht = {n: counts[n][t] for n in counts}
        bottom_ok[name] = all(hb[n] == herm[n] for n in range(2, n_max + 1))
        top_ok[name] = all(ht[n] == n * hb[n - 1] + (n - 3) * hb[n - 2] for n in range(3, n_max + 1))
    matched = [name for name in bottom_ok if bottom_ok[name] and top_ok[name]]
    labeling = matched[0] if matched else None
    b, t = (1, 0) if labeling == "row1-bottom" else (0, 1)
    rows = []
    for n in range(2, n_max + 1):
        rec = n * counts[n - 1][b] + (n - 3) * counts[n - 2][b] if n >= 3 else None
        rows.append((n, counts[n][b], counts[n][t], herm[n], rec))
    return HermiteReport(labeling, rows, bottom_ok, top_ok)
