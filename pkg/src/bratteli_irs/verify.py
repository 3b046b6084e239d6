"""Verification suite: each check returns a named pass/fail result with detail rows."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .character import CharacterSpec, average_profile, check_psd, evaluate, verify_iep
from .clopen import ClopenSet
from .diagram import BratteliDiagram, all_ones, odometer, polynomial_example
from .group import GroupElement, generated_subgroup_order, local_subgroup, random_group_element
from .hermite import check_hermite
from .irs import estimate_chi
from .measure import ProductMeasureSpec, stationary_measure
from .montecarlo import Estimate

CHECKS = ("hermite", "monotone", "iep", "psd", "generation", "chi")
PSD_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    rows: list[dict] = field(default_factory=list)


def check_hermite_identity(n_max: int = 20) -> CheckResult:
    report = check_hermite(polynomial_example(), n_max)
    rows = [
        {"check": "hermite", "case": f"n={n}", "value": hb, "reference": herm, "ok": hb == herm and (rec is None or ht == rec)}
        for n, hb, ht, herm, rec in report.rows
    ]
    rows.append({"check": "hermite", "case": "labeling", "value": report.labeling or "none", "reference": "", "ok": report.passed})
    return CheckResult("hermite", report.passed, rows)


def check_monotone(levels=range(1, 7)) -> CheckResult:
    d = odometer(2)
    mu = stationary_measure(d, max(levels) + 1, "rational")
    alpha = ProductMeasureSpec((1,))
    rows, ok = [], True
    cases = {"A=empty": ClopenSet.empty(d), "A=level-1 cylinder": ClopenSet(d, 1, frozenset({(0, 0)}))}
    for name, a in cases.items():
        prof = average_profile(d, a, alpha, [mu], list(levels))
        vals = [r.value for r in prof.rows]
        strict = all(b < a_ for a_, b in zip(vals, vals[1:]))
        good = prof.monotone and prof.bounded_below and (strict if a.is_empty() else True)
        if a.is_empty():
            good = good and all(r.value == Fraction(1, 2**r.level) for r in prof.rows)
        ok &= good
        for r in prof.rows:
            rows.append({"check": "monotone", "case": f"{name} n={r.level}", "value": r.value, "reference": prof.lower_bound, "ok": good})
    return CheckResult("monotone", ok, rows)


def check_iep() -> CheckResult:
    d = odometer(2)
    mu = stationary_measure(d, 4, "rational")
    rows, ok = [], True
    for p in (1, 2):
        for alpha in ((1,), (2,)):
            rep = verify_iep(d, ProductMeasureSpec(alpha), [mu], 2, p)
            ok &= rep.residual == 0
            rows.append({"check": "iep", "case": f"p={p} alpha={alpha}", "value": rep.direct, "reference": rep.inclusion_exclusion, "ok": rep.residual == 0})
    return CheckResult("iep", ok, rows)


def check_psd_axioms(seed: int = 7, count: int = 10, level: int = 2) -> CheckResult:
    rows, ok = [], True
    for dname, d in (("odometer:2", odometer(2)), ("all-ones:2", all_ones(2))):
        mu = stationary_measure(d, level + 1, "rational")
        rng = np.random.default_rng(seed)
        elems = [random_group_element(d, level, rng) for _ in range(count)]
        for label, spec in (("alpha=(1)", CharacterSpec.of((1,))), ("alpha=(2)", CharacterSpec.of((2,))), ("regular", CharacterSpec.regular())):
            lam = check_psd(spec, elems, [mu])
            unit = evaluate(spec, GroupElement.identity(d, level), [mu]) == 1
            good = lam >= -PSD_TOL and unit
            ok &= good
            rows.append({"check": "psd", "case": f"{dname} {label}", "value": lam, "reference": -PSD_TOL, "ok": good})
    return CheckResult("psd", ok, rows)


def check_generation() -> CheckResult:
    d = odometer(2)
    n = 2
    c = ClopenSet(d, n, frozenset({(0, 0), (0, 1), (0, 2)}))
    dd = ClopenSet(d, n, frozenset({(0, 1), (0, 2), (0, 3)}))
    gens = local_subgroup(c, n).generators() + local_subgroup(dd, n).generators()
    got = generated_subgroup_order(gens, n, d)
    want = local_subgroup(c | dd, n).order
    return CheckResult("generation", got == want, [{"check": "generation", "case": "odometer:2 n=2", "value": got, "reference": want, "ok": got == want}])


def chi_cases() -> list[tuple[str, BratteliDiagram, ProductMeasureSpec, GroupElement]]:
    """Twenty (diagram, alpha, element) pairs on the 2-odometer and the all-ones 2x2 diagram."""
    cases = []
    o = odometer(2)
    o_elems = {
        "id": GroupElement.identity(o, 1),
        "L1 (0 1)": GroupElement.from_cycles(o, 1, {0: [(0, 1)]}),
        "L2 (0 1)": GroupElement.from_cycles(o, 2, {0: [(0, 1)]}),
        "L2 (0 1 2)": GroupElement.from_cycles(o, 2, {0: [(0, 1, 2)]}),
        "L3 (0 5)": GroupElement.from_cycles(o, 3, {0: [(0, 5)]}),
    }
    for alpha in ((1,), (2,)):
        for name, g in o_elems.items():
            cases.append((f"odometer:2 {name}", o, ProductMeasureSpec(alpha), g))
    a = all_ones(2)
    a_elems = {
        "id": GroupElement.identity(a, 2),
        "L2 v0:(0 1)": GroupElement.from_cycles(a, 2, {0: [(0, 1)]}),
        "L2 v0:(0 1) v1:(0 1)": GroupElement.from_cycles(a, 2, {0: [(0, 1)], 1: [(0, 1)]}),
        "L3 v1:(0 1 2)": GroupElement.from_cycles(a, 3, {1: [(0, 1, 2)]}),
        "L3 v0:(0 3)(1 2)": GroupElement.from_cycles(a, 3, {0: [(0, 3), (1, 2)]}),
    }
    for alpha in ((1,), (2,)):
        for name, g in a_elems.items():
            cases.append((f"all-ones:2 {name}", a, ProductMeasureSpec(alpha), g))
    cases.append(("odometer:2 L2 (0 1) alpha=(3)", o, ProductMeasureSpec((3,)), o_elems["L2 (0 1)"]))
    cases.append(("odometer:2 L2 (0 1) alpha=(0)", o, ProductMeasureSpec((0,)), o_elems["L2 (0 1)"]))
    return cases


def check_chi(samples: int = 10**5, seed: int = 11, workers: int = 1) -> CheckResult:
    rows, ok = [], True
    measures = {}
    for i, (name, d, alpha, g) in enumerate(chi_cases()):
        if d not in measures:
            measures[d] = [stationary_measure(d, 8, "rational")]
        exact = evaluate(CharacterSpec.of(alpha), g, measures[d])
        est: Estimate = estimate_chi(alpha, g, measures[d], samples, seed=seed + i, workers=workers)
        good = est.within(exact, 3.0) if est.std_err > 0 else est.value == exact
        ok &= good
        rows.append({"check": "chi", "case": f"{name} alpha={alpha}", "value": est.value, "reference": exact, "ok": good})
    return CheckResult("chi", ok, rows)


RUNNERS: dict[str, Callable[[], CheckResult]] = {
    "hermite": check_hermite_identity,
    "monotone": check_monotone,
    "iep": check_iep,
    "psd": check_psd_axioms,
    "generation": check_generation,
    "chi": check_chi,
}


def run(which: str = "all") -> list[CheckResult]:
    names = CHECKS if which == "all" else (which,)
    return [RUNNERS[name]() for name in names]
