"""Command-line front end.  Every command writes CSV with a trailing metadata line.

Exit codes: 0 success, 1 verification failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__, verify
from .character import CharacterSpec, average_profile, evaluate
from .diagram import STATIONARY, BratteliDiagram, is_even_up_to, is_simple_up_to
from .errors import BratteliError, InputError
from .formats import format_element, load_diagram, load_element, load_measure, measure_to_dict, parse_clopen
from .irs import empirical_f_measure, estimate_chi_prime
from .measure import (
    FLOAT,
    RATIONAL,
    InvariantMeasure,
    ProductMeasureSpec,
    approximate_ergodic_set,
    product_clopen_measure,
    stationary_measure,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2
STOCHASTIC = ("sample-irs",)


@dataclass
class RunConfig:
    """Parsed command line; each command reads only the fields it needs."""

    command: str
    diagram: str | None = None
    measure: list[str] | None = None
    mode: str | None = None
    alpha: str | None = None
    element: str | None = None
    regular: bool = False
    set: str | None = None
    levels: str = "1..5"
    depth: int | None = 12
    samples: int | None = None
    seed: int | None = None
    workers: int = 1
    out: Path | None = None
    json: bool = False
    search: int | None = None
    which: str = "all"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in vars(args).items() if k in names})

    def validate(self) -> None:
        if self.command in STOCHASTIC and self.seed is None:
            raise InputError(f"{self.command} is stochastic: --seed is required")
        if self.workers < 1:
            raise InputError("--workers must be at least 1")
        if self.samples is not None and self.samples < 1:
            raise InputError("--samples must be positive")


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(header: Sequence[str], rows: Sequence[Sequence], out: Path | None, seed=None, workers=1) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    buf.write(f"# seed={seed if seed is not None else 'none'}, workers={workers}, tool-version={__version__}\n")
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        out.write_text(buf.getvalue())


def parse_levels(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            levels = list(range(int(a), int(b) + 1))
        else:
            levels = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"--levels {text!r}: expected 'a..b' or a comma-separated list") from exc
    if not levels or min(levels) < 1:
        raise InputError(f"--levels {text!r}: levels start at 1")
    return levels


def compute_measures(d: BratteliDiagram, mode: str | None, depth: int) -> list[InvariantMeasure]:
    """Perron measure for primitive stationary diagrams, else estimated ergodic measures."""
    if d.continuation == STATIONARY:
        try:
            return [stationary_measure(d, depth, mode or "auto")]
        except InputError as exc:
            if "primitive" not in str(exc):
                raise
    if mode == RATIONAL:
        raise InputError("rational measures are only computed for primitive stationary diagrams; supply --measure")
    report = approximate_ergodic_set(d, max(depth, 40))
    return report.measures


def _measures(cfg: RunConfig, d: BratteliDiagram, depth: int) -> list[InvariantMeasure]:
    if cfg.measure:
        return [load_measure(p, d, i) for i, p in enumerate(cfg.measure)]
    return compute_measures(d, cfg.mode, depth)


# -- commands ----------------------------------------------------------------


def cmd_info(cfg: RunConfig) -> int:
    d = load_diagram(cfg.diagram)
    rows = []
    for n in parse_levels(cfg.levels):
        d.check_level(n)
        simple = is_simple_up_to(d, n, cfg.search and n + cfg.search)
        even = is_even_up_to(d, n, cfg.search and n + cfg.search)
        rows.append(
            [n, d.num_vertices(n), " ".join(map(str, d.path_counts(n))), d.total_paths(n),
             "unknown" if simple is None else simple, "unknown" if even is None else even]
        )
    write_csv(["level", "vertices", "path_counts", "total_paths", "simple_window_m", "even_window_m"], rows, cfg.out)
    return EXIT_OK


def cmd_measures(cfg: RunConfig) -> int:
    d = load_diagram(cfg.diagram)
    measures = _measures(cfg, d, cfg.depth)
    if cfg.json:
        import json

        doc = [measure_to_dict(m) for m in measures]
        text = json.dumps(doc[0] if len(doc) == 1 else doc, indent=1) + "\n"
        if cfg.out:
            cfg.out.write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    rows = []
    for i, mu in enumerate(measures):
        for n in range(1, mu.depth + 1):
            for v, (q, hq) in enumerate(zip(mu.q(n), mu.vertex_mass(n))):
                rows.append([i, n, v, q, hq])
    write_csv(["measure", "level", "vertex", "q", "hq"], rows, cfg.out)
    return EXIT_OK


def _alpha(cfg: RunConfig) -> ProductMeasureSpec:
    return ProductMeasureSpec.parse(cfg.alpha)


def cmd_char(cfg: RunConfig) -> int:
    d = load_diagram(cfg.diagram)
    g = load_element(cfg.element, d)
    measures = _measures(cfg, d, max(cfg.depth, g.level))
    spec = CharacterSpec.regular() if cfg.regular else CharacterSpec.of(_alpha(cfg))
    value = evaluate(spec, g, measures)
    name = "regular" if cfg.regular else str(spec.alpha)
    write_csv(["character", "element", "value"], [[name, format_element(g), value]], cfg.out)
    return EXIT_OK


def cmd_avg(cfg: RunConfig) -> int:
    d = load_diagram(cfg.diagram)
    levels = parse_levels(cfg.levels)
    a = parse_clopen(cfg.set, d)
    measures = _measures(cfg, d, max(max(levels), a.level, cfg.depth))
    prof = average_profile(d, a, _alpha(cfg), measures, levels, samples=cfg.samples, seed=cfg.seed, workers=cfg.workers)
    rows = [[r.level, r.subgroup_order, r.method, r.value, r.std_err] for r in prof.rows]
    write_csv(["level", "subgroup_order", "exact_or_mc", "value", "std_err"], rows, cfg.out, cfg.seed, cfg.workers)
    return EXIT_OK


def cmd_sample_irs(cfg: RunConfig) -> int:
    d = load_diagram(cfg.diagram)
    g = load_element(cfg.element, d)
    alpha = _alpha(cfg)
    depth = cfg.depth if cfg.depth is not None else g.level + 4
    measures = _measures(cfg, d, max(depth, g.level))
    spec = CharacterSpec.of(alpha)
    exact = evaluate(spec, g, measures)
    res = estimate_chi_prime(alpha, g, measures, cfg.samples, depth, cfg.seed, cfg.workers)
    rows = [
        ["chi", res.chi.value, res.chi.std_err, exact, res.collision_rate],
        ["chi_prime", res.chi_prime.value, res.chi_prime.std_err, exact, res.collision_rate],
    ]
    if cfg.set:
        a = parse_clopen(cfg.set, d)
        est = empirical_f_measure(alpha, a, measures, cfg.samples, max(depth, a.level), cfg.seed, cfg.workers)
        rows.append(["phi_F(A)", est.value, est.std_err, product_clopen_measure(alpha, measures, a), ""])
    write_csv(["quantity", "estimate", "std_err", "exact_reference", "collision_rate"], rows, cfg.out, cfg.seed, cfg.workers)
    return EXIT_OK


def _verify_kwargs(name: str, cfg: RunConfig) -> dict:
    """Seed, sample and worker overrides for the checks that take them."""
    kwargs = {}
    if name in ("psd", "chi") and cfg.seed is not None:
        kwargs["seed"] = cfg.seed
    if name == "chi":
        kwargs["workers"] = cfg.workers
        if cfg.samples is not None:
            kwargs["samples"] = cfg.samples
    return kwargs


def cmd_verify(cfg: RunConfig) -> int:
    names = verify.CHECKS if cfg.which == "all" else (cfg.which,)
    results = [verify.RUNNERS[n](**_verify_kwargs(n, cfg)) for n in names]
    failed = [row for r in results for row in r.rows if not row["ok"]]
    cols = ("check", "case", "value", "reference", "ok")
    if failed:
        write_csv(cols, [[f[k] for k in cols] for f in failed], cfg.out, cfg.seed, cfg.workers)
        return EXIT_FAILED
    rows = []
    for r in results:
        detail = f"cases={len(r.rows)}"
        if r.name == "hermite":
            detail = f"labeling={r.rows[-1]['value']}"
        rows.append([r.name, "pass", detail])
    write_csv(["check", "status", "detail"], rows, cfg.out, cfg.seed, cfg.workers)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bratteli-irs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, diagram_required=True):
        p.add_argument("--diagram", required=diagram_required, help="diagram JSON file or built-in name (odometer:2, all-ones:2, polynomial-example)")
        p.add_argument("--out", type=Path, help="write output here instead of stdout")
        p.add_argument("--mode", choices=(RATIONAL, FLOAT), help="arithmetic for computed measures (default: rational when possible)")
        p.add_argument("--measure", action="append", help="measure JSON file; repeat for several ergodic measures")
        p.add_argument("--depth", type=int, default=12, help="measure / trace depth")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("info", help="vertex and path counts, simple/even windows")
    common(p)
    p.add_argument("--levels", default="1..5")
    p.add_argument("--search", type=int, default=None, help="window search span (default 25)")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("measures", help="invariant measures as CSV (or JSON with --json)")
    common(p)
    p.add_argument("--json", action="store_true", help="emit the measure file format instead of CSV")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("char", help="evaluate a character on a group element")
    common(p)
    p.add_argument("--alpha", default="1")
    p.add_argument("--regular", action="store_true", help="evaluate the regular character instead")
    p.add_argument("--element", required=True, help="element text or a file containing it")
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("avg", help="fixed-point averages over pointwise stabilizers per level")
    common(p)
    p.add_argument("--alpha", default="1")
    p.add_argument("--set", default="empty", help="clopen set A, e.g. 'level=1; v0:0' (default: empty)")
    p.add_argument("--levels", default="1..6")
    p.add_argument("--samples", type=int, default=10**4, help="Monte Carlo samples for levels beyond the exact caps")
    p.set_defaults(func=cmd_avg)

    p = sub.add_parser("sample-irs", help="estimate chi and chi' from sampled stabilizers")
    common(p)
    p.set_defaults(depth=None)
    p.add_argument("--alpha", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--set", help="also estimate phi_alpha(F(A)) for this clopen set")
    p.set_defaults(func=cmd_sample_irs)

    p = sub.add_parser("verify", help="run the identity checks")
    common(p, diagram_required=False)
    p.add_argument("which", nargs="?", default="all", choices=verify.CHECKS + ("all",))
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        cfg.validate()
        return args.func(cfg)
    except BratteliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
