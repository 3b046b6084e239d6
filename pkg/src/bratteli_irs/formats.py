"""Text formats: diagram JSON, measure JSON, group elements and clopen sets."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .clopen import ClopenSet
from .diagram import CONTINUATIONS, TRUNCATED, BratteliDiagram, all_ones, odometer, polynomial_example
from .errors import InputError
from .group import GroupElement
from .measure import FLOAT, RATIONAL, InvariantMeasure


def _read_json(source: str | Path, what: str) -> Any:
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {source}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _int_list(value, field: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise InputError(f"{field}: expected a list of integers")
    return value


# -- diagrams ----------------------------------------------------------------


def diagram_from_dict(doc: Any) -> BratteliDiagram:
    if not isinstance(doc, dict):
        raise InputError("diagram: expected a JSON object")
    unknown = set(doc) - {"root_edges", "matrices", "continuation"}
    if unknown:
        raise InputError(f"diagram: unknown field(s) {sorted(unknown)}")
    if "root_edges" not in doc:
        raise InputError("diagram: missing field 'root_edges'")
    root = _int_list(doc["root_edges"], "root_edges")
    mats = doc.get("matrices", [])
    if not isinstance(mats, list):
        raise InputError("matrices: expected a list of matrices")
    for n, m in enumerate(mats, start=1):
        if not isinstance(m, list):
            raise InputError(f"matrices[{n - 1}]: expected a list of rows")
        for i, row in enumerate(m):
            _int_list(row, f"matrices[{n - 1}][{i}]")
    cont = doc.get("continuation", TRUNCATED)
    if cont not in CONTINUATIONS:
        raise InputError(f"continuation: {cont!r} is not one of {list(CONTINUATIONS)}")
    return BratteliDiagram(tuple(root), tuple(tuple(map(tuple, m)) for m in mats), cont)


def diagram_to_dict(d: BratteliDiagram) -> dict:
    return {
        "root_edges": list(d.root_edges),
        "matrices": [[list(row) for row in m] for m in d.matrices],
        "continuation": d.continuation,
    }


BUILTINS = {
    "odometer": lambda k=2: odometer(k),
    "all-ones": lambda k=2: all_ones(k),
    "polynomial-example": lambda: polynomial_example(),
}


def load_diagram(source: str | Path) -> BratteliDiagram:
    """Read a diagram file, or a built-in name such as ``odometer:2``, ``all-ones:2``, ``polynomial-example``."""
    name, _, arg = str(source).partition(":")
    if name in BUILTINS and not Path(str(source)).exists():
        try:
            return BUILTINS[name](int(arg)) if arg else BUILTINS[name]()
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad built-in diagram {source!r}") from exc
    return diagram_from_dict(_read_json(source, "diagram"))


# -- measures ----------------------------------------------------------------


def _encode(x) -> Any:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return float(x)


def _decode(x, mode: str, where: str):
    try:
        if mode == RATIONAL:
            if isinstance(x, float):
                raise ValueError
            return Fraction(x)
        if isinstance(x, str):
            return float(Fraction(x))
        return float(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"{where}: cannot read {x!r} as a {mode} number") from exc


def measure_to_dict(mu: InvariantMeasure) -> dict:
    return {"depth": mu.depth, "levels": [[_encode(x) for x in q] for q in mu.levels], "mode": mu.mode}


def measure_from_dict(doc: Any, d: BratteliDiagram, label: int | None = None) -> InvariantMeasure:
    if not isinstance(doc, dict):
        raise InputError("measure: expected a JSON object")
    mode = doc.get("mode", FLOAT)
    if mode not in (RATIONAL, FLOAT):
        raise InputError(f"measure mode {mode!r} is not 'rational' or 'float'")
    levels = doc.get("levels")
    if not isinstance(levels, list) or not levels:
        raise InputError("measure: 'levels' must be a non-empty list")
    depth = doc.get("depth", len(levels))
    if depth != len(levels):
        raise InputError(f"measure: depth {depth} but {len(levels)} levels given")
    parsed = tuple(tuple(_decode(x, mode, f"levels[{n}][{v}]") for v, x in enumerate(q)) for n, q in enumerate(levels))
    return InvariantMeasure(d, parsed, mode, label)


def load_measure(source: str | Path, d: BratteliDiagram, label: int | None = None) -> InvariantMeasure:
    return measure_from_dict(_read_json(source, "measure"), d, label)


# -- group elements and clopen sets -----------------------------------------

_HEADER = re.compile(r"^\s*level\s*=\s*(\d+)\s*$")
_VERTEX = re.compile(r"^\s*v(\d+)\s*:\s*(.*?)\s*$")
_CYCLE = re.compile(r"\(([^()]*)\)")


def _split(text: str, what: str) -> tuple[int, list[tuple[int, str]]]:
    parts = [p for p in text.strip().split(";") if p.strip()]
    if not parts:
        raise InputError(f"{what}: empty text")
    head = _HEADER.match(parts[0])
    if not head:
        raise InputError(f"{what}: expected 'level=n' first, got {parts[0].strip()!r}")
    body = []
    for p in parts[1:]:
        m = _VERTEX.match(p)
        if not m:
            raise InputError(f"{what}: cannot parse {p.strip()!r}; expected 'v<k>:...'")
        body.append((int(m.group(1)), m.group(2)))
    return int(head.group(1)), body


def parse_element(text: str, d: BratteliDiagram) -> GroupElement:
    """Parse ``level=n; v0:(0 1)(2 3); v1:id``; unlisted vertices act trivially."""
    n, body = _split(text, "element")
    d.check_level(n)
    cycles: dict[int, list[tuple[int, ...]]] = {}
    for v, spec in body:
        if v in cycles:
            raise InputError(f"element: vertex v{v} listed twice")
        if spec == "id":
            cycles[v] = []
            continue
        if _CYCLE.sub("", spec).strip():
            raise InputError(f"element: vertex v{v}: expected 'id' or cycles like '(0 1)(2 3)', got {spec!r}")
        try:
            cycles[v] = [tuple(int(x) for x in c.replace(",", " ").split()) for c in _CYCLE.findall(spec)]
        except ValueError as exc:
            raise InputError(f"element: vertex v{v}: non-integer label in {spec!r}") from exc
    return GroupElement.from_cycles(d, n, cycles)


def format_element(g: GroupElement) -> str:
    parts = [f"level={g.level}"]
    for v, cyc_list in sorted(g.cycles().items()):
        parts.append(f"v{v}:" + "".join("(" + " ".join(map(str, c)) + ")" for c in cyc_list))
    return "; ".join(parts)


def load_element(source: str, d: BratteliDiagram) -> GroupElement:
    """An element given inline or as a path to a file holding the text."""
    path = Path(source)
    if "level" not in source and path.exists():
        source = path.read_text()
    return parse_element(source, d)


def parse_clopen(text: str, d: BratteliDiagram) -> ClopenSet:
    """Parse ``level=n; v0:0,1,2; v1:3`` (labels of level-n cylinders), ``empty`` or ``all``."""
    if text.strip() in ("empty", "all"):
        return ClopenSet.empty(d) if text.strip() == "empty" else ClopenSet.whole(d)
    n, body = _split(text, "set")
    d.check_level(n)
    labels = set()
    for v, spec in body:
        try:
            labels.update((v, int(x)) for x in spec.replace(" ", ",").split(",") if x)
        except ValueError as exc:
            raise InputError(f"set: vertex v{v}: labels must be integers, got {spec!r}") from exc
    return ClopenSet(d, n, frozenset(labels))


def format_clopen(a: ClopenSet) -> str:
    by_v: dict[int, list[int]] = {}
    for v, x in sorted(a.labels):
        by_v.setdefault(v, []).append(x)
    return "; ".join([f"level={a.level}"] + [f"v{v}:" + ",".join(map(str, xs)) for v, xs in by_v.items()])
