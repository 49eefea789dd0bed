"""PV programs, their cube-with-holes model, and reachability analyses.

Syntax::

    # one line comment
    res a = 1;
    proc: Pa Pb Vb Va;
    proc: P b P a V a V b;

A process is a straight line of ``P`` (acquire) and ``V`` (release)
actions on declared resources.  The model is the grid whose axis ``i``
has one unit step per action of process ``i``; grid cubes touching an
over-capacity joint state are removed.
"""

from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field

from .freeomega import realize
from .homology import THEORIES, HomologyError, HomologyReport, cubical_homology, nerve_homology
from .precubical import PrecubicalSet, grid_subcomplex, vertex_name


class PVError(ValueError):
    """Malformed or ill-behaved program; ``line``/``col`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class FinalForbidden(PVError):
    """The joint end state exceeds some capacity, so the program never terminates."""


@dataclass(frozen=True)
class Action:
    op: str  # "P" or "V"
    resource: str

    def __str__(self) -> str:
        return f"{self.op}{self.resource}"


@dataclass(frozen=True)
class PVProgram:
    resources: dict
    processes: tuple

    def __post_init__(self):
        for name, cap in self.resources.items():
            if not isinstance(cap, int) or isinstance(cap, bool) or cap < 1:
                raise PVError(f"capacity of {name!r} must be a positive integer")
        for k, proc in enumerate(self.processes, start=1):
            held: set = set()
            for step, a in enumerate(proc, start=1):
                if a.resource not in self.resources:
                    raise PVError(f"process {k} action {step}: undeclared resource {a.resource!r}")
                if a.op == "P":
                    if a.resource in held:
                        raise PVError(f"process {k} action {step}: {a} while already holding {a.resource}")
                    held.add(a.resource)
                elif a.op == "V":
                    if a.resource not in held:
                        raise PVError(f"process {k} action {step}: {a} without holding {a.resource}")
                    held.discard(a.resource)
                else:
                    raise PVError(f"process {k} action {step}: unknown operation {a.op!r}")

    @property
    def lengths(self) -> list[int]:
        return [len(p) for p in self.processes]

    def holdings(self, k: int) -> list[frozenset]:
        """Resources held by process ``k`` after each prefix, positions 0..len."""
        held: set = set()
        out = [frozenset()]
        for a in self.processes[k]:
            if a.op == "P":
                held.add(a.resource)
            else:
                held.discard(a.resource)
            out.append(frozenset(held))
        return out

    def permuted(self, order) -> "PVProgram":
        return PVProgram(dict(self.resources), tuple(self.processes[i] for i in order))

    def __str__(self) -> str:
        lines = [f"res {r} = {c};" for r, c in sorted(self.resources.items())]
        lines += ["proc: " + " ".join(map(str, p)) + ";" for p in self.processes]
        return "\n".join(lines) + "\n"


# Parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[0-9]+)|(?P<sym>[=:;])")


def _tokens(text: str):
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PVError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind:
            yield kind, m.group(), line, pos - line_start + 1
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


def parse_pv(text: str) -> PVProgram:
    """Parse PV source; errors carry line and column."""
    toks = list(_tokens(text))
    i = 0

    def peek():
        return toks[i]

    def expect(kind, value=None):
        nonlocal i
        k, v, ln, col = toks[i]
        if k != kind or (value is not None and v != value):
            want = repr(value) if value is not None else kind
            got = repr(v) if v else "end of input"
            raise PVError(f"expected {want}, got {got}", ln, col)
        i += 1
        return toks[i - 1]

    resources: dict = {}
    procs = []
    declared_at: dict = {}
    while peek()[0] == "word" and peek()[1] == "res":
        expect("word", "res")
        _, name, ln, col = expect("word")
        if name in resources:
            raise PVError(f"resource {name!r} declared twice", ln, col)
        expect("sym", "=")
        k, v, cln, ccol = peek()
        if k != "int":
            raise PVError(f"malformed capacity {v!r}" if v else "missing capacity", cln, ccol)
        expect("int")
        if int(v) < 1:
            raise PVError(f"capacity of {name!r} must be positive", cln, ccol)
        expect("sym", ";")
        resources[name] = int(v)
        declared_at[name] = (ln, col)
    while peek()[0] == "word" and peek()[1] == "proc":
        expect("word", "proc")
        expect("sym", ":")
        actions = []
        held: set = set()
        while peek()[0] == "word":
            _, w, ln, col = expect("word")
            if w not in ("P", "V") and w[0] in "PV":
                op, name = w[0], w[1:]
            elif w in ("P", "V"):
                op = w
                name = expect("word")[1]
            else:
                raise PVError(f"expected an action P<name> or V<name>, got {w!r}", ln, col)
            if name not in resources:
                raise PVError(f"undeclared resource {name!r}", ln, col)
            if op == "P" and name in held:
                raise PVError(f"P{name} while already holding {name}", ln, col)
            if op == "V" and name not in held:
                raise PVError(f"V{name} without holding {name}", ln, col)
            (held.add if op == "P" else held.discard)(name)
            actions.append(Action(op, name))
        expect("sym", ";")
        procs.append(tuple(actions))
    expect("eof")
    return PVProgram(resources, tuple(procs))


# Model ---------------------------------------------------------------------


@dataclass(frozen=True)
class PVModel:
    program: PVProgram
    complex: PrecubicalSet
    init: str
    final: str
    coordinates: dict = field(compare=False)  # vertex name -> position tuple

    @property
    def lengths(self) -> list[int]:
        return self.program.lengths

    def vertex(self, point) -> str:
        return vertex_name(point)

    def allowed(self, point) -> bool:
        return vertex_name(point) in self.coordinates

    def successors(self, v: str) -> list[str]:
        return sorted(self.complex.target(e) for e, _, a in self.complex.cofaces(v) if a == "-" and self.complex.dim(e) == 1)

    def predecessors(self, v: str) -> list[str]:
        return sorted(self.complex.source(e) for e, _, a in self.complex.cofaces(v) if a == "+" and self.complex.dim(e) == 1)

    def forbidden_cells(self) -> list[tuple[int, ...]]:
        """Lower-left corners of removed top-dimensional cells."""
        out = []
        for corner in itertools.product(*(range(L) for L in self.lengths)):
            name = "(" + ",".join(f"{s}:{s + 1}" for s in corner) + ")"
            if name not in self.complex:
                out.append(corner)
        return out


def over_capacity(prog: PVProgram, point) -> list[str]:
    """Resources whose joint usage at a position tuple exceeds capacity."""
    hold = [prog.holdings(k) for k in range(len(prog.processes))]
    return _over(prog, hold, point)


def _over(prog, hold, point) -> list[str]:
    bad = []
    for r, cap in sorted(prog.resources.items()):
        if sum(r in hold[k][j] for k, j in enumerate(point)) > cap:
            bad.append(r)
    return bad


def build_model(prog: PVProgram) -> PVModel:
    """Grid over the action counts with over-capacity cubes removed.

    A cube is kept iff every vertex of it is a joint state within capacity.
    Along one axis an edge from position j to j+1 thus requires the usage
    before and after that action to fit, which is exactly the condition for
    the action to be enabled.
    """
    if not prog.processes:
        raise PVError("program has no processes")
    lengths = prog.lengths
    hold = [prog.holdings(k) for k in range(len(lengths))]
    ok: dict = {}

    def good(point):
        if point not in ok:
            ok[point] = not _over(prog, hold, point)
        return ok[point]

    if not good(tuple(lengths)):
        bad = _over(prog, hold, tuple(lengths))
        raise FinalForbidden(f"final state is over capacity for {', '.join(bad)}: the processes can never all terminate")

    def keep(coords):
        ranges = [(s,) if e == 0 else (s, s + 1) for s, e in coords]
        return all(good(p) for p in itertools.product(*ranges))

    if any(L == 0 for L in lengths):
        raise PVError("every process needs at least one action")
    K = grid_subcomplex(lengths, keep)
    coords = {vertex_name(p): p for p in itertools.product(*(range(L + 1) for L in lengths)) if good(p)}
    return PVModel(prog, K, vertex_name([0] * len(lengths)), vertex_name(lengths), coords)


# Analyses ------------------------------------------------------------------


def _closure(start: str, step) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in step(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def reachable(model: PVModel) -> set:
    return _closure(model.init, model.successors)


def coreachable(model: PVModel) -> set:
    return _closure(model.final, model.predecessors)


def find_deadlocks(model: PVModel) -> set:
    """Reachable vertices other than ``final`` with no outgoing edge."""
    return {v for v in reachable(model) if v != model.final and not model.successors(v)}


def unreachable(model: PVModel) -> set:
    return set(model.coordinates) - reachable(model)


def unsafe_region(model: PVModel) -> set:
    return reachable(model) - coreachable(model)


@dataclass
class AnalysisReport:
    deadlocks: list
    unreachable: list
    unsafe: list
    counts: dict

    def to_dict(self) -> dict:
        return {
            "deadlocks": [list(p) for p in self.deadlocks],
            "unreachable": [list(p) for p in self.unreachable],
            "unsafe": [list(p) for p in self.unsafe],
            "counts": dict(self.counts),
        }

    def to_json(self, version: str | None = None) -> str:
        data = self.to_dict()
        if version is not None:
            data = {"version": version, **data}
        return json.dumps(data, indent=2) + "\n"


def analyze(model: PVModel) -> AnalysisReport:
    co = model.coordinates
    reach = reachable(model)
    back = coreachable(model)
    dead = sorted(co[v] for v in reach if v != model.final and not model.successors(v))
    unreach = sorted(co[v] for v in set(co) - reach)
    unsafe = sorted(co[v] for v in reach - back)
    counts = {
        "processes": len(model.lengths),
        "lengths": list(model.lengths),
        "cubes": model.complex.counts(),
        "forbidden_cells": len(model.forbidden_cells()),
        "reachable": len(reach),
        "deadlocks": len(dead),
        "unreachable": len(unreach),
        "unsafe": len(unsafe),
    }
    return AnalysisReport(dead, unreach, unsafe, counts)


def homology_of_program(
    prog: PVProgram,
    theory: str = "cube",
    degrees=None,
    max_dim: int = 2,
    max_cells: int | None = None,
    allow_truncation: bool = False,
    augmentation: str = "full",
) -> HomologyReport:
    """Homology of the model under one of the theories in ``THEORIES``."""
    if theory not in THEORIES:
        raise HomologyError(f"unknown theory {theory!r}; expected one of {', '.join(THEORIES)}")
    model = build_model(prog)
    if theory == "cube":
        return cubical_homology(model.complex, degrees)
    _, table = realize(model.complex, max_dim, max_cells, allow_truncation)
    return nerve_homology(table, theory, (0, 1) if degrees is None else degrees, augmentation=augmentation)
