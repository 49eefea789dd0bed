"""Free strict ω-categories on simplices, cubes and precubical sets.

A cell is identified with its support: the set of generating faces it
contains, closed under taking subfaces.  Composition is union of supports.
Every cell carries its full boundary table (p-sources and p-targets for
``p < dim``) so that composability is a lookup.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .precubical import PrecubicalSet, SIGNS, one_skeleton_is_acyclic, validate
from .unionfind import UnionFind


class OmegaError(Exception):
    pass


class NotComposable(OmegaError):
    pass


class WellDefinednessError(OmegaError):
    """Two derivations gave the same support but different boundaries."""


class CellLimitError(OmegaError):
    pass


class ContractingError(OmegaError):
    pass


# generator complexes -----------------------------------------------------


def simplex_face_name(x: tuple[int, ...]) -> str:
    if all(v < 10 for v in x):
        return "(" + "".join(map(str, x)) + ")"
    return "(" + ",".join(map(str, x)) + ")"


def simplex_atom_source_target(x: tuple[int, ...]) -> tuple[set, set]:
    """Faces removed at odd (source) or even (target) 1-based positions."""
    if len(x) < 2:
        raise OmegaError("a 0-dimensional face has no source or target")
    src = {x[:k] + x[k + 1 :] for k in range(0, len(x), 2)}
    tgt = {x[:k] + x[k + 1 :] for k in range(1, len(x), 2)}
    return src, tgt


def cube_atom_source_target(word: str) -> tuple[set, set]:
    """The i-th zero replaced by (-)^i for the source, (-)^(i+1) for the target."""
    zeros = [k for k, ch in enumerate(word) if ch == "0"]
    if not zeros:
        raise OmegaError("a 0-dimensional face has no source or target")
    src, tgt = set(), set()
    for i, k in enumerate(zeros, start=1):
        s, t = ("-", "+") if i % 2 else ("+", "-")
        src.add(word[:k] + s + word[k + 1 :])
        tgt.add(word[:k] + t + word[k + 1 :])
    return src, tgt


@dataclass(frozen=True)
class GeneratorComplex:
    """Faces with dimensions, atom sources/targets and subface closures."""

    kind: str
    faces: tuple
    dim: dict
    source: dict
    target: dict
    closure: dict
    name: dict

    @classmethod
    def build(cls, kind: str, faces: Iterable[Hashable], dim, source_target, name):
        faces = list(faces)
        dims = {x: dim(x) for x in faces}
        src, tgt = {}, {}
        for x in faces:
            if dims[x] == 0:
                src[x] = tgt[x] = frozenset()
            else:
                s, t = source_target(x)
                src[x], tgt[x] = frozenset(s), frozenset(t)
        closure: dict = {}
        for x in sorted(faces, key=lambda f: dims[f]):
            r = {x}
            for y in src[x] | tgt[x]:
                r |= closure[y]
            closure[x] = frozenset(r)
        names = {x: name(x) for x in faces}
        ordered = tuple(sorted(faces, key=lambda f: (dims[f], names[f])))
        return cls(kind, ordered, dims, src, tgt, closure, names)

    @property
    def top_dim(self) -> int:
        return max(self.dim.values(), default=-1)

    def R(self, faces: Iterable) -> frozenset:
        out = set()
        for x in faces:
            out |= self.closure[x]
        return frozenset(out)

    def check(self) -> list[str]:
        """Graded strict subface order; atom boundaries one dimension down."""
        problems = []
        for x in self.faces:
            for y in self.source[x] | self.target[x]:
                if self.dim[y] != self.dim[x] - 1 or y not in self.closure[x]:
                    problems.append(f"{self.name[x]}: bad boundary face {self.name[y]}")
            for y in self.closure[x]:
                if y != x and self.dim[y] >= self.dim[x]:
                    problems.append(f"{self.name[x]}: subface {self.name[y]} not lower")
        return problems


def simplex_complex(n: int) -> GeneratorComplex:
    """Faces of the n-simplex as strictly increasing tuples over 0..n."""
    faces = [
        c for k in range(1, n + 2) for c in itertools.combinations(range(n + 1), k)
    ]
    return GeneratorComplex.build(
        "simplex", faces, lambda x: len(x) - 1, simplex_atom_source_target, simplex_face_name
    )


def cube_complex(n: int) -> GeneratorComplex:
    """Faces of the n-cube as words over ``-0+``."""
    faces = ["".join(w) for w in itertools.product("-0+", repeat=n)]
    return GeneratorComplex.build(
        "cube", faces, lambda w: w.count("0"), cube_atom_source_target, lambda w: w
    )


def pi_classes(K: PrecubicalSet) -> UnionFind:
    """Identify ``(∂_i^α x, w)`` with ``(x, w with α inserted at position i)``."""
    uf = UnionFind(key=lambda pair: pair)
    for x in K.all_cubes():
        for w in itertools.product("-0+", repeat=K.dim(x)):
            uf.add((x, "".join(w)))
    for x in K.all_cubes():
        n = K.dim(x)
        for i in range(1, n + 1):
            for a in SIGNS:
                y = K.face(x, i, a)
                for w in itertools.product("-0+", repeat=n - 1):
                    w = "".join(w)
                    uf.union((y, w), (x, w[: i - 1] + a + w[i - 1 :]))
    return uf


def pi_complex(K: PrecubicalSet) -> GeneratorComplex:
    """Generators of the free ω-category on ``K``.

    Each identification class of ``(cube, word)`` pairs holds exactly one
    pair whose word is all zeros; the class is named after that cube.
    """
    uf = pi_classes(K)
    for rep, members in uf.classes().items():
        tops = [(x, w) for x, w in members if w == "0" * len(w)]
        if len(tops) != 1:
            raise OmegaError(f"face class of {rep} has {len(tops)} nondegenerate members")

    def source_target(x):
        n = K.dim(x)
        src = {K.face(x, i, "-" if i % 2 else "+") for i in range(1, n + 1)}
        tgt = {K.face(x, i, "+" if i % 2 else "-") for i in range(1, n + 1)}
        return src, tgt

    return GeneratorComplex.build("pi", K.all_cubes(), K.dim, source_target, str)


# cells ---------------------------------------------------------------------


@dataclass(frozen=True)
class FreeCell:
    support: frozenset
    dim: int
    sources: tuple = ()
    targets: tuple = ()

    def s(self, p: int) -> frozenset:
        return self.sources[p] if p < self.dim else self.support

    def t(self, p: int) -> frozenset:
        return self.targets[p] if p < self.dim else self.support

    def d(self, p: int, sign: str) -> frozenset:
        return self.s(p) if sign == "-" else self.t(p)

    def boundary(self) -> tuple:
        return (self.dim, self.sources, self.targets)


class _Stop(Exception):
    pass


@dataclass(eq=False)
class CellTable:
    """Cells keyed by support, with the nontrivial compositions between them.

    ``max_dim`` is the dimension up to which the table is complete (``None``
    for no bound); ``truncated`` is set when a cell cap stopped generation.
    """

    complex: GeneratorComplex | None = None
    max_dim: int | None = None
    max_cells: int | None = None
    allow_truncation: bool = False
    cells: dict = field(default_factory=dict)
    compositions: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    truncated: bool = False
    face_names: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.complex is not None and not self.face_names:
            self.face_names = dict(self.complex.name)
        self._by_source = defaultdict(lambda: defaultdict(list))
        self._by_target = defaultdict(lambda: defaultdict(list))
        self._queue: deque = deque()
        self._labels: dict = {}
        for c in self.cells.values():
            self._index(c)

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.sorted_cells())

    def __contains__(self, support) -> bool:
        return support in self.cells

    def __getitem__(self, support) -> FreeCell:
        return self.cells[support]

    def __eq__(self, other):
        if not isinstance(other, CellTable):
            return NotImplemented
        return (
            self.cells == other.cells
            and self.compositions == other.compositions
            and self.truncated == other.truncated
            and self.max_dim == other.max_dim
        )

    # naming and ordering

    def face_name(self, face) -> str:
        return self.face_names.get(face, str(face))

    def label(self, support: frozenset) -> str:
        lab = self._labels.get(support)
        if lab is None:
            lab = "{" + ",".join(sorted(self.face_name(f) for f in support)) + "}"
            self._labels[support] = lab
        return lab

    def sort_key(self, support: frozenset):
        return (self.cells[support].dim, len(support), self.label(support))

    def sorted_cells(self) -> list[FreeCell]:
        return [self.cells[s] for s in sorted(self.cells, key=self.sort_key)]

    def of_dim(self, n: int) -> list[FreeCell]:
        return [c for c in self.sorted_cells() if c.dim == n]

    def counts(self) -> list[int]:
        out: list[int] = []
        for c in self.cells.values():
            while len(out) <= c.dim:
                out.append(0)
            out[c.dim] += 1
        return out

    def find(self, names: Iterable[str]) -> FreeCell:
        """Cell whose support has exactly the given face names."""
        wanted = set(names)
        lookup = {self.face_name(f): f for c in self.cells for f in c}
        support = frozenset(lookup[n] for n in wanted) if wanted <= lookup.keys() else None
        if support is None or support not in self.cells:
            raise KeyError(f"no cell with support {sorted(wanted)}")
        return self.cells[support]

    # structure

    def _index(self, c: FreeCell) -> None:
        for p in range(c.dim):
            self._by_source[p][c.s(p)].append(c.support)
            self._by_target[p][c.t(p)].append(c.support)

    def composable(self, a: FreeCell, b: FreeCell, p: int) -> bool:
        return a.t(p) == b.s(p)

    def composite(self, a: frozenset, b: frozenset, p: int) -> frozenset | None:
        """Support of ``a *_p b`` if it is defined and present, else None."""
        ca, cb = self.cells[a], self.cells[b]
        if ca.t(p) != cb.s(p):
            return None
        if ca.dim <= p:
            return b
        if cb.dim <= p:
            return a
        return self.compositions.get((a, b, p))

    def _add(self, cell: FreeCell, witness) -> FreeCell:
        old = self.cells.get(cell.support)
        if old is not None:
            if old.boundary() != cell.boundary():
                raise WellDefinednessError(
                    f"support {self.label(cell.support)} derived with two boundary tables"
                )
            return old
        if self.max_cells is not None and len(self.cells) >= self.max_cells:
            if not self.allow_truncation:
                raise CellLimitError(f"more than {self.max_cells} cells")
            self.truncated = True
            raise _Stop
        self.cells[cell.support] = cell
        self.witness[cell.support] = witness
        self._index(cell)
        self._queue.append(cell.support)
        return cell

    def _compose(self, a: frozenset, b: frozenset, p: int) -> frozenset:
        ca, cb = self.cells[a], self.cells[b]
        if ca.t(p) != cb.s(p):
            raise NotComposable(f"t_{p}({self.label(a)}) != s_{p}({self.label(b)})")
        if ca.dim <= p:
            return b
        if cb.dim <= p:
            return a
        key = (a, b, p)
        done = self.compositions.get(key)
        if done is not None:
            return done
        dim = max(ca.dim, cb.dim)
        sources, targets = [], []
        for m in range(dim):
            if m < p:
                if ca.s(m) != cb.s(m) or ca.t(m) != cb.t(m):
                    raise WellDefinednessError(
                        f"{self.label(a)} *_{p} {self.label(b)}: lower boundaries differ at {m}"
                    )
                sources.append(ca.s(m))
                targets.append(ca.t(m))
            elif m == p:
                sources.append(ca.s(p))
                targets.append(cb.t(p))
            else:
                sources.append(self._compose(ca.s(m), cb.s(m), p))
                targets.append(self._compose(ca.t(m), cb.t(m), p))
        cell = FreeCell(a | b, dim, tuple(sources), tuple(targets))
        result = self._add(cell, ("compose", a, b, p))
        self.compositions[key] = result.support
        return result.support

    def _close(self) -> None:
        while self._queue:
            c = self.cells[self._queue.popleft()]
            for p in range(c.dim):
                for b in list(self._by_source[p].get(c.t(p), ())):
                    self._compose(c.support, b, p)
                for a in list(self._by_target[p].get(c.s(p), ())):
                    self._compose(a, c.support, p)

    def _add_atom(self, x) -> bool:
        G = self.complex
        n = G.dim[x]
        support = G.closure[x]
        if n == 0:
            self._add(FreeCell(support, 0), ("atom", x))
            return True
        src, tgt = G.R(G.source[x]), G.R(G.target[x])
        if src not in self.cells or tgt not in self.cells:
            if self.truncated:
                return False
            raise OmegaError(f"boundary of atom {G.name[x]} is not a generated cell")
        cs, ct = self.cells[src], self.cells[tgt]
        if cs.dim != n - 1 or ct.dim != n - 1:
            raise OmegaError(f"boundary of atom {G.name[x]} has the wrong dimension")
        for m in range(n - 1):
            if cs.s(m) != ct.s(m) or cs.t(m) != ct.t(m):
                raise WellDefinednessError(f"atom {G.name[x]} is not globular at {m}")
        sources = tuple(cs.s(m) for m in range(n - 1)) + (src,)
        targets = tuple(cs.t(m) for m in range(n - 1)) + (tgt,)
        self._add(FreeCell(support, n, sources, targets), ("atom", x))
        return True

    # export

    def cell_hash(self, support: frozenset) -> str:
        return hashlib.sha256(self.label(support).encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        cells = []
        for c in self.sorted_cells():
            cells.append(
                {
                    "hash": self.cell_hash(c.support),
                    "dim": c.dim,
                    "support": sorted(self.face_name(f) for f in c.support),
                    "sources": [self.cell_hash(s) for s in c.sources],
                    "targets": [self.cell_hash(t) for t in c.targets],
                }
            )
        comps = sorted(
            (self.cell_hash(a), self.cell_hash(b), p, self.cell_hash(r))
            for (a, b, p), r in self.compositions.items()
        )
        return {
            "max_dim": self.max_dim,
            "truncated": self.truncated,
            "counts": self.counts(),
            "cells": cells,
            "compositions": [
                {"left": a, "right": b, "p": p, "result": r} for a, b, p, r in comps
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def atoms(G: GeneratorComplex, max_dim: int | None = None) -> CellTable:
    """The atom ``R(x)`` of every face plus the cells its boundaries name.

    Compositions are dropped, so apart from boundary cells the table holds
    one cell per face.
    """
    full = generate_cells(G, max_dim=max_dim)
    keep: set = set()
    frontier = [G.closure[x] for x in G.faces if max_dim is None or G.dim[x] <= max_dim]
    while frontier:
        s = frontier.pop()
        if s in keep:
            continue
        keep.add(s)
        frontier.extend(full.cells[s].sources + full.cells[s].targets)
    out = CellTable(complex=G, max_dim=full.max_dim)
    for s in keep:
        out.cells[s] = full.cells[s]
        out.witness[s] = full.witness[s]
    out.__post_init__()
    return out


def generate_cells(
    G: GeneratorComplex,
    max_dim: int | None = None,
    max_cells: int | None = None,
    allow_truncation: bool = False,
) -> CellTable:
    """Least set of cells containing the atoms and closed under every ``*_p``.

    Built dimension by dimension: atoms of dimension d need the composites
    of dimension d-1 that form their boundaries.
    """
    top = G.top_dim if max_dim is None else min(max_dim, G.top_dim)
    complete = max_dim is None or max_dim >= G.top_dim
    table = CellTable(
        complex=G,
        max_dim=None if complete else max_dim,
        max_cells=max_cells,
        allow_truncation=allow_truncation,
    )
    try:
        for d in range(top + 1):
            for x in G.faces:
                if G.dim[x] == d:
                    table._add_atom(x)
            table._close()
    except _Stop:
        table._queue.clear()
    return table


def compose(table: CellTable, a: FreeCell, b: FreeCell, p: int) -> FreeCell:
    """``a *_p b``; the result is added to the table if new."""
    if a.t(p) != b.s(p):
        raise NotComposable(f"t_{p} of the left factor is not s_{p} of the right factor")
    try:
        support = table._compose(a.support, b.support, p)
        table._close()
    except _Stop:
        table._queue.clear()
        raise CellLimitError("cell cap reached while composing") from None
    return table.cells[support]


def is_noncontracting_check(table: CellTable) -> bool:
    """Every cell of positive dimension has 1-dimensional 1-source and 1-target."""
    for c in table.cells.values():
        if c.dim >= 2:
            if table.cells[c.s(1)].dim != 1 or table.cells[c.t(1)].dim != 1:
                return False
    return True


def realize(
    K: PrecubicalSet,
    max_dim: int | None = 2,
    max_cells: int | None = None,
    allow_truncation: bool = False,
) -> tuple[GeneratorComplex, CellTable]:
    """Free ω-category on a precubical set with an acyclic 1-skeleton."""
    problems = validate(K)
    if problems:
        raise OmegaError(f"invalid precubical set: {problems[0]}")
    if not one_skeleton_is_acyclic(K):
        raise OmegaError("1-skeleton has a directed cycle")
    G = pi_complex(K)
    return G, generate_cells(G, max_dim, max_cells, allow_truncation)


# Globe and path ω-category -------------------------------------------------


def _fresh_point(table: CellTable, base: str) -> frozenset:
    used = {table.face_name(f) for s in table.cells for f in s}
    name = base
    k = 0
    while name in used:
        k += 1
        name = f"{base}{k}"
    return frozenset({name})


def glob(inner: CellTable) -> CellTable:
    """Two fresh 0-cells with every cell of ``inner`` raised between them."""
    iota, sigma = _fresh_point(inner, "ι"), _fresh_point(inner, "σ")
    out = CellTable(
        max_dim=None if inner.max_dim is None else inner.max_dim + 1,
        truncated=inner.truncated,
        face_names=dict(inner.face_names),
    )
    out.cells[iota] = FreeCell(iota, 0)
    out.cells[sigma] = FreeCell(sigma, 0)
    out.witness[iota] = ("glob", "source")
    out.witness[sigma] = ("glob", "target")
    for c in inner.cells.values():
        out.cells[c.support] = FreeCell(
            c.support, c.dim + 1, (iota,) + c.sources, (sigma,) + c.targets
        )
        out.witness[c.support] = ("glob", inner.witness.get(c.support))
    for (a, b, p), r in inner.compositions.items():
        out.compositions[(a, b, p + 1)] = r
    out.__post_init__()
    return out


def path_part(table: CellTable) -> CellTable:
    """Cells of positive dimension with every index lowered by one."""
    if not is_noncontracting_check(table):
        raise ContractingError("path part needs a non-contracting table")
    out = CellTable(
        max_dim=None if table.max_dim is None else table.max_dim - 1,
        truncated=table.truncated,
        face_names=dict(table.face_names),
    )
    for c in table.cells.values():
        if c.dim >= 1:
            out.cells[c.support] = FreeCell(c.support, c.dim - 1, c.sources[1:], c.targets[1:])
            out.witness[c.support] = table.witness.get(c.support)
    for (a, b, p), r in table.compositions.items():
        if p >= 1:
            out.compositions[(a, b, p - 1)] = r
    out.__post_init__()
    return out


def table_from_cells(
    cells: Iterable[FreeCell], compositions: dict | None = None, max_dim: int | None = None
) -> CellTable:
    """Table assembled from explicit cells, e.g. for hand-built examples."""
    out = CellTable(max_dim=max_dim)
    for c in cells:
        out.cells[c.support] = c
        out.witness[c.support] = ("given",)
    out.compositions.update(compositions or {})
    out.__post_init__()
    return out


# axiom checks ---------------------------------------------------------------


def check_axioms(table: CellTable) -> list[str]:
    """Failures of the ω-category axioms on everything defined in the table."""
    bad: list[str] = []
    cells = table.cells
    L = table.label

    # globularity: d_m^β d_n^α x = d_m^β x if m < n, else d_n^α x
    for x in cells.values():
        for n in range(x.dim + 1):
            for m in range(x.dim + 1):
                for a in SIGNS:
                    for b in SIGNS:
                        inner = cells[x.d(n, a)]
                        want = x.d(m, b) if m < n else x.d(n, a)
                        if inner.d(m, b) != want:
                            bad.append(f"axiom 1: {L(x.support)} m={m} n={n} {a}{b}")

    # units
    for x in cells.values():
        for n in range(x.dim):
            for side in (x.s(n), x.t(n)):
                # generated cells contain their boundaries; glob tables do not
                outside = table.complex is not None and not side <= x.support
                if outside or cells[side].dim > n:
                    bad.append(f"axiom 2: {L(x.support)} n={n}")
            if table.composite(x.s(n), x.support, n) != x.support:
                bad.append(f"axiom 2: s_{n} x *_{n} x != x for {L(x.support)}")
            if table.composite(x.support, x.t(n), n) != x.support:
                bad.append(f"axiom 2: x *_{n} t_{n} x != x for {L(x.support)}")

    # boundaries of composites
    for (a, b, p), r in table.compositions.items():
        ca, cb, cr = cells[a], cells[b], cells[r]
        if r != a | b:
            bad.append(f"composite support: {L(a)} *_{p} {L(b)}")
        if cr.s(p) != ca.s(p) or cr.t(p) != cb.t(p):
            bad.append(f"axiom 3: ends of {L(a)} *_{p} {L(b)}")
        for m in range(cr.dim):
            if m == p:
                continue
            for sign in SIGNS:
                expect = table.composite(ca.d(m, sign), cb.d(m, sign), p)
                if expect != cr.d(m, sign):
                    bad.append(f"axiom 3: d_{m}^{sign} of {L(a)} *_{p} {L(b)}")

    # associativity
    for (x, y, p), xy in table.compositions.items():
        for z in table._by_source[p].get(cells[xy].t(p), ()):
            left = table.composite(xy, z, p)
            yz = table.composite(y, z, p)
            right = table.composite(x, yz, p) if yz is not None else None
            if left is not None and right is not None and left != right:
                bad.append(f"axiom 4: {L(x)} {L(y)} {L(z)} at {p}")

    # interchange
    decomp: dict = defaultdict(lambda: defaultdict(list))
    for (x, y, n), r in table.compositions.items():
        decomp[n][r].append((x, y))
    for (A, B, m), lhs in table.compositions.items():
        top = max(cells[A].dim, cells[B].dim)
        for n in range(top):
            if n == m:
                continue
            left_splits = decomp[n].get(A, []) + [(cells[A].s(n), A), (A, cells[A].t(n))]
            right_splits = decomp[n].get(B, []) + [(cells[B].s(n), B), (B, cells[B].t(n))]
            for x, y in left_splits:
                for z, w in right_splits:
                    xz = table.composite(x, z, m)
                    yw = table.composite(y, w, m)
                    if xz is None or yw is None:
                        continue
                    rhs = table.composite(xz, yw, n)
                    if rhs is not None and rhs != lhs:
                        bad.append(f"axiom 5: {L(A)} *_{m} {L(B)} via *_{n}")
    return bad
