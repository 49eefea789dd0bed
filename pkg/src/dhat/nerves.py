"""Globular, branching and merging nerves truncated at simplicial level 1.

Orientation follows the generator rules of ``freeomega``: the 1-simplex
``(01)`` runs from ``(1)`` to ``(0)``, so for a level-1 simplex ``u`` the
face ``∂_0 u`` is its source and ``∂_1 u`` its target.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .freeomega import CellTable, ContractingError, is_noncontracting_check, path_part
from .precubical import SIGNS
from .unionfind import UnionFind


class NerveError(Exception):
    pass


class MissingComposite(NerveError):
    pass


@dataclass
class AugmentedSimplicialSet:
    """Levels ``-1..N`` of an augmented simplicial set.

    Simplex ids are strings, unique within a level.  ``faces[(n, i)]`` maps
    ``X_n -> X_{n-1}`` for ``n >= 1``; ``degeneracies[(n, i)]`` maps
    ``X_n -> X_{n+1}``; ``augmentation`` maps ``X_0 -> X_{-1}``.
    """

    levels: dict
    faces: dict = field(default_factory=dict)
    degeneracies: dict = field(default_factory=dict)
    augmentation: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)
    endpoints: dict = field(default_factory=dict)
    truncated: bool = False
    quotient: object = None

    @property
    def top(self) -> int:
        return max(self.levels)

    def cardinalities(self) -> dict:
        return {n: len(xs) for n, xs in sorted(self.levels.items())}

    def degenerate(self, n: int) -> set:
        out = set()
        for (m, _), eps in self.degeneracies.items():
            if m == n - 1:
                out |= set(eps.values())
        return out

    def face(self, n: int, i: int, x: str) -> str:
        if n == 0 and i == -1:
            return self.augmentation[x]
        return self.faces[(n, i)][x]

    def check_identities(self) -> list[str]:
        """Simplicial identities wherever both sides lie inside the truncation."""
        bad = []
        N = self.top
        for x in self.levels.get(1, ()):
            if self.augmentation[self.face(1, 0, x)] != self.augmentation[self.face(1, 1, x)]:
                bad.append(f"augmentation identity fails on {x}")
        for n in range(2, N + 1):
            for x in self.levels[n]:
                for j in range(n + 1):
                    for i in range(j):
                        if self.face(n - 1, i, self.face(n, j, x)) != self.face(
                            n - 1, j - 1, self.face(n, i, x)
                        ):
                            bad.append(f"∂{i}∂{j} identity fails on {x}")
        for n in range(0, N - 1):
            for x in self.levels[n]:
                for j in range(n + 1):
                    for i in range(j + 1):
                        a = self.degeneracies[(n + 1, i)][self.degeneracies[(n, j)][x]]
                        b = self.degeneracies[(n + 1, j + 1)][self.degeneracies[(n, i)][x]]
                        if a != b:
                            bad.append(f"ε{i}ε{j} identity fails on {x}")
        for n in range(0, N):
            for x in self.levels[n]:
                for j in range(n + 1):
                    y = self.degeneracies[(n, j)][x]
                    for i in range(n + 2):
                        got = self.face(n + 1, i, y)
                        if i in (j, j + 1):
                            want = x
                        elif i < j:
                            want = self.degeneracies[(n - 1, j - 1)][self.face(n, i, x)]
                        else:
                            want = self.degeneracies[(n - 1, j)][self.face(n, i - 1, x)]
                        if got != want:
                            bad.append(f"∂{i}ε{j} identity fails on {x}")
        for (n, i), f in self.faces.items():
            for x, y in f.items():
                if y not in self.levels[n - 1]:
                    bad.append(f"face ∂{i} of {x} leaves level {n - 1}")
        for x, y in self.augmentation.items():
            if y not in self.levels[-1]:
                bad.append(f"augmentation of {x} is not in level -1")
        return bad

    def same_structure(self, other: "AugmentedSimplicialSet") -> bool:
        def norm(X):
            return (
                {n: sorted(xs) for n, xs in X.levels.items()},
                X.faces,
                X.degeneracies,
                X.augmentation,
            )

        return norm(self) == norm(other)

    def to_dict(self) -> dict:
        return {
            "truncated": self.truncated,
            "levels": {str(n): sorted(xs) for n, xs in sorted(self.levels.items())},
            "faces": [
                {"level": n, "i": i, "simplex": x, "face": y}
                for (n, i), f in sorted(self.faces.items())
                for x, y in sorted(f.items())
            ],
            "degeneracies": [
                {"level": n, "i": i, "simplex": x, "image": y}
                for (n, i), f in sorted(self.degeneracies.items())
                for x, y in sorted(f.items())
            ],
            "augmentation": [
                {"simplex": x, "image": y} for x, y in sorted(self.augmentation.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def pair_id(table: CellTable, a: frozenset, b: frozenset) -> str:
    return f"({table.label(a)},{table.label(b)})"


def _check_truncation(table: CellTable, N: int) -> None:
    if N not in (0, 1):
        raise NerveError("nerves are computed at truncation level 0 or 1")
    if not is_noncontracting_check(table):
        raise ContractingError("nerves need a non-contracting table")
    if table.max_dim is not None and table.max_dim < N + 1:
        raise NerveError(f"level {N} needs cells up to dimension {N + 1}")


def _augmentation_points(table: CellTable, mode: str, realized) -> list:
    if mode == "full":
        return None
    if mode == "realized":
        return sorted(set(realized))
    raise NerveError(f"unknown augmentation mode {mode!r}")


def globular_nerve(table: CellTable, N: int = 1, augmentation: str = "full") -> AugmentedSimplicialSet:
    """Levels -1..N of the nerve of the path ω-category.

    ``augmentation="full"`` puts every pair of 0-cells in level -1;
    ``"realized"`` keeps only the pairs ``(s_0 x, t_0 x)`` of 1-cells.
    """
    _check_truncation(table, N)
    L = table.label
    points = [c.support for c in table.of_dim(0)]
    ones = [c for c in table.sorted_cells() if c.dim == 1]
    low = [c for c in table.sorted_cells() if c.dim in (1, 2)]

    realized = [pair_id(table, c.s(0), c.t(0)) for c in ones]
    chosen = _augmentation_points(table, augmentation, realized)
    if chosen is None:
        chosen = [pair_id(table, a, b) for a in points for b in points]
    X = AugmentedSimplicialSet(levels={-1: sorted(chosen)}, truncated=table.truncated)
    keep = set(X.levels[-1])
    for a in points:
        for b in points:
            pid = pair_id(table, a, b)
            if pid in keep:
                X.payload[(-1, pid)] = (a, b)
                X.endpoints[(-1, pid)] = (L(a), L(b))

    X.levels[0] = [L(c.support) for c in ones]
    for c in ones:
        X.augmentation[L(c.support)] = pair_id(table, c.s(0), c.t(0))
        X.payload[(0, L(c.support))] = c.support
        X.endpoints[(0, L(c.support))] = (L(c.s(0)), L(c.t(0)))
    if N >= 1:
        X.levels[1] = [L(c.support) for c in low]
        X.faces[(1, 0)] = {L(c.support): L(c.s(1)) for c in low}
        X.faces[(1, 1)] = {L(c.support): L(c.t(1)) for c in low}
        X.degeneracies[(0, 0)] = {x: x for x in X.levels[0]}
        for c in low:
            X.payload[(1, L(c.support))] = c.support
            X.endpoints[(1, L(c.support))] = (L(c.s(0)), L(c.t(0)))
    for n in X.levels:
        X.levels[n] = sorted(X.levels[n])
    return X


@dataclass
class QuotientTable:
    """Congruence classes of path cells generated by one of R⁻ / R⁺."""

    table: CellTable
    path: CellTable
    sign: str
    rep: dict
    classes: dict
    generators: list
    truncated: bool

    def cls(self, support: frozenset) -> frozenset:
        return self.rep[support]

    def class_dim(self, rep: frozenset) -> int:
        return self.path.cells[rep].dim

    def labelled_classes(self) -> list[list[str]]:
        L = self.table.label
        return sorted(sorted(L(s) for s in members) for members in self.classes.values())


def semi_quotient(table: CellTable, sign: str) -> QuotientTable:
    """Finest congruence on path cells identifying a path with its extensions.

    ``sign="-"`` identifies ``x`` with ``x *_0 y`` (same beginning),
    ``sign="+"`` identifies ``y`` with ``x *_0 y`` (same end).  The relation
    is closed under the path sources/targets and compositions, identity
    compositions included.
    """
    if sign not in SIGNS:
        raise NerveError(f"bad sign {sign!r}")
    P = path_part(table)
    uf = UnionFind(P.cells)
    generators = []
    for (x, y, p), r in sorted(table.compositions.items(), key=lambda kv: table.label(kv[1])):
        if p == 0:
            pair = (x, r) if sign == "-" else (y, r)
            generators.append(pair)
            uf.union(*pair)

    top = max((c.dim for c in P.cells.values()), default=0)
    records = [(a, b, p, r) for (a, b, p), r in P.compositions.items()]
    for c in P.cells.values():
        for p in range(top + 1):
            records.append((c.s(p), c.support, p, c.support))
            records.append((c.support, c.t(p), p, c.support))

    changed = True
    while changed:
        changed = False
        bucket: dict = {}
        for c in P.cells.values():
            for p in range(top + 1):
                for sg in SIGNS:
                    key = (uf.find(c.support), p, sg)
                    d = c.d(p, sg)
                    if key in bucket:
                        changed |= uf.union(bucket[key], d)
                    else:
                        bucket[key] = d
        bucket = {}
        for a, b, p, r in records:
            key = (uf.find(a), uf.find(b), p)
            if key in bucket:
                changed |= uf.union(bucket[key], r)
            else:
                bucket[key] = r

    groups: dict = defaultdict(list)
    for s in P.cells:
        groups[uf.find(s)].append(s)
    rep, classes = {}, {}
    for members in groups.values():
        members.sort(key=lambda s: (P.cells[s].dim, table.label(s)))
        classes[members[0]] = members
        for s in members:
            rep[s] = members[0]
    return QuotientTable(table, P, sign, rep, classes, generators, table.truncated)


def _semi_nerve(table: CellTable, sign: str, N: int, augmentation: str) -> AugmentedSimplicialSet:
    _check_truncation(table, N)
    Q = semi_quotient(table, sign)
    P, L = Q.path, table.label
    end = (lambda c: c.s(0)) if sign == "-" else (lambda c: c.t(0))

    level0, level1 = [], []
    aug: dict = {}
    for rep, members in Q.classes.items():
        low = [s for s in members if P.cells[s].dim <= 1]
        if not low:
            continue
        cid = L(rep)
        ends = {end(table.cells[s]) for s in members}
        if len(ends) != 1:
            raise NerveError(f"augmentation is not constant on the class of {cid}")
        level1.append(rep)
        if P.cells[rep].dim == 0:
            level0.append(rep)
            aug[cid] = L(ends.pop())

    points = [c.support for c in table.of_dim(0)]
    chosen = _augmentation_points(table, augmentation, aug.values())
    X = AugmentedSimplicialSet(
        levels={-1: sorted(chosen if chosen is not None else [L(a) for a in points])},
        truncated=table.truncated,
    )
    keep = set(X.levels[-1])
    for a in points:
        if L(a) in keep:
            X.payload[(-1, L(a))] = a
    X.levels[0] = sorted(L(r) for r in level0)
    X.augmentation = aug
    for r in level0:
        X.payload[(0, L(r))] = Q.classes[r]
    if N >= 1:
        X.levels[1] = sorted(L(r) for r in level1)
        X.faces[(1, 0)], X.faces[(1, 1)] = {}, {}
        for r in level1:
            for i, pick in ((0, "-"), (1, "+")):
                images = {
                    L(Q.rep[P.cells[s].d(0, pick)])
                    for s in Q.classes[r]
                    if P.cells[s].dim <= 1
                }
                if len(images) != 1:
                    raise NerveError(f"face {i} is not constant on the class of {L(r)}")
                X.faces[(1, i)][L(r)] = images.pop()
            X.payload[(1, L(r))] = Q.classes[r]
        X.degeneracies[(0, 0)] = {x: x for x in X.levels[0]}
    X.quotient = Q
    return X


def branching_nerve(table: CellTable, N: int = 1, augmentation: str = "full") -> AugmentedSimplicialSet:
    """Negative semi-globular nerve: level -1 holds 0-cells, augmentation is s_0."""
    return _semi_nerve(table, "-", N, augmentation)


def merging_nerve(table: CellTable, N: int = 1, augmentation: str = "full") -> AugmentedSimplicialSet:
    """Positive semi-globular nerve: level -1 holds 0-cells, augmentation is t_0."""
    return _semi_nerve(table, "+", N, augmentation)


def h_maps(table: CellTable, N: int = 1) -> tuple[dict, dict]:
    """Quotient maps from the globular nerve to the branching and merging nerves.

    Each map sends ``(level, simplex id)`` to the id of its class, for
    levels ``0..N``.
    """
    _check_truncation(table, N)
    out = []
    for sign in SIGNS:
        Q = semi_quotient(table, sign)
        L = table.label
        h = {}
        for c in table.sorted_cells():
            if c.dim == 1:
                h[(0, L(c.support))] = L(Q.rep[c.support])
            if N >= 1 and c.dim in (1, 2):
                h[(1, L(c.support))] = L(Q.rep[c.support])
        out.append(h)
    return out[0], out[1]


def check_simplicial_map(h: dict, X: AugmentedSimplicialSet, Y: AugmentedSimplicialSet) -> list[str]:
    """Where ``h`` fails to commute with faces and degeneracies at levels >= 0."""
    bad = []
    for (n, i), f in X.faces.items():
        for x, y in f.items():
            if h[(n - 1, y)] != Y.faces[(n, i)][h[(n, x)]]:
                bad.append(f"h does not commute with ∂{i} at {x}")
    for (n, i), f in X.degeneracies.items():
        for x, y in f.items():
            if h[(n + 1, y)] != Y.degeneracies[(n, i)][h[(n, x)]]:
                bad.append(f"h does not commute with ε{i} at {x}")
    for n, xs in X.levels.items():
        if n < 0:
            continue
        image = {h[(n, x)] for x in xs}
        if image != set(Y.levels[n]):
            bad.append(f"h is not surjective at level {n}")
    return bad


# grading ---------------------------------------------------------------------


def grade(X: AugmentedSimplicialSet) -> dict:
    """Split a globular nerve by the endpoint pair ``(S(x), T(x))``.

    Returns one component per element of level -1.
    """
    parts: dict = {}
    for pid in X.levels[-1]:
        parts[pid] = AugmentedSimplicialSet(
            levels={n: [] for n in X.levels},
            faces={key: {} for key in X.faces},
            degeneracies={key: {} for key in X.degeneracies},
            truncated=X.truncated,
        )
        parts[pid].levels[-1] = [pid]
    owner = {}
    for n, xs in X.levels.items():
        if n < 0:
            continue
        for x in xs:
            pid = X.augmentation[x] if n == 0 else None
            if pid is None:
                s, t = X.endpoints[(n, x)]
                pid = f"({s},{t})"
            if pid not in parts:
                raise NerveError(f"simplex {x} has endpoints {pid} outside level -1")
            parts[pid].levels[n].append(x)
            owner[(n, x)] = pid
    for (n, i), f in X.faces.items():
        for x, y in f.items():
            parts[owner[(n, x)]].faces[(n, i)][x] = y
    for (n, i), f in X.degeneracies.items():
        for x, y in f.items():
            parts[owner[(n, x)]].degeneracies[(n, i)][x] = y
    for x, y in X.augmentation.items():
        parts[owner[(0, x)]].augmentation[x] = y
    for key, value in X.payload.items():
        n, x = key
        pid = x if n == -1 else owner[key]
        parts[pid].payload[key] = value
    for key, value in X.endpoints.items():
        n, x = key
        pid = x if n == -1 else owner[key]
        parts[pid].endpoints[key] = value
    for part in parts.values():
        for n in part.levels:
            part.levels[n].sort()
    return parts


def reassemble(parts: dict) -> AugmentedSimplicialSet:
    """Disjoint union of graded components."""
    out = None
    for part in parts.values():
        if out is None:
            out = AugmentedSimplicialSet(levels={n: [] for n in part.levels})
        for n, xs in part.levels.items():
            out.levels[n].extend(xs)
        for key, f in part.faces.items():
            out.faces.setdefault(key, {}).update(f)
        for key, f in part.degeneracies.items():
            out.degeneracies.setdefault(key, {}).update(f)
        out.augmentation.update(part.augmentation)
        out.payload.update(part.payload)
        out.endpoints.update(part.endpoints)
        out.truncated = out.truncated or part.truncated
    for n in out.levels:
        out.levels[n].sort()
    return out


# composition of simplices ----------------------------------------------------


@dataclass(frozen=True)
class NerveSimplex:
    """A simplex of the globular nerve at level -1, 0 or 1.

    At level -1 the payload is a pair of 0-cell supports; otherwise it is the
    support of a cell of dimension ``level``-or-less of the path table.
    """

    level: int
    payload: object


@dataclass(frozen=True)
class ConstantSimplex:
    """The constant map onto a 0-cell, the unit for ``simplex_compose``."""

    level: int
    point: frozenset


def endpoints(table: CellTable, x) -> tuple[frozenset, frozenset]:
    if isinstance(x, ConstantSimplex):
        return x.point, x.point
    if x.level == -1:
        return x.payload
    c = table.cells[x.payload]
    return c.s(0), c.t(0)


def simplex_face(table: CellTable, x: NerveSimplex, i: int) -> NerveSimplex:
    if x.level == 0 and i == -1:
        return NerveSimplex(-1, endpoints(table, x))
    if x.level != 1 or i not in (0, 1):
        raise NerveError(f"no face {i} at level {x.level}")
    c = table.cells[x.payload]
    return NerveSimplex(0, c.s(1) if i == 0 else c.t(1))


def simplex_compose(table: CellTable, x, y):
    """Pointwise ``*_0`` of two simplices of the same level with T(x) = S(y)."""
    if x.level != y.level:
        raise NerveError("simplices of different levels")
    if endpoints(table, x)[1] != endpoints(table, y)[0]:
        raise NerveError("T(x) differs from S(y)")
    if isinstance(y, ConstantSimplex):
        return x
    if isinstance(x, ConstantSimplex):
        return y
    if x.level == -1:
        return NerveSimplex(-1, (x.payload[0], y.payload[1]))
    if x.level > 1:
        raise NerveError("simplices above level 1 are not represented")
    r = table.composite(x.payload, y.payload, 0)
    if r is None:
        raise MissingComposite(
            f"{table.label(x.payload)} *_0 {table.label(y.payload)} is not in the table"
        )
    if table.cells[r].dim == 0:
        return ConstantSimplex(x.level, r)
    return NerveSimplex(x.level, r)
