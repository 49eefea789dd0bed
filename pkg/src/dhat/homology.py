"""Integer chain complexes, Smith normal form and homology groups."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .freeomega import CellTable
from .nerves import AugmentedSimplicialSet, branching_nerve, globular_nerve, merging_nerve
from .precubical import PrecubicalSet, SIGNS


class HomologyError(Exception):
    pass


Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix, inner: int | None = None) -> Matrix:
    if inner is None:
        inner = len(B)
    cols = len(B[0]) if B else 0
    return [
        [sum(row[k] * B[k][j] for k in range(inner)) for j in range(cols)] for row in A
    ]


def determinant(M: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [row[:] for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


class SmithDecomposition(NamedTuple):
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: Matrix
    D: Matrix
    V: Matrix

    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]


def smith_normal_form(M: Matrix, ncols: int | None = None) -> SmithDecomposition:
    """Smith normal form with transforms, in exact integer arithmetic.

    The pivot is always the entry of least absolute value in the remaining
    block, ties broken row-major.  ``ncols`` gives the width of a matrix
    with no rows.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if A else (ncols or 0)
    U, V = identity(m), identity(n)

    def pick(t):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        return best
        return best

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for R in (A, V):
            for row in R:
                row[j], row[k] = row[k], row[j]

    def add_row(src, dst, q):  # row dst -= q * row src
        for R in (A, U):
            rs, rd = R[src], R[dst]
            for j in range(len(rd)):
                if rs[j]:
                    rd[j] -= q * rs[j]

    def add_col(src, dst, q):  # col dst -= q * col src
        for R in (A, V):
            for row in R:
                if row[src]:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = pick(t)
        if best is None:
            break
        while True:
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, A[i][t] // p)
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, A[t][j] // p)
            rest = [
                (abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]
            ] + [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                best = min(rest, key=lambda b: (b[0], b[1], b[2]))
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, -1)
            best = (abs(p), t, t)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return SmithDecomposition(U, A, V)


def is_smith_form(D: Matrix) -> bool:
    diag = []
    for i, row in enumerate(D):
        for j, v in enumerate(row):
            if i != j and v:
                return False
            if i == j:
                diag.append(v)
    if any(v < 0 for v in diag):
        return False
    nonzero = [v for v in diag if v]
    if diag[: len(nonzero)] != nonzero:
        return False
    return all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


def elementary_divisors(entries: dict, nrows: int, ncols: int) -> list[int]:
    """Nonzero Smith diagonal of a sparse matrix ``{(row, col): value}``.

    Unit pivots are eliminated sparsely first; whatever remains goes through
    the dense Smith normal form.
    """
    cols: dict[int, dict[int, int]] = {}
    rows: dict[int, set[int]] = {}
    for (r, c), v in entries.items():
        if v:
            cols.setdefault(c, {})[r] = v
            rows.setdefault(r, set()).add(c)
    units = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda c: (len(cols[c]), c)):
            if c not in cols:
                continue
            unit_rows = [r for r, v in cols[c].items() if abs(v) == 1]
            if not unit_rows:
                continue
            r = min(unit_rows, key=lambda r: (len(rows[r]), r))
            _eliminate_unit(cols, rows, r, c)
            units += 1
            progress = True
    left_rows = sorted({r for col in cols.values() for r in col})
    left_cols = sorted(cols)
    if not left_rows:
        return [1] * units
    ri = {r: k for k, r in enumerate(left_rows)}
    dense = [[0] * len(left_cols) for _ in left_rows]
    for k, c in enumerate(left_cols):
        for r, v in cols[c].items():
            dense[ri[r]][k] = v
    snf = smith_normal_form(dense)
    return [1] * units + [d for d in snf.diagonal() if d]


def _eliminate_unit(cols: dict, rows: dict, r: int, c: int) -> None:
    """Clear row ``r`` by column operations against the unit entry at (r, c).

    Afterwards row ``r`` and column ``c`` are dropped; the row operations
    that would clear the rest of column ``c`` touch nothing else.
    """
    p = cols[c][r]
    pcol = cols.pop(c)
    for other in sorted(rows[r] - {c}):
        col = cols[other]
        q = col[r] * p  # p is a unit, so this is col[r] / p
        for rr, v in pcol.items():
            nv = col.get(rr, 0) - q * v
            if nv:
                if rr not in col:
                    rows[rr].add(other)
                col[rr] = nv
            elif rr in col:
                del col[rr]
                rows[rr].discard(other)
        if not col:
            del cols[other]
    for rr in pcol:
        rows[rr].discard(c)
    del rows[r]


@dataclass
class ChainComplex:
    """Free abelian groups on labelled bases with sparse boundary maps.

    ``boundaries[n]`` maps degree ``n`` to degree ``n-1`` as
    ``{(row, col): value}`` with rows indexing ``bases[n-1]``.
    """

    bases: dict
    boundaries: dict = field(default_factory=dict)
    truncated: bool = False

    @property
    def degrees(self) -> list[int]:
        return sorted(self.bases)

    def size(self, n: int) -> int:
        return len(self.bases.get(n, ()))

    def dense(self, n: int) -> Matrix:
        M = [[0] * self.size(n) for _ in range(self.size(n - 1))]
        for (r, c), v in self.boundaries.get(n, {}).items():
            M[r][c] = v
        return M

    def check(self) -> list[str]:
        """Shape errors and nonzero composites ``d_{n-1} d_n``."""
        bad = []
        for n, d in self.boundaries.items():
            for r, c in d:
                if not (0 <= r < self.size(n - 1) and 0 <= c < self.size(n)):
                    bad.append(f"entry ({r},{c}) of d_{n} out of shape")
        for n in self.degrees:
            lower = self.boundaries.get(n - 1, {})
            upper = self.boundaries.get(n, {})
            if not lower or not upper:
                continue
            by_row: dict = {}
            for (r, c), v in lower.items():
                by_row.setdefault(c, []).append((r, v))
            prod: dict = {}
            for (k, c), v in upper.items():
                for r, w in by_row.get(k, ()):
                    prod[(r, c)] = prod.get((r, c), 0) + w * v
            if any(prod.values()):
                bad.append(f"d_{n - 1} d_{n} != 0")
        return bad

    def rank(self, n: int) -> int:
        return len(elementary_divisors(self.boundaries.get(n, {}), self.size(n - 1), self.size(n)))

    def to_sparse(self) -> str:
        lines = []
        for n in sorted(self.boundaries):
            for (r, c), v in sorted(self.boundaries[n].items()):
                if v:
                    lines.append(f"{n} {r} {c} {v}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class HomologyGroup:
    betti: int
    torsion: tuple = ()

    def __str__(self):
        parts = ["Z"] * (self.betti == 1) + ([f"Z^{self.betti}"] if self.betti > 1 else [])
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self, degree: int) -> dict:
        return {"degree": degree, "betti": self.betti, "torsion": list(self.torsion)}


def homology(C: ChainComplex, n: int) -> HomologyGroup:
    """``ker d_n / im d_{n+1}`` as a Betti number and torsion coefficients."""
    if n not in C.bases:
        raise HomologyError(f"degree {n} outside {C.degrees}")
    problems = C.check()
    if problems:
        raise HomologyError(problems[0])
    out_rank = C.rank(n) if n - 1 in C.bases else 0
    divisors = (
        elementary_divisors(C.boundaries.get(n + 1, {}), C.size(n), C.size(n + 1))
        if n + 1 in C.bases
        else []
    )
    betti = C.size(n) - out_rank - len(divisors)
    return HomologyGroup(betti, tuple(d for d in divisors if d > 1))


def chain_from_augmented(X: AugmentedSimplicialSet, normalized: bool = False) -> ChainComplex:
    """Alternating face sums, with the augmentation as the degree-0 boundary.

    Degenerate simplices stay in the basis unless ``normalized``.
    """
    bases = {}
    for n, xs in sorted(X.levels.items()):
        xs = sorted(xs)
        if normalized and n >= 1:
            degenerate = X.degenerate(n)
            xs = [x for x in xs if x not in degenerate]
        bases[n] = xs
    index = {n: {x: k for k, x in enumerate(xs)} for n, xs in bases.items()}
    C = ChainComplex(bases, truncated=X.truncated)
    if 0 in bases:
        C.boundaries[0] = {
            (index[-1][X.augmentation[x]], c): 1 for c, x in enumerate(bases[0])
        }
    for n in range(1, X.top + 1):
        d: dict = {}
        for c, x in enumerate(bases[n]):
            for i in range(n + 1):
                y = X.faces[(n, i)][x]
                if y not in index[n - 1]:
                    continue
                key = (index[n - 1][y], c)
                d[key] = d.get(key, 0) + (-1) ** i
        C.boundaries[n] = {k: v for k, v in d.items() if v}
    return C


def chain_from_precubical(K: PrecubicalSet) -> ChainComplex:
    """Cubical chains with ``d = Σ_i (-1)^i (∂_i^- - ∂_i^+)``."""
    bases = {n: list(names) for n, names in enumerate(K.cubes)}
    if not bases:
        bases = {0: []}
    index = {n: {x: k for k, x in enumerate(xs)} for n, xs in bases.items()}
    C = ChainComplex(bases)
    for n in range(1, len(K.cubes)):
        d: dict = {}
        for c, x in enumerate(bases[n]):
            for i in range(1, n + 1):
                for a, sgn in zip(SIGNS, (1, -1)):
                    key = (index[n - 1][K.face(x, i, a)], c)
                    d[key] = d.get(key, 0) + (-1) ** i * sgn
        C.boundaries[n] = {k: v for k, v in d.items() if v}
    return C


THEORIES = ("gl", "gl-", "gl+", "cube")
NERVES = {"gl": globular_nerve, "gl-": branching_nerve, "gl+": merging_nerve}


@dataclass
class HomologyReport:
    theory: str
    groups: dict
    levels: dict
    truncated: bool

    def to_dict(self) -> dict:
        return {
            "theory": self.theory,
            "truncated": self.truncated,
            "levels": {str(k): v for k, v in sorted(self.levels.items())},
            "groups": [g.to_dict(k) for k, g in sorted(self.groups.items())],
        }


def nerve_homology(
    table: CellTable,
    theory: str,
    degrees=(0, 1),
    augmentation: str = "full",
    normalized: bool = False,
) -> HomologyReport:
    """``H^u_{k}`` is degree ``k-1`` homology of the augmented chains of the nerve."""
    if theory not in NERVES:
        raise HomologyError(f"unknown nerve theory {theory!r}")
    degrees = sorted(set(degrees))
    for k in degrees:
        if k not in (0, 1):
            raise HomologyError(f"degree {k} is outside the computed range 0..1")
    N = 1 if 1 in degrees else 0
    X = NERVES[theory](table, N=N, augmentation=augmentation)
    C = chain_from_augmented(X, normalized=normalized)
    groups = {k: homology(C, k - 1) for k in degrees}
    return HomologyReport(theory, groups, X.cardinalities(), X.truncated)


def globular_homology(table, degrees=(0, 1), **kw) -> dict:
    return nerve_homology(table, "gl", degrees, **kw).groups


def branching_homology(table, degrees=(0, 1), **kw) -> dict:
    return nerve_homology(table, "gl-", degrees, **kw).groups


def merging_homology(table, degrees=(0, 1), **kw) -> dict:
    return nerve_homology(table, "gl+", degrees, **kw).groups


def cubical_homology(K: PrecubicalSet, degrees=None) -> HomologyReport:
    C = chain_from_precubical(K)
    degrees = C.degrees if degrees is None else sorted(set(degrees))
    groups = {}
    for k in degrees:
        if k not in C.bases:
            raise HomologyError(f"degree {k} outside {C.degrees}")
        groups[k] = homology(C, k)
    return HomologyReport("cube", groups, {n: C.size(n) for n in C.degrees}, False)


def report_json(report: HomologyReport, version: str) -> str:
    data = {"version": version, **report.to_dict()}
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
