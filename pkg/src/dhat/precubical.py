"""Precubical sets: storage, validation, standard constructors, edge subdivision."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple

SIGNS = ("-", "+")


class PrecubicalError(ValueError):
    pass


class Violation(NamedTuple):
    """One failure of the cube axiom or one dangling face reference.

    For dangling references ``j`` and ``beta`` are ``None``.
    """

    kind: str  # "axiom" or "dangling"
    dim: int
    cube: str
    i: int
    j: int | None
    alpha: str
    beta: str | None


@dataclass(frozen=True)
class PrecubicalSet:
    """Finite precubical set with globally unique cube names.

    ``cubes[n]`` is the sorted tuple of names of the n-cubes, and
    ``faces[(name, i, sign)]`` names the face ``∂_i^sign`` of the cube
    ``name`` (face indices are 1-based).
    """

    cubes: tuple[tuple[str, ...], ...]
    faces: dict

    def __post_init__(self):
        seen = {}
        for n, names in enumerate(self.cubes):
            for name in names:
                if name in seen:
                    raise PrecubicalError(
                        f"cube name {name!r} used in dimensions {seen[name]} and {n}"
                    )
                seen[name] = n
        object.__setattr__(self, "_dims", seen)

    @classmethod
    def build(cls, cubes: dict[int, Iterable[str]], faces: dict) -> "PrecubicalSet":
        top = max(cubes, default=-1)
        levels = tuple(tuple(sorted(cubes.get(n, ()))) for n in range(top + 1))
        while levels and not levels[-1]:
            levels = levels[:-1]
        return cls(levels, dict(faces))

    @property
    def dimension(self) -> int:
        return len(self.cubes) - 1

    def dim(self, name: str) -> int:
        try:
            return self._dims[name]
        except KeyError:
            raise PrecubicalError(f"unknown cube {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._dims

    def level(self, n: int) -> tuple[str, ...]:
        if 0 <= n < len(self.cubes):
            return self.cubes[n]
        return ()

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.level(0)

    @property
    def edges(self) -> tuple[str, ...]:
        return self.level(1)

    def all_cubes(self) -> Iterator[str]:
        for names in self.cubes:
            yield from names

    def face(self, name: str, i: int, sign: str) -> str:
        return self.faces[(name, i, sign)]

    def source(self, edge: str) -> str:
        return self.faces[(edge, 1, "-")]

    def target(self, edge: str) -> str:
        return self.faces[(edge, 1, "+")]

    def iterated_faces(self, name: str) -> set[str]:
        """All cubes reachable from ``name`` by face maps, ``name`` included."""
        out = {name}
        frontier = [name]
        while frontier:
            x = frontier.pop()
            for i in range(1, self.dim(x) + 1):
                for a in SIGNS:
                    y = self.faces[(x, i, a)]
                    if y not in out:
                        out.add(y)
                        frontier.append(y)
        return out

    def cofaces(self, name: str) -> list[tuple[str, int, str]]:
        return sorted(
            (x, i, a) for (x, i, a), y in self.faces.items() if y == name
        )

    def counts(self) -> list[int]:
        return [len(names) for names in self.cubes]

    def rename(self, mapping: Callable[[str], str] | dict) -> "PrecubicalSet":
        f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        cubes = {n: [f(x) for x in names] for n, names in enumerate(self.cubes)}
        faces = {(f(x), i, a): f(y) for (x, i, a), y in self.faces.items()}
        return PrecubicalSet.build(cubes, faces)

    def __eq__(self, other):
        if not isinstance(other, PrecubicalSet):
            return NotImplemented
        return self.cubes == other.cubes and self.faces == other.faces

    def __hash__(self):
        return hash(self.cubes)

    def __repr__(self):
        return f"PrecubicalSet(counts={self.counts()})"

    # JSON --------------------------------------------------------------

    def to_dict(self) -> dict:
        faces = [
            {"cube": x, "i": i, "sign": a, "target": self.faces[(x, i, a)]}
            for n, names in enumerate(self.cubes)
            for x in names
            for i in range(1, n + 1)
            for a in SIGNS
            if (x, i, a) in self.faces
        ]
        return {
            "dims": {str(n): list(names) for n, names in enumerate(self.cubes)},
            "faces": faces,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PrecubicalSet":
        try:
            cubes = {int(n): list(names) for n, names in data["dims"].items()}
            faces = {}
            for entry in data["faces"]:
                sign = entry["sign"]
                if sign not in SIGNS:
                    raise PrecubicalError(f"bad sign {sign!r}")
                key = (entry["cube"], int(entry["i"]), sign)
                if key in faces:
                    raise PrecubicalError(f"duplicate face entry {key}")
                faces[key] = entry["target"]
        except (KeyError, TypeError, AttributeError) as exc:
            raise PrecubicalError(f"malformed precubical JSON: {exc}") from exc
        return cls.build(cubes, faces)

    @classmethod
    def from_json(cls, text: str) -> "PrecubicalSet":
        return cls.from_dict(json.loads(text))


def validate(K: PrecubicalSet) -> list[Violation]:
    """Every dangling face reference and every failure of the cube axiom.

    The cube axiom ``∂_i^α ∂_j^β = ∂_{j-1}^β ∂_i^α`` (``i < j``) is only
    checked on cubes whose relevant faces all exist, so a dangling face is
    reported once rather than cascading.
    """
    out: list[Violation] = []
    for n, names in enumerate(K.cubes):
        for x in sorted(names):
            dangling = False
            for i in range(1, n + 1):
                for a in SIGNS:
                    y = K.faces.get((x, i, a))
                    if y is None or y not in K or K.dim(y) != n - 1:
                        out.append(Violation("dangling", n, x, i, None, a, None))
                        dangling = True
            if dangling or n < 2:
                continue
            for i, j in itertools.combinations(range(1, n + 1), 2):
                for a in SIGNS:
                    for b in SIGNS:
                        left = K.faces.get((K.faces[(x, j, b)], i, a))
                        right = K.faces.get((K.faces[(x, i, a)], j - 1, b))
                        if left is None or left != right:
                            out.append(Violation("axiom", n, x, i, j, a, b))
    extra = [key for key in K.faces if key[0] not in K or not 1 <= key[1] <= K.dim(key[0])]
    for x, i, a in sorted(extra):
        n = K.dim(x) if x in K else -1
        out.append(Violation("dangling", n, x, i, None, a, None))
    out.sort(key=lambda v: (v.dim, v.cube, v.i, v.j or 0, v.alpha, v.beta or ""))
    return out


# constructors ---------------------------------------------------------


def word_face(word: str, i: int, sign: str) -> str:
    """Replace the i-th zero (1-based, left to right) of ``word`` by ``sign``."""
    seen = 0
    for pos, ch in enumerate(word):
        if ch == "0":
            seen += 1
            if seen == i:
                return word[:pos] + sign + word[pos + 1 :]
    raise PrecubicalError(f"word {word!r} has fewer than {i} zeros")


def standard_cube(n: int) -> PrecubicalSet:
    """The n-cube: faces are words over ``-0+`` with p zeros in dimension p."""
    if n < 0:
        raise PrecubicalError("cube dimension must be non-negative")
    cubes: dict[int, list[str]] = {p: [] for p in range(n + 1)}
    faces = {}
    for letters in itertools.product("-0+", repeat=n):
        w = "".join(letters)
        p = w.count("0")
        cubes[p].append(w)
        for i in range(1, p + 1):
            for a in SIGNS:
                faces[(w, i, a)] = word_face(w, i, a)
    return PrecubicalSet.build(cubes, faces)


def grid_cube_name(coords: tuple[tuple[int, int], ...]) -> str:
    """Name of a grid cube from ``(start, extent)`` pairs, extent 0 or 1."""
    parts = [f"{s}:{s + 1}" if e else str(s) for s, e in coords]
    return "(" + ",".join(parts) + ")"


def vertex_name(point: Iterable[int]) -> str:
    return grid_cube_name(tuple((s, 0) for s in point))


def grid_cubes(lengths: list[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    """All cubes of the product of intervals as ``(start, extent)`` tuples."""
    axes = [
        [(s, 0) for s in range(L + 1)] + [(s, 1) for s in range(L)] for L in lengths
    ]
    yield from itertools.product(*axes)


def grid_faces(coords: tuple[tuple[int, int], ...]) -> dict:
    out = {}
    free = [k for k, (_, e) in enumerate(coords) if e]
    for i, axis in enumerate(free, start=1):
        s = coords[axis][0]
        for a, pos in (("-", s), ("+", s + 1)):
            face = coords[:axis] + ((pos, 0),) + coords[axis + 1 :]
            out[i, a] = face
    return out


def grid_subcomplex(
    lengths: list[int], keep: Callable[[tuple[tuple[int, int], ...]], bool]
) -> PrecubicalSet:
    """Subcomplex of the grid on cubes accepted by ``keep``.

    ``keep`` must be closed under taking faces; this is checked.
    """
    cubes: dict[int, list[str]] = {}
    faces = {}
    kept = set()
    for coords in grid_cubes(lengths):
        if keep(coords):
            kept.add(coords)
    for coords in kept:
        name = grid_cube_name(coords)
        n = sum(e for _, e in coords)
        cubes.setdefault(n, []).append(name)
        for (i, a), face in grid_faces(coords).items():
            if face not in kept:
                raise PrecubicalError(f"kept cube {name} has removed face")
            faces[(name, i, a)] = grid_cube_name(face)
    return PrecubicalSet.build(cubes, faces)


def grid(lengths: list[int], holes: Iterable[tuple[int, ...]] = ()) -> PrecubicalSet:
    """Product of intervals with the named top cells removed.

    ``holes`` are coordinates of top-dimensional cells (lower-left corners).
    Only the top cells themselves are removed; their boundaries stay.
    """
    if not lengths or any(L < 1 for L in lengths):
        raise PrecubicalError("lengths must be a nonempty list of positive integers")
    holes = {tuple(h) for h in holes}
    for h in holes:
        if len(h) != len(lengths) or any(not 0 <= c < L for c, L in zip(h, lengths)):
            raise PrecubicalError(f"hole {h} out of bounds for lengths {lengths}")
    top = len(lengths)

    def keep(coords):
        if sum(e for _, e in coords) < top:
            return True
        return tuple(s for s, _ in coords) not in holes

    return grid_subcomplex(lengths, keep)


def path_complex(length: int) -> PrecubicalSet:
    return grid([length])


def subdivide_edge(K: PrecubicalSet, e: str) -> PrecubicalSet:
    """Replace a free edge by two edges through a fresh vertex."""
    if e not in K or K.dim(e) != 1:
        raise PrecubicalError(f"{e!r} is not an edge")
    users = [x for (x, _, _), y in K.faces.items() if y == e]
    if users:
        raise PrecubicalError(f"edge {e!r} is a face of {sorted(set(users))}")

    def fresh(base):
        name = base
        k = 1
        while name in K:
            k += 1
            name = f"{base}{k}"
        return name

    mid, first, second = fresh(e + "/m"), fresh(e + "/1"), fresh(e + "/2")
    cubes = {n: list(names) for n, names in enumerate(K.cubes)}
    cubes[1].remove(e)
    cubes[0].append(mid)
    cubes[1] += [first, second]
    faces = {k: v for k, v in K.faces.items() if k[0] != e}
    faces[(first, 1, "-")] = K.source(e)
    faces[(first, 1, "+")] = mid
    faces[(second, 1, "-")] = mid
    faces[(second, 1, "+")] = K.target(e)
    return PrecubicalSet.build(cubes, faces)


def free_edges(K: PrecubicalSet) -> list[str]:
    used = {y for y in K.faces.values()}
    return [e for e in K.edges if e not in used]


def disjoint_union(*parts: PrecubicalSet, prefixes: Iterable[str] | None = None) -> PrecubicalSet:
    prefixes = list(prefixes) if prefixes is not None else [f"{k}." for k in range(len(parts))]
    cubes: dict[int, list[str]] = {}
    faces = {}
    for p, K in zip(prefixes, parts):
        for n, names in enumerate(K.cubes):
            cubes.setdefault(n, []).extend(p + x for x in names)
        faces.update({(p + x, i, a): p + y for (x, i, a), y in K.faces.items()})
    return PrecubicalSet.build(cubes, faces)


def graph_complex(edges: dict[str, tuple[str, str]], vertices: Iterable[str] = ()) -> PrecubicalSet:
    """1-dimensional precubical set from named directed edges."""
    verts = set(vertices)
    faces = {}
    for e, (u, v) in edges.items():
        verts |= {u, v}
        faces[(e, 1, "-")] = u
        faces[(e, 1, "+")] = v
    return PrecubicalSet.build({0: verts, 1: edges.keys()}, faces)


def one_skeleton_is_acyclic(K: PrecubicalSet) -> bool:
    succ: dict[str, list[str]] = {v: [] for v in K.vertices}
    indeg = {v: 0 for v in K.vertices}
    for e in K.edges:
        succ[K.source(e)].append(K.target(e))
        indeg[K.target(e)] += 1
    stack = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen == len(indeg)
