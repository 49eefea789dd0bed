"""Acceptance criteria 1-8, one test each.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
also collected and repeated in the terminal summary.  Run just this file
with ``pytest tests/test_acceptance.py -v -s``.
"""

import itertools
import os
import random
import subprocess
import sys
import time
from pathlib import Path

from dhat.freeomega import (
    check_axioms,
    cube_atom_source_target,
    cube_complex,
    generate_cells,
    glob,
    path_part,
    realize,
    simplex_atom_source_target,
    simplex_complex,
    simplex_face_name,
)
from dhat.homology import (
    cubical_homology,
    chain_from_augmented,
    chain_from_precubical,
    HomologyGroup,
    is_smith_form,
    matmul,
    determinant,
    nerve_homology,
    smith_normal_form,
)
from dhat.nerves import branching_nerve, check_simplicial_map, globular_nerve, h_maps, merging_nerve
from dhat.precubical import free_edges, grid, path_complex, subdivide_edge
from dhat.pvlang import Action, FinalForbidden, PVProgram, analyze, build_model, parse_pv
from conftest import FIXTURES, invariance_corpus
from oracles import (
    directed_paths,
    interleaving_oracle,
    path_support,
    pv_corpus,
    random_dag,
    random_grid_subcomplex,
)

RESULTS: dict = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line, flush=True)
    assert ok, line


def test_criterion_1_atoms():
    t0 = time.perf_counter()
    s, t = simplex_atom_source_target((0, 4, 5, 8, 9))
    s = sorted(map(simplex_face_name, s), reverse=True)
    t = sorted(map(simplex_face_name, t), reverse=True)
    cs, ct = cube_atom_source_target("0+00")
    ok = (
        s == ["(4589)", "(0489)", "(0458)"]
        and t == ["(0589)", "(0459)"]
        and sorted(cs) == sorted(["-+00", "0++0", "0+0-"])
        and sorted(ct) == sorted(["++00", "0+-0", "0+0+"])
    )
    dt = time.perf_counter() - t0
    record(1, ok and dt < 1, f"(04589): s={s} t={t}; 0+00: s={sorted(cs)} t={sorted(ct)}; {dt:.3f}s")


def test_criterion_2_axioms():
    t0 = time.perf_counter()
    tables = {
        "simplex 2": generate_cells(simplex_complex(2)),
        "cube 2": generate_cells(cube_complex(2)),
        "cube 3": generate_cells(cube_complex(3), max_dim=3, max_cells=20000),
    }
    failures = {name: check_axioms(t) for name, t in tables.items()}
    dt = time.perf_counter() - t0
    ok = all(not f for f in failures.values()) and not any(t.truncated for t in tables.values()) and dt < 300
    counts = {name: t.counts() for name, t in tables.items()}
    record(2, ok, f"counts {counts}, failures {sum(map(len, failures.values()))}, {dt:.2f}s")


def test_criterion_3_realization():
    rng = random.Random(2024)
    checked = 0
    bad = []
    for k in range(20):
        if k % 2:
            K = random_dag(rng, rng.randint(3, 10), rng.randint(1, 30))
        else:
            K = random_grid_subcomplex(rng, [rng.randint(1, 3), rng.randint(1, 3)])
        assert len(K.edges) <= 30
        _, table = realize(K)
        name = table.face_name
        got = sorted(
            (sorted(name(f) for f in c.support), sorted(name(f) for f in c.s(0)), sorted(name(f) for f in c.t(0)))
            for c in table.of_dim(1)
        )
        want = sorted(
            (sorted(path_support(K, p)), [K.source(p[0])], [K.target(p[-1])]) for p in directed_paths(K)
        )
        checked += len(want)
        if got != want:
            bad.append(k)
    record(3, not bad, f"20 complexes, {checked} paths matched, mismatches {bad}")


def glob_fixtures():
    out = []
    for K in (path_complex(1), path_complex(3), grid([1, 1]), grid([2, 1]), grid([2, 2], [(1, 1)])):
        out.append(realize(K)[1])
    out.append(realize(invariance_corpus()["vee"])[1])
    return out


def test_criterion_4_globe():
    problems = []
    n = 0
    for T in glob_fixtures():
        for depth in (1, 2):
            G = T
            for _ in range(depth):
                G = glob(G)
            back = G
            for _ in range(depth):
                back = path_part(back)
            if back != T:
                problems.append("round trip")
            X = globular_nerve(G, augmentation="realized")
            B = branching_nerve(G, augmentation="realized")
            M = merging_nerve(G, augmentation="realized")
            if not (X.cardinalities() == B.cardinalities() == M.cardinalities()):
                problems.append(f"levels {X.cardinalities()} {B.cardinalities()} {M.cardinalities()}")
            hm, hp = h_maps(G)
            for h, Y in ((hm, B), (hp, M)):
                problems += check_simplicial_map(h, X, Y)
                for level in (0, 1):
                    images = [h[(level, x)] for x in X.levels[level]]
                    if len(set(images)) != len(images):
                        problems.append(f"h not injective at level {level}")
            n += 1
    record(4, not problems, f"{n} globe tables, problems {problems[:3]}")


def test_criterion_5_homology_engine():
    t0 = time.perf_counter()
    problems = []
    complexes = [chain_from_precubical(K) for K in (grid([2, 2], [(1, 1)]), grid([3, 2, 1]))]
    for T in glob_fixtures():
        for nerve in (globular_nerve, branching_nerve, merging_nerve):
            complexes.append(chain_from_augmented(nerve(T)))
    for C in complexes:
        problems += C.check()
    rng = random.Random(8)
    for _ in range(50):
        M = [[rng.randint(-9, 9) for _ in range(8)] for _ in range(8)]
        U, D, V = smith_normal_form(M)
        if matmul(matmul(U, M), V) != D or abs(determinant(U)) != 1 or abs(determinant(V)) != 1:
            problems.append("UMV != D or not unimodular")
        if not is_smith_form(D):
            problems.append("divisibility")
    Z = HomologyGroup(1)
    hollow = cubical_homology(grid([1, 1], [(0, 0)])).groups
    annulus = cubical_homology(grid([2, 2], [(1, 1)])).groups
    if (hollow[0], hollow[1]) != (Z, Z):
        problems.append(f"hollow square {hollow}")
    if (annulus[0], annulus[1]) != (Z, Z):
        problems.append(f"annulus {annulus}")
    dt = time.perf_counter() - t0
    record(5, not problems and dt < 60, f"{len(complexes)} chain complexes, 50 SNFs, hollow {hollow[1]}, annulus {annulus[1]}, {dt:.2f}s")


def test_criterion_6_invariance():
    changed = []
    broken = []
    fixtures = invariance_corpus()
    edits = 0
    for name, K in fixtures.items():
        t = realize(K)[1]
        base = {th: nerve_homology(t, th).groups for th in ("gl", "gl-", "gl+")}
        for e in free_edges(K):
            S = subdivide_edge(K, e)
            steps = [S]
            steps.append(subdivide_edge(S, sorted(set(free_edges(S)) - set(free_edges(K)))[0]))
            for S2 in steps:
                t2 = realize(S2)[1]
                new = {th: nerve_homology(t2, th).groups for th in ("gl", "gl-", "gl+")}
                edits += 1
                for th in ("gl-", "gl+"):
                    if new[th][1] != base[th][1]:
                        broken.append((name, e, th))
                if new["gl"][0] != base["gl"][0]:
                    changed.append(name)
    ok = len(fixtures) >= 10 and not broken and bool(changed)
    record(
        6,
        ok,
        f"{len(fixtures)} fixtures, {edits} subdivisions, gl-/gl+ H_1 changes {broken}, "
        f"gl H_0 changed on {len(set(changed))} fixtures",
    )


def test_criterion_7_pv_oracle():
    t0 = time.perf_counter()
    total = mismatches = rejected = 0
    for resources, procs in pv_corpus():
        total += 1
        prog = PVProgram(resources, tuple(tuple(Action(*a) for a in p) for p in procs))
        ok, dead, unreach, unsafe = interleaving_oracle(resources, procs)
        try:
            r = analyze(build_model(prog))
        except FinalForbidden:
            rejected += 1
            mismatches += ok
            continue
        if not ok or (r.deadlocks, r.unreachable, r.unsafe) != (dead, unreach, unsafe):
            mismatches += 1
    swiss = analyze(build_model(parse_pv((FIXTURES / "swiss_flag.pv").read_text())))
    swiss_ok = len(swiss.deadlocks) == 1 and len(swiss.unreachable) == 1
    dt = time.perf_counter() - t0
    record(
        7,
        mismatches == 0 and swiss_ok and dt < 600,
        f"{total} programs ({rejected} with forbidden final state), {mismatches} mismatches; "
        f"swiss flag deadlocks {swiss.deadlocks} unreachable {swiss.unreachable}; {dt:.1f}s",
    )


COMMANDS = [
    ["analyze"],
    ["analyze", "--format", "text"],
    ["homology"],
    ["homology", "--theory", "gl"],
    ["homology", "--theory", "gl-"],
    ["homology", "--theory", "gl+", "--augmentation", "realized"],
    ["homology", "--theory", "gl-", "--glob", "1"],
    ["cells"],
    ["cells", "--format", "json"],
    ["export"],
    ["export", "--format", "sparse"],
    ["export", "--format", "sparse", "--theory", "gl-"],
    ["render"],
]


def run_cli(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    env.pop("DHAT_MAX_CELLS", None)
    p = subprocess.run([sys.executable, "-m", "dhat.cli", *args], capture_output=True, env=env)
    return p.returncode, p.stdout, p.stderr


def test_criterion_8_determinism():
    fixtures = sorted(str(p) for p in Path(FIXTURES).iterdir() if p.suffix in (".pv", ".json"))
    differ = []
    runs = 0
    for cmd, f in itertools.product(COMMANDS, fixtures):
        a = run_cli([*cmd, f], 1)
        b = run_cli([*cmd, f], 2)
        runs += 1
        if a != b:
            differ.append(" ".join(cmd) + " " + Path(f).name)
    record(8, not differ, f"{runs} command/fixture pairs run twice, differing {differ[:3]}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
