import pytest

from dhat.freeomega import ContractingError, FreeCell, generate_cells, glob, realize, simplex_complex, table_from_cells
from dhat.nerves import (
    ConstantSimplex,
    NerveError,
    NerveSimplex,
    branching_nerve,
    check_simplicial_map,
    globular_nerve,
    grade,
    h_maps,
    merging_nerve,
    reassemble,
    semi_quotient,
    simplex_compose,
    simplex_face,
)
from dhat.precubical import graph_complex, grid, path_complex

NERVES = (globular_nerve, branching_nerve, merging_nerve)


def path2():
    K = graph_complex({"a": ("u", "v"), "b": ("v", "w")})
    return realize(K)[1]


def point_table():
    p = frozenset({"p"})
    return table_from_cells([FreeCell(p, 0)])


def test_globular_nerve_of_path():
    X = globular_nerve(path2())
    assert X.cardinalities() == {-1: 9, 0: 3, 1: 3}
    assert X.check_identities() == []
    assert X.augmentation["{a,u,v}"] == "({u},{v})"
    assert X.face(1, 0, "{a,b,u,v,w}") == "{a,b,u,v,w}"


def test_realized_augmentation():
    X = globular_nerve(path2(), augmentation="realized")
    assert X.levels[-1] == ["({u},{v})", "({u},{w})", "({v},{w})"]
    with pytest.raises(NerveError):
        globular_nerve(path2(), augmentation="bogus")


def test_semi_quotient_classes():
    t = path2()
    neg = semi_quotient(t, "-")
    pos = semi_quotient(t, "+")
    assert neg.labelled_classes() == [["{a,b,u,v,w}", "{a,u,v}"], ["{b,v,w}"]]
    assert pos.labelled_classes() == [["{a,b,u,v,w}", "{b,v,w}"], ["{a,u,v}"]]
    assert neg.generators and pos.generators


def test_branching_and_merging_of_path():
    t = path2()
    B = branching_nerve(t)
    M = merging_nerve(t)
    assert B.cardinalities() == {-1: 3, 0: 2, 1: 2}
    assert M.cardinalities() == {-1: 3, 0: 2, 1: 2}
    assert sorted(B.augmentation.values()) == ["{u}", "{v}"]
    assert sorted(M.augmentation.values()) == ["{v}", "{w}"]
    for X in (B, M):
        assert X.check_identities() == []


def test_vee_branching_realized():
    _, t = realize(graph_complex({"a": ("u", "v"), "b": ("u", "w")}))
    full = branching_nerve(t)
    real = branching_nerve(t, augmentation="realized")
    assert full.levels[-1] == ["{u}", "{v}", "{w}"]
    assert real.levels[-1] == ["{u}"]
    assert full.levels[0] == real.levels[0]


@pytest.mark.parametrize("depth", [1, 2])
def test_glob_levels_agree(depth):
    for K in (path_complex(2), grid([1, 1]), graph_complex({"a": ("u", "v"), "b": ("u", "w")})):
        t = realize(K)[1]
        for _ in range(depth):
            t = glob(t)
        real = [f(t, augmentation="realized").cardinalities() for f in NERVES]
        assert real[0] == real[1] == real[2]
        full = [f(t).cardinalities() for f in NERVES]
        assert {n: v for n, v in full[0].items() if n >= 0} == {n: v for n, v in full[1].items() if n >= 0}


def test_glob_of_point():
    t = glob(glob(point_table()))
    assert globular_nerve(t).cardinalities() == {-1: 4, 0: 2, 1: 3}
    assert branching_nerve(t).cardinalities() == {-1: 2, 0: 2, 1: 3}


def test_h_maps_are_simplicial():
    for t in (path2(), glob(realize(grid([1, 1]))[1]), realize(grid([2, 1]))[1]):
        G = globular_nerve(t)
        hm, hp = h_maps(t)
        assert check_simplicial_map(hm, G, branching_nerve(t)) == []
        assert check_simplicial_map(hp, G, merging_nerve(t)) == []


def test_h_maps_not_injective_off_globes():
    t = path2()
    hm, _ = h_maps(t)
    level0 = [hm[(0, x)] for x in globular_nerve(t).levels[0]]
    assert len(set(level0)) < len(level0)


def test_grade_and_reassemble():
    t = realize(grid([1, 1]))[1]
    X = globular_nerve(t)
    parts = grade(X)
    assert len(parts) == len(X.levels[-1]) == 16
    busy = {pid for pid, p in parts.items() if p.levels[0]}
    assert len(busy) == 5
    assert reassemble(parts).same_structure(X)
    assert sum(len(p.levels[1]) for p in parts.values()) == len(X.levels[1])


def test_realized_grade_has_nonempty_components():
    t = realize(graph_complex({"a": ("u", "v"), "b": ("u", "w")}))[1]
    parts = grade(globular_nerve(t, augmentation="realized"))
    assert len(parts) == 2
    assert all(p.levels[0] for p in parts.values())


def test_simplex_composition():
    t = path2()
    a = t.find(["a", "u", "v"]).support
    b = t.find(["b", "v", "w"]).support
    ab = simplex_compose(t, NerveSimplex(0, a), NerveSimplex(0, b))
    assert ab == NerveSimplex(0, a | b)
    u = t.find(["u"]).support
    assert simplex_compose(t, ConstantSimplex(0, u), NerveSimplex(0, a)) == NerveSimplex(0, a)
    with pytest.raises(NerveError):
        simplex_compose(t, NerveSimplex(0, b), NerveSimplex(0, a))
    assert simplex_face(t, NerveSimplex(0, a), -1).payload == (u, t.find(["v"]).support)


def test_truncation_guards():
    t = realize(grid([1, 1]), max_dim=1)[1]
    globular_nerve(t, N=0)
    with pytest.raises(NerveError):
        globular_nerve(t, N=1)
    with pytest.raises(NerveError):
        globular_nerve(path2(), N=2)


def test_contracting_table_rejected():
    with pytest.raises(ContractingError):
        u, e, x = frozenset({"u"}), frozenset({"e"}), frozenset({"x"})
        t = table_from_cells([FreeCell(u, 0), FreeCell(e, 1, (u,), (u,)), FreeCell(x, 2, (u, u), (u, e))])
        globular_nerve(t)


def test_simplex_table_nerve():
    t = generate_cells(simplex_complex(2))
    X = globular_nerve(t)
    assert X.cardinalities() == {-1: 9, 0: 4, 1: 5}
    assert X.check_identities() == []


def test_nerve_json_deterministic():
    assert globular_nerve(path2()).to_json() == globular_nerve(path2()).to_json()
