import networkx as nx
import pytest

from conftest import ROWS, code_for
from tbcode.code_builder import Monomial, build_code, parse_spec
from tbcode.tanner_layout import (LayoutError, UnsupportedWeight, biplanar_split, build_tanner,
                                  build_toric_layout, components_translation_isomorphic,
                                  connected_components, matrix_edges, planarity_test,
                                  tangled_layout_weight4, tanner_matrix_edges, toric_layout_check,
                                  toric_layout_tuples, translation_between)

TORIC_ROWS = sorted(r for r in ROWS if ROWS[r]["toric"])


@pytest.mark.parametrize("row_id", sorted(ROWS))
def test_tanner_edges_are_the_check_matrix_support(row_id):
    code = code_for(row_id)
    g = build_tanner(code)
    assert tanner_matrix_edges(g) == matrix_edges(code)
    w = code.spec.weight
    assert len(g.edges) == w * code.n
    assert set(g.degrees()) == {w}


def test_weight5_graph_size():
    g = build_tanner(code_for("w5_30_4_5"))
    assert (len(g.vertices), len(g.edges)) == (60, 150)
    hx, hz, _ = g.check_matrices()
    code = code_for("w5_30_4_5")
    assert hx == code.h_x and hz == code.h_z


def test_112_code_splits_into_four_translates():
    g = build_tanner(code_for("w4_112_8_5"))
    comps = connected_components(g)
    assert len(comps) == ROWS["w4_112_8_5"]["components"] == 4
    assert all(len(c.vertices) == 56 for c in comps)
    assert components_translation_isomorphic(comps)
    shift = translation_between(comps[0], comps[1])
    assert isinstance(shift, Monomial)
    # independent check with a general-purpose isomorphism test
    assert nx.is_isomorphic(comps[0].to_networkx(), comps[2].to_networkx())


def test_connected_rows_have_one_component():
    for row_id in ("w5_30_4_5", "w6_48_4_6", "w7_30_4_5", "w4_144_2_12_a"):
        assert len(connected_components(build_tanner(code_for(row_id)))) == 1


@pytest.mark.parametrize("row_id", sorted(ROWS))
def test_toric_tuple_matches_table(row_id):
    found = toric_layout_check(code_for(row_id))
    expected = ROWS[row_id]["toric"]
    assert (list(found) if found else None) == expected


def test_all_tuples_are_reported_in_order():
    tuples = toric_layout_tuples(code_for("w5_30_4_5"))
    assert tuples == sorted(tuples)
    assert tuples[0] == (1, 2, 2, 3, 5, 3)
    assert all(mu * lam == 15 for *_, mu, lam in tuples)


@pytest.mark.parametrize("row_id", TORIC_ROWS)
def test_toric_layout_is_translation_invariant(row_id):
    code = code_for(row_id)
    for t in toric_layout_tuples(code):
        layout = build_toric_layout(code, *t[:4])
        assert layout.shape == (2 * t[4], 2 * t[5])
        for cv, dv, _ in layout.unit_edges:
            dx, dy = layout.vector(cv, dv)
            assert abs(dx) + abs(dy) == 1
        by_origin = {}
        for cv, _, o, vec in layout.long_edges:
            by_origin.setdefault((cv[0], o), set()).add(vec)
        assert all(len(v) == 1 for v in by_origin.values())


def test_weight5_long_range_vectors():
    layout = build_toric_layout(code_for("w5_30_4_5"), 1, 2, 2, 3)
    fam = layout.long_range_families()
    assert fam == {("X", ("B", 0)): (4, 3), ("Z", ("B", 0)): (-4, 3)}


def test_48_4_6_layout():
    code = code_for("w6_48_4_6")
    layout = build_toric_layout(code, *toric_layout_check(code)[:4])
    assert layout.shape == (24, 4)
    fam = layout.long_range_families()
    assert fam == {("X", ("B", 0)): (10, -1), ("X", ("B", 1)): (-6, 1),
                   ("Z", ("B", 0)): (-10, 1), ("Z", ("B", 1)): (6, -1)}


def test_long_range_x_and_z_vectors_are_opposite():
    for row_id in TORIC_ROWS:
        code = code_for(row_id)
        layout = build_toric_layout(code, *toric_layout_check(code)[:4])
        fam = layout.long_range_families()
        for (kind, origin), (dx, dy) in fam.items():
            if kind == "X":
                assert layout.wrap(-dx, -dy) == fam[("Z", origin)]


def test_weight7_has_three_long_range_families():
    code = code_for("w7_30_4_5")
    fam = build_toric_layout(code, *toric_layout_check(code)[:4]).long_range_families()
    assert len([k for k in fam if k[0] == "X"]) == 3


def test_rejects_non_toric_indices():
    code = code_for("w5_30_4_5")
    with pytest.raises(LayoutError):
        build_toric_layout(code, 1, 2, 1, 1)
    assert toric_layout_check(code_for("w4_144_2_12_a")) is None


# --- tangled layouts -------------------------------------------------------------


def test_tangled_layout_of_64_qubit_code():
    t = tangled_layout_weight4(code_for("w4_64_2_8"), 8, 4)
    assert t.sigma == list(range(8, 16)) + list(range(8))
    assert t.tau == list(range(8))
    expected = {frozenset((g.vertices[c], g.vertices[d])) for g in [build_tanner(code_for("w4_64_2_8"))]
                for c, d, _ in g.edges}
    assert t.edge_set() == expected


def test_toric_code_has_untangled_boundaries():
    t = tangled_layout_weight4(build_code(parse_spec("l=4 m=3 A=1+x B=1+y")), 4, 3)
    assert t.sigma == list(range(8)) and t.tau == list(range(6))


def test_tangled_layout_rejects_bad_inputs():
    with pytest.raises(LayoutError):
        tangled_layout_weight4(code_for("w5_30_4_5"), 5, 3)
    with pytest.raises(LayoutError):
        tangled_layout_weight4(code_for("w4_64_2_8"), 16, 2)
    with pytest.raises(LayoutError):
        tangled_layout_weight4(code_for("w4_64_2_8"), 3, 3)


# --- planarity -------------------------------------------------------------------


def test_planarity_on_classic_graphs():
    assert planarity_test(nx.complete_graph(4))
    assert not planarity_test(nx.complete_graph(5))
    assert not planarity_test(nx.complete_bipartite_graph(3, 3))
    assert planarity_test(nx.MultiGraph([(0, 1), (0, 1), (1, 2)]))


@pytest.mark.parametrize("row_id", [r for r in sorted(ROWS) if ROWS[r]["biplanar"]])
def test_biplanar_split(row_id):
    code = code_for(row_id)
    split = biplanar_split(code)
    assert split.certified
    assert len(split.part1) + len(split.part2) == code.spec.weight * code.n
    assert set(split.terms1).isdisjoint(split.terms2)


def test_biplanar_split_unsupported_for_weight7():
    with pytest.raises(UnsupportedWeight):
        biplanar_split(code_for("w7_30_4_5"))
