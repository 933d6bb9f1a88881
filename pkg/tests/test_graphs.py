import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalkgates.engine import ReturnKind, classify_return, walk_operator
from qwalkgates.graphs import (
    Edge,
    Symmetry,
    WalkGraph,
    adjacency,
    build_register_graph,
    chain_graph,
    connected_components,
    format_label,
    parse_label,
    reduce_fan,
    reduce_square,
)
from qwalkgates.solvers import square_graph, star_graph

CUBE = [(s, p) for s in range(3) for p in ((0, 2), (1, 3))]
PAIR12 = [(0, (1, 2)), (1, (1, 2))]


def tag_of(g, a, b):
    return g.edge_between(a, b).tag


def test_labels_round_trip():
    assert parse_label("0123") == (0, 1, 2, 3)
    assert format_label((1, 0, 12)) == "1.0.12"
    assert parse_label("1.0.12") == (1, 0, 12)
    with pytest.raises(ValueError):
        parse_label("1x")


def test_node_order_boolean_first():
    g = WalkGraph(["20", "11", "00", "02", "10"])
    assert [format_label(n) for n in g.nodes] == ["00", "10", "11", "02", "20"]


def test_adjacency_single_node():
    g = WalkGraph([(0,)])
    np.testing.assert_array_equal(adjacency(g), np.zeros((1, 1)))


def test_adjacency_two_nodes():
    a = 0.3 - 1.2j
    m = adjacency(chain_graph([a]))
    np.testing.assert_array_equal(m, [[0, a], [np.conj(a), 0]])


def test_adjacency_square():
    a1, a2, b1, b2 = 1 + 1j, 2.0, -0.5j, 3.0
    m = adjacency(square_graph(a1, a2, b1, b2))
    expected = np.array([
        [0, a1, a2, 0],
        [np.conj(a1), 0, 0, b1],
        [np.conj(a2), 0, 0, b2],
        [0, np.conj(b1), np.conj(b2), 0],
    ])
    np.testing.assert_array_equal(m, expected)
    np.testing.assert_array_equal(m, m.conj().T)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        Edge("0", "0", 1.0)
    with pytest.raises(ValueError):
        WalkGraph(["0", "1"], [Edge("0", "1", 1), Edge("1", "0", 2)])
    with pytest.raises(ValueError):
        WalkGraph(["0", "1"], [Edge("0", "2", 1)])
    with pytest.raises(ValueError):
        WalkGraph(["0", "1", "2"], [Edge("0", "1", 1, "x"), Edge("1", "2", 2, "x")])


def test_fig4_components():
    g = build_register_graph(2, 4, PAIR12, Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    driven = g.with_amplitudes({"a1": 1, "a2": 1, "b1": 1, "b2": 1})
    comps = connected_components(driven)
    assert len(comps) == 4
    bools = sorted(format_label(b) for c in comps for b in c.boolean_nodes)
    assert bools == ["00", "01", "10", "11"]
    assert all(len(c.boolean_nodes) == 1 for c in comps)
    sizes = {format_label(c.boolean_nodes[0]): c.size for c in comps}
    assert sizes == {"00": 1, "01": 2, "10": 2, "11": 4}


def test_fig4_class_pattern():
    g = build_register_graph(2, 4, PAIR12, Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    # local transitions tied across unexcited spectators, split by an excited one
    assert tag_of(g, "11", "21") == tag_of(g, "10", "20")
    assert tag_of(g, "11", "21") != tag_of(g, "12", "22")
    assert tag_of(g, "11", "12") == tag_of(g, "01", "02")
    assert tag_of(g, "11", "12") != tag_of(g, "21", "22")
    assert len(g.classes) == 4


def test_empty_edges_give_singletons():
    g = WalkGraph(["00", "01", "10"])
    comps = connected_components(g)
    assert [c.size for c in comps] == [1, 1, 1]


def test_partitioned_square_components():
    red = reduce_square(square_graph(1, 1, 1, -1))
    assert red.partitioned
    comps = connected_components(red.chain, tol=1e-12)
    assert [c.size for c in comps] == [2, 2]


def test_non_interacting_two_classes():
    g = build_register_graph(2, 4, PAIR12, Symmetry.NON_INTERACTING)
    assert len(g.classes) == 2


def test_non_interacting_never_couples_boolean_nodes():
    g = build_register_graph(3, 4, CUBE, Symmetry.NON_INTERACTING)
    driven = g.with_amplitudes({t: 1.0 for t in g.classes})
    for comp in connected_components(driven):
        assert len(comp.boolean_nodes) == 1


def test_cube_class_structure():
    g = build_register_graph(3, 4, CUBE, Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    assert g.size == 64
    # opposite edges of cube faces are tied
    assert tag_of(g, "000", "200") == tag_of(g, "002", "202")
    assert tag_of(g, "000", "002") == tag_of(g, "200", "202")
    assert tag_of(g, "020", "220") == tag_of(g, "022", "222")
    assert tag_of(g, "002", "022") == tag_of(g, "102", "122")
    # the triply excited edge is shifted by both neighbors
    assert tag_of(g, "202", "222") != tag_of(g, "002", "022")
    assert tag_of(g, "202", "222") != tag_of(g, "200", "220")
    # named classes resolve and sit where the worked examples put them
    assert g.resolve("c1") == tag_of(g, "000", "002")
    assert g.resolve("b3") == tag_of(g, "002", "022")
    assert g.resolve("a2") == tag_of(g, "022", "222")
    assert g.resolve("b~3'") == tag_of(g, "012", "032")
    assert g.resolve("a2'") == tag_of(g, "032", "232")


def test_cube_marks_inferred_tags():
    g = build_register_graph(3, 4, CUBE, Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    doc = g.to_dict()
    flagged = {e["class"] for e in doc["edges"] if e.get("figure_inferred")}
    assert flagged and not flagged & set(g.aliases.values())
    assert tag_of(g, "202", "222") in flagged


def test_base3_ladder():
    trans = [(s, p) for s in range(2) for p in ((1, 2), (2, 3))]
    g = build_register_graph(2, 4, trans, Symmetry.INTERMEDIATE_RESONANCE_BASE3)
    comp = [c for c in connected_components(g.with_amplitudes({t: 1 for t in g.classes}))
            if (1, 1) in c.nodes][0]
    assert comp.size == 9  # three levels per site
    assert tag_of(g, "31", "32") == tag_of(g, "11", "12")
    assert tag_of(g, "32", "22") != tag_of(g, "33", "23")


def test_base3_rejects_level_skipping():
    with pytest.raises(ValueError):
        build_register_graph(2, 4, [(0, (1, 3))], Symmetry.INTERMEDIATE_RESONANCE_BASE3)


def test_unsupported_alphabet():
    with pytest.raises(ValueError):
        build_register_graph(2, 3, [(0, (0, 2))], Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    with pytest.raises(ValueError):
        build_register_graph(2, 4, [(0, (0, 4))])
    with pytest.raises(ValueError):
        build_register_graph(5, 4, [])


def test_custom_tags():
    g = build_register_graph(2, 4, PAIR12, Symmetry.CUSTOM,
                             custom_tag=lambda site, lo, hi, node: f"e{site}")
    assert set(g.classes) == {"e0", "e1"}


def test_class_mutation_updates_all_members():
    g = build_register_graph(3, 4, CUBE, Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    d = g.with_amplitudes({"c1": 0.25 + 0.5j})
    members = [e for e in d.edges if e.tag == g.resolve("c1")]
    assert len(members) > 1
    assert all(e.amplitude == 0.25 + 0.5j for e in members)
    assert all(e.amplitude == 0 for e in d.edges if e.tag != g.resolve("c1"))
    with pytest.raises(KeyError):
        g.with_amplitudes({"nonexistent": 1})


def test_json_round_trip():
    g = build_register_graph(3, 4, CUBE, Symmetry.INTERMEDIATE_RESONANCE_BASE4)
    d = g.with_amplitudes({"a2": 1 - 2j, "b3": 0.5})
    text = d.to_json()
    back = WalkGraph.from_json(text)
    assert back.to_json() == text
    np.testing.assert_array_equal(adjacency(back), adjacency(d))
    doc = json.loads(text)
    assert {"from", "to", "re", "im", "class"} <= set(doc["edges"][0])


def test_fan_examples():
    red = reduce_fan(star_graph([3, 4]), (0,))
    assert red.amplitude == pytest.approx(5.0)
    red = reduce_fan(star_graph([1.5j]), (0,))
    assert red.amplitude == pytest.approx(1.5)
    red = reduce_fan(star_graph([1, 1, 1, 1]), (0,))
    assert red.amplitude == pytest.approx(2.0)
    assert classify_return(red.graph, (0,)).kind is ReturnKind.R0


def test_fan_weights_lift_walk():
    amps = [1 + 1j, 0.5, -2j]
    g = star_graph(amps)
    red = reduce_fan(g, (0,))
    u_full = walk_operator(g, 0.37)
    u_red = walk_operator(red.graph, 0.37)
    assert u_full[0, 0] == pytest.approx(u_red[0, 0], abs=1e-12)
    for spoke, w in red.weights.items():
        assert u_full[g.index(spoke), 0] == pytest.approx(w * u_red[1, 0], abs=1e-12)


def test_fan_rejects_non_star():
    with pytest.raises(ValueError):
        reduce_fan(chain_graph([1, 1, 1]), (0,))


def test_square_symmetric():
    red = reduce_square(square_graph(1, 1, 1, 1))
    assert red.symmetric
    amps = [e.amplitude for e in red.chain.edges]
    np.testing.assert_allclose(amps, [np.sqrt(2), np.sqrt(2)])


def test_square_cz_example_spectrum():
    b1 = (np.sqrt(7) + 3) / 4
    b2 = (np.sqrt(7) - 3) / 4
    red = reduce_square(square_graph(2, 2, b1, b2))
    assert not red.symmetric and red.chain.size == 4
    lam = np.linalg.eigvalsh(adjacency(red.chain))
    np.testing.assert_allclose(lam, [-3, -1, 1, 3], atol=1e-12)


def test_square_errors():
    with pytest.raises(ValueError):
        reduce_square(chain_graph([1, 1, 1]))
    with pytest.raises(ValueError):
        reduce_square(square_graph(0, 0, 1, 1))


def test_square_basis_is_tridiagonalizing():
    g = square_graph(1 + 0.5j, -0.3j, 2.0, 0.7 + 0.1j)
    red = reduce_square(g)
    m = red.basis.conj().T @ adjacency(g) @ red.basis
    np.testing.assert_allclose(m, adjacency(red.chain), atol=1e-12)


amp = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(amp, amp, amp, amp, st.floats(0, 1))
def test_square_reduction_fidelity(a1, a2, b1, b2, frac):
    if abs(a1) ** 2 + abs(a2) ** 2 < 1e-6:
        return
    g = square_graph(a1, a2, b1, b2)
    red = reduce_square(g)
    lifted = red.lift(walk_operator(red.chain, frac))
    assert np.abs(lifted - walk_operator(g, frac)).max() <= 1e-10
