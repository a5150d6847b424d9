from __future__ import annotations

import pytest

from graphion.chord import (
    ChordDiagram,
    all_matchings,
    crosses,
    generate_connected,
    green_expansion,
    intersection_graph,
    intersection_order,
    is_connected,
    stats,
)
from graphion.dse import MellinInput, solve


def test_parse_roundtrip():
    C = ChordDiagram.parse("(1,3)(2,4)")
    assert str(C) == "(1,3)(2,4)"
    assert ChordDiagram.parse(str(C)) == C


def test_invalid_diagram():
    with pytest.raises(ValueError):
        ChordDiagram(((1, 2), (2, 3)))
    with pytest.raises(ValueError):
        ChordDiagram.parse("nothing")


def test_crosses():
    assert crosses((1, 3), (2, 4))
    assert not crosses((1, 4), (2, 3))
    assert not crosses((1, 2), (3, 4))


def test_matching_counts():
    # (2n-1)!!
    assert [sum(1 for _ in all_matchings(n)) for n in range(1, 6)] == [1, 3, 15, 105, 945]


def test_connected_counts_match_filter():
    for n in range(1, 6):
        brute = sorted(str(C) for C in all_matchings(n) if is_connected(C))
        assert sorted(str(C) for C in generate_connected(n)) == brute
    assert [len(generate_connected(n)) for n in range(1, 6)] == [1, 1, 4, 27, 248]


def test_guard():
    with pytest.raises(ValueError):
        generate_connected(9)
    with pytest.raises(ValueError):
        generate_connected(0)


def test_intersection_order_root_first():
    C = ChordDiagram.parse("(1,4)(2,6)(3,5)")
    order = intersection_order(C)
    assert order[0] == (1, 4)
    assert sorted(order) == list(C.pairs)


def test_intersection_order_needs_connected():
    with pytest.raises(ValueError):
        intersection_order(ChordDiagram.parse("(1,2)(3,4)"))


def test_single_chord_stats():
    st = stats(ChordDiagram.parse("(1,2)"))
    assert st.terminals == (1,) and st.b == 1 and st.delta == ()


def test_every_diagram_has_a_terminal_chord():
    for n in range(1, 5):
        for C in generate_connected(n):
            for orientation in ("ccw", "intersection"):
                g = intersection_graph(C, orientation)
                st = stats(C, orientation)
                assert st.terminals and all(not g[c] for c in [intersection_order(C)[t - 1] for t in st.terminals])
                assert len(st.delta) == n - 1


def test_orientations_give_the_same_expansion():
    assert green_expansion(4, orientation="ccw") == green_expansion(4, orientation="intersection")


def test_expansion_matches_dse_to_order_three():
    mellin = MellinInput.symbolic(3)
    G = solve(-2, mellin, 3).G
    assert green_expansion(3, mellin.ring) == G
