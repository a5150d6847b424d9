from __future__ import annotations

import random

import pytest

from graphion.denred import (
    ENDED_STUCK,
    ENDED_ZERO,
    RUNNING,
    CovError,
    CovPartition,
    change_of_variables,
    colour_count,
    d4_choices,
    d5,
    d7_direct,
    free_d7,
    free_shape_labels,
    isolated_vertices,
    reduce_poly,
    reduce_sequence,
    reduce_step,
    suggest_order,
)
from graphion.graph import GraphError, Multigraph, complete_graph, decomplete
from graphion.graphpoly import five_invariant
from graphion.poly import Ring, divide_exact, poly_sqrt
from graphion.reproduce import data_graph

R = Ring(["x", "y", "z"])
x, y, z = R.gens()


def test_reduce_poly_product_of_linears():
    p = (x * y + z) * (2 * x + y * z)
    status, q = reduce_poly(p, "x")
    assert status == RUNNING
    # A D - B C with (A, B, C, D) = (y, z, 2, y z)
    assert q == (y * y * z - 2 * z).canonical_sign()


def test_reduce_poly_linear_gives_coefficient():
    status, q = reduce_poly(x * y + z, "x")
    assert (status, q) == (RUNNING, y)


def test_reduce_poly_stuck_on_irreducible_quadratic():
    status, _ = reduce_poly(x * x + y * z + 1, "x")
    assert status == ENDED_STUCK
    status, _ = reduce_poly(x ** 3 + y, "x")
    assert status == ENDED_STUCK


def test_reduce_poly_zero():
    status, q = reduce_poly(x * y * y, "x")
    assert status == RUNNING and q == y * y
    status, q = reduce_poly(y * z, "x")
    assert status == ENDED_ZERO and q.is_zero()


def test_d5_validation():
    g = data_graph("k4")
    with pytest.raises(GraphError):
        d5(g, ["1", "2", "3"])
    with pytest.raises(GraphError):
        d5(Multigraph.from_edges([("1", 0, 1), ("2", 1, 2)]), ["1", "2", "1", "2", "1"])


def test_d5_is_five_invariant():
    g = data_graph("gbs")
    st = d5(g, ["1", "2", "3", "4", "5"])
    assert st.poly == five_invariant(g, "1", "2", "3", "4", "5")
    assert st.j == 5 and st.running


def test_step_errors():
    g = data_graph("gbs")
    st = d5(g, ["1", "2", "3", "4", "5"])
    with pytest.raises(GraphError):
        reduce_step(st, "1")
    stuck = st.__class__(g, st.reduced, st.poly, ENDED_STUCK)
    with pytest.raises(GraphError):
        reduce_step(stuck, "6")


def _random_primitive(rng):
    # decompletions of K5 and a 4-regular 6-vertex graph, plus the shipped files
    pool = [decomplete(complete_graph(5), 0), data_graph("gbs"), data_graph("p838")]
    return rng.choice(pool)


def test_d4_choices_agree_up_to_sign():
    rng = random.Random(11)
    checked = 0
    while checked < 12:
        g = _random_primitive(rng)
        if len(g.labels) < 6:
            continue
        i, j, k, l, m = rng.sample(list(g.labels), 5)
        results = set()
        for d4 in d4_choices(g, i, j, k, l):
            status, p = reduce_poly(d4, g.var(m))
            if status == RUNNING:
                results.add(p)
        if results:
            assert len(results) == 1
            assert results == {five_invariant(g, i, j, k, l, m).canonical_sign()}
            checked += 1


def test_gbs_first_ten_edges():
    g = data_graph("gbs")
    states = reduce_sequence(g, [str(i) for i in range(1, 11)])
    assert [s.status for s in states] == [RUNNING] * 6
    last = states[-1]
    assert last.j == 10
    assert last.poly.degree_in("a11") == 2


def test_sequence_stops_when_ended():
    g = decomplete(complete_graph(5), 0)
    states = reduce_sequence(g, g.labels)
    assert states[-1].status in (ENDED_ZERO, ENDED_STUCK, RUNNING)
    assert all(s.running for s in states[:-1])


def test_colour_count_without_isolated_vertices():
    g = data_graph("gbs")
    st = reduce_sequence(g, [str(i) for i in range(1, 9)])[-1]
    assert colour_count(st) == 7 + 3 - 2 * len(isolated_vertices(g, st.reduced))


def test_colour_count_discards_isolated():
    g = data_graph("gbs")
    st = reduce_sequence(g, [str(i) for i in range(1, 11)])[-1]
    iso = isolated_vertices(g, st.reduced)
    assert iso
    assert colour_count(st) == 12 - 2 * len(iso)


def test_free_shape_labels():
    g = data_graph("gbs")
    shape = free_shape_labels(g, "4")
    assert shape["1"] == "4"
    assert {shape["2"], shape["3"], shape["4"], shape["5"]} == {"1", "3", "5", "6"}
    with pytest.raises(GraphError):
        free_shape_labels(g, "2")


def test_free_d7_factors_the_direct_reduction():
    g = data_graph("gbs")
    shape = free_shape_labels(g, "4")
    rest = [l for l in g.labels if l not in {shape[k] for k in "12345"}]
    tried = 0
    for i, j in [(rest[0], rest[1]), (rest[2], rest[5])]:
        try:
            direct = d7_direct(g, shape, i, j)
        except ArithmeticError:
            continue
        first, second = free_d7(g, shape, i, j)
        assert (first * second).canonical_sign() == direct
        assert divide_exact(direct, second).canonical_sign() == first
        tried += 1
    assert tried


def test_suggest_order_gbs_runs_to_ten():
    sug = suggest_order(data_graph("gbs"))
    assert len(sug.order) >= 10


def test_cov_partition_validation():
    g = data_graph("gbs")
    with pytest.raises(GraphError):
        CovPartition.build(g, ["1"], ["2"], ["3"])
    with pytest.raises(GraphError):
        # G2 u G3 = {14, 1} is disconnected
        CovPartition.build(g, [l for l in g.labels if l not in ("14", "1")], ["14"], ["1"])


def test_cov_gbs():
    g = data_graph("gbs")
    st = reduce_sequence(g, [str(i) for i in range(1, 12)])[-1]
    part = CovPartition.build(g, [str(i) for i in range(1, 12)], ["12", "13"], ["14", "15", "16"])
    res = change_of_variables(st, part)
    assert res.value >= 0
    assert res.R.degree_in("a14") <= 1 and res.R.degree_in("a15") <= 1
    assert poly_sqrt(res.Q * res.Q) == res.Q


def test_cov_requires_matching_reduction():
    g = data_graph("gbs")
    st = reduce_sequence(g, [str(i) for i in range(1, 11)])[-1]
    part = CovPartition.build(g, [str(i) for i in range(1, 12)], ["12", "13"], ["14", "15", "16"])
    with pytest.raises(GraphError):
        change_of_variables(st, part)


def test_cov_inequality_failure_reported():
    g = data_graph("gbs")
    order = [str(i) for i in range(1, 10)]
    st = reduce_sequence(g, order)[-1]
    part = CovPartition.build(g, order, ["10", "11", "12", "13"], ["14", "15", "16"])
    try:
        res = change_of_variables(st, part)
    except CovError as exc:
        assert exc.terms is not None
    else:
        assert res.value >= 0
