import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geodesic_ap.geodesics import (
    TraceTable,
    TraceWindow,
    aggregate_density,
    c_p,
    norm_of_trace,
    piece_coefficient,
    piece_traces,
    predicted_density,
    predicted_piece_coefficient,
    psi,
    psi_ap,
    psi_ap_zagier,
    psi_piece,
    psi_star,
    trace_bound,
    traces_in_class,
    zagier_weight,
)
from geodesic_ap.quadratic import ClassCache
from geodesic_ap.zagier import Lp1_zagier
from oracles import norm_brute

LOG_EPS_5 = 0.9624236501192069


@pytest.mark.parametrize("t, expected", [(3, 6.854101966249685), (4, 13.928203230275509)])
def test_norm_of_trace(t, expected):
    assert norm_of_trace(t) == pytest.approx(expected, rel=1e-14)


def test_trace_bound_against_norms():
    for t in range(3, 300):
        n = norm_brute(t)
        assert trace_bound(n * (1 + 1e-9)) == t
        assert trace_bound(n * (1 - 1e-9)) == t - 1


@given(st.fractions(min_value=1, max_value=10**12))
def test_trace_bound_exact(x):
    t = trace_bound(x)
    assert t * t * x <= (x + 1) ** 2 < (t + 1) ** 2 * x


def test_trace_window():
    w = TraceWindow.of(10)
    assert (w.t_min, w.t_max) == (3, 3)
    assert list(w.traces) == [3]


def test_psi_small_x():
    table = TraceTable()
    assert psi(6, table) == 0.0
    assert psi(10, table) == pytest.approx(2 * LOG_EPS_5, rel=1e-14)
    assert psi_ap(10, 5, 3, table) == pytest.approx(2 * LOG_EPS_5, rel=1e-14)
    assert psi_ap(10, 5, 1, table) == 0.0
    assert psi_ap_zagier(10, 5, 3) == pytest.approx(2 * LOG_EPS_5, rel=1e-12)


def test_psi_star_small_x():
    expected = 2 * math.sqrt(5) * Lp1_zagier(5, 3)
    assert psi_star(10, 3, 1, 0) == pytest.approx(expected, rel=1e-12)
    assert psi_star(10, 3, 1, 0, route="class", table=TraceTable()) == pytest.approx(expected, rel=1e-9)


def test_class_and_zagier_weights_agree():
    table = TraceTable().extend(400)
    for t in range(3, 401):
        assert table.weights[t] == pytest.approx(zagier_weight(t), rel=1e-9), t


def test_psi_close_to_x(small_table):
    for x in (1e4, 1e5):
        assert abs(psi(x, small_table) - x) < 3 * x**0.75


def test_residue_classes_partition_psi(small_table):
    for p in (3, 5, 7, 11):
        for x in (1e3, 1e5):
            parts = math.fsum(psi_ap(x, p, a, small_table) for a in range(p))
            assert parts == pytest.approx(psi(x, small_table), rel=1e-14, abs=0)


def test_psi_ap_accepts_any_representative(small_table):
    assert psi_ap(1e4, 5, 7, small_table) == psi_ap(1e4, 5, 2, small_table)
    assert psi_ap(1e4, 5, -3, small_table) == psi_ap(1e4, 5, 2, small_table)


@pytest.mark.parametrize("p", [2, 4, 1, 9])
def test_rejects_bad_modulus(p):
    with pytest.raises(ValueError):
        psi_ap(1e3, p, 0, TraceTable())


def test_p2_message():
    with pytest.raises(ValueError, match="p = 2"):
        predicted_density(2, 0)


def test_zagier_cap():
    with pytest.raises(ValueError):
        psi_ap_zagier(2e7, 3, 0)


def test_traces_in_class():
    assert list(traces_in_class(20, 5, 2)) == [7, 12, 17]
    assert list(traces_in_class(20, 5, 3)) == [3, 8, 13, 18]


def test_pieces_partition_class(small_table):
    for p, a in ((3, 2), (3, 1), (5, 2), (5, 3), (7, 5)):
        t_max = trace_bound(1e5)
        pieces = [t for k in range(1, 12) for t in piece_traces(t_max, p, a, k)]
        assert sorted(pieces) == list(traces_in_class(t_max, p, a))
        total = math.fsum(psi_piece(1e5, p, a, k, table=small_table) for k in range(1, 12))
        assert total == pytest.approx(psi_ap(1e5, p, a, small_table), rel=1e-13)


def test_piece_routes_agree(small_table):
    for k in (1, 2, 3):
        c = psi_piece(1e4, 3, 2, k, route="class", table=small_table)
        z = psi_piece(1e4, 3, 2, k, route="zagier")
        assert c == pytest.approx(z, rel=1e-8)


def test_piece_rejects_other_residue():
    with pytest.raises(ValueError):
        psi_piece(1e4, 5, 1, 1)


@pytest.mark.parametrize("p, a, symbol, density", [
    (5, 1, -1, Fraction(1, 6)),
    (5, 2, 0, Fraction(5, 24)),
    (7, 4, -1, Fraction(1, 8)),
    (3, 0, -1, Fraction(1, 4)),
    (7, 1, 1, Fraction(1, 6)),
])
def test_predicted_density(p, a, symbol, density):
    pred = predicted_density(p, a)
    assert (pred.symbol, pred.density) == (symbol, density)


def test_aggregates_equal_sums():
    for p in (3, 5, 7, 11, 13, 101):
        for symbol in (1, -1, 0):
            members = [predicted_density(p, a).density for a in range(p) if predicted_density(p, a).symbol == symbol]
            assert sum(members, Fraction(0)) == aggregate_density(p, symbol)


def test_piece_coefficient_examples():
    assert predicted_piece_coefficient(3, 1, "odd") == Fraction(2, 9)
    assert predicted_piece_coefficient(3, 1, "even") == Fraction(11, 108)
    assert piece_coefficient(3, 1) == Fraction(2, 9)
    assert piece_coefficient(3, 2) == Fraction(11, 108)
    assert c_p(3) == Fraction(3, 8)


def test_piece_coefficient_rejects():
    with pytest.raises(ValueError):
        predicted_piece_coefficient(3, 0, "odd")
    with pytest.raises(ValueError):
        predicted_piece_coefficient(3, 1, "both")


def test_table_uses_cache(tmp_path):
    path = tmp_path / "r.csv"
    t1 = TraceTable(ClassCache(path)).extend(300)
    cache = ClassCache(path)
    t2 = TraceTable(cache).extend(300)
    assert cache.computed == 0
    assert (t1.weights[:301] == t2.weights[:301]).all()


def test_table_workers_identical():
    a = TraceTable(ClassCache(), workers=1).extend(1500)
    b = TraceTable(ClassCache(), workers=8).extend(1500)
    assert (a.weights[:1501] == b.weights[:1501]).all()
