import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geodesic_ap.quadratic import decompose_discriminant, is_discriminant, is_fundamental
from geodesic_ap.zagier import (
    L1_chi_delta,
    L1_fundamental,
    L1_zagier,
    LocalFactorSpec,
    Lp1_zagier,
    euler_factor_at_p,
    lambda_coefficients,
    lambda_local,
    lambda_q_euler,
    lambda_q_expsum,
    lambda_q_expsum_many,
    lambda_V_p,
    local_spec,
)
from oracles import L1_digamma, kron_direct, lambda_divisor_sum

# frozen from oracles.L1_digamma
L1_ORACLE = {5: 0.43040894096400406, 8: 0.6232252401402305, 12: 0.7603459963009463}
L1_CHI_45 = 0.5738785879520053
L1_CHI_20 = 0.645613411446006


@pytest.mark.parametrize("m, expected", [(0, 1), (1, 0), (2, 3), (3, -3), (4, 3)])
def test_lambda_local_delta45_at_3(m, expected):
    assert lambda_local(LocalFactorSpec(3, 1, -1), m) == expected


def test_local_spec_without_factoring_matches_decomposition():
    for delta in range(5, 3000):
        if not is_discriminant(delta):
            continue
        disc = decompose_discriminant(delta)
        for p in (2, 3, 5, 7, 11):
            assert local_spec(delta, p) == local_spec(disc, p), (delta, p)


@pytest.mark.parametrize("q, delta, expected", [(3, 45, 0), (9, 45, 3), (1, 45, 1), (5, 45, 0)])
def test_lambda_euler_examples(q, delta, expected):
    assert lambda_q_euler(q, delta) == expected
    assert lambda_divisor_sum(q, delta) == expected


def test_lambda_euler_vs_divisor_sum():
    for delta in [d for d in range(5, 400) if is_discriminant(d)]:
        for q in range(1, 200):
            assert lambda_q_euler(q, delta) == lambda_divisor_sum(q, delta), (q, delta)


@settings(max_examples=200)
@given(st.integers(min_value=1, max_value=5000), st.integers(min_value=3, max_value=10**5))
def test_lambda_euler_vs_divisor_sum_traces(q, t):
    assert lambda_q_euler(q, t * t - 4) == lambda_divisor_sum(q, t * t - 4)


@pytest.mark.parametrize("q, t, expected", [(3, 7, 0), (9, 7, 3), (1, 3, 1)])
def test_lambda_expsum_examples(q, t, expected):
    assert lambda_q_expsum(q, t) == expected


def test_lambda_expsum_rejects_bad_input():
    with pytest.raises(ValueError):
        lambda_q_expsum(0, 5)
    with pytest.raises(ValueError):
        lambda_q_expsum_many(3, [2])


def test_lambda_coefficients_match_pointwise():
    for delta in (5, 45, 77, 12 * 49, 3 * 3 * 3 * 4 * 5 + 1):
        lam = lambda_coefficients(delta, 500)
        assert lam[1:].tolist() == [lambda_q_euler(q, delta) for q in range(1, 501)]


@pytest.mark.parametrize("D", [5, 8, 12])
def test_L1_fundamental_examples(D):
    assert L1_fundamental(D) == pytest.approx(L1_ORACLE[D], rel=1e-12)


def test_L1_fundamental_vs_digamma():
    for D in [D for D in range(5, 1500) if is_fundamental(D)]:
        assert L1_fundamental(D) == pytest.approx(L1_digamma(D, lambda a: kron_direct(D, a)), rel=1e-10)


def test_L1_fundamental_rejects():
    with pytest.raises(ValueError):
        L1_fundamental(45)


def test_L1_chi_delta_examples():
    assert L1_chi_delta(45) == pytest.approx(L1_CHI_45, rel=1e-12)
    assert L1_chi_delta(45) == pytest.approx(4 / 3 * L1_ORACLE[5], rel=1e-12)
    # kronecker(5, 2) = -1, so the factor at 2 is 3/2
    assert L1_chi_delta(20) == pytest.approx(L1_CHI_20, rel=1e-12)
    assert L1_chi_delta(20) == pytest.approx(1.5 * L1_ORACLE[5], rel=1e-12)


def test_L1_chi_delta_vs_imprimitive_digamma():
    for delta in [d for d in range(5, 800) if is_discriminant(d)]:
        expected = L1_digamma(delta, lambda a: kron_direct(delta, a))
        assert L1_chi_delta(delta) == pytest.approx(expected, rel=1e-9), delta


def test_L1_zagier_divisor_sum():
    assert L1_zagier(45) == pytest.approx(L1_chi_delta(45) + L1_ORACLE[5] / 3, rel=1e-12)
    assert L1_zagier(5) == pytest.approx(L1_ORACLE[5], rel=1e-12)


@pytest.mark.parametrize("delta, p, expected", [
    (5, 11, 11 / 10),   # chi_5(11) = +1
    (5, 3, 3 / 4),      # chi_5(3) = -1
    (45, 5, 1.0),       # p | D, v = 0
    (5 * 25, 5, 1 + 1 / 5),  # v_p(D) = 1, v_p(l) = 1: (1 - p^-2)/(1 - p^-1)
])
def test_euler_factor(delta, p, expected):
    assert euler_factor_at_p(delta, p) == pytest.approx(expected, rel=1e-14)


def test_euler_factor_pole_guard():
    with pytest.raises(ZeroDivisionError):
        euler_factor_at_p(5, 11, 0.0)


def test_Lp1_examples():
    assert Lp1_zagier(5, 3) == pytest.approx(4 / 3 * L1_ORACLE[5], rel=1e-12)
    assert Lp1_zagier(45, 5) == pytest.approx(L1_zagier(45), rel=1e-14)


def test_lambda_V_converges_to_Lp1():
    target = Lp1_zagier(5, 3)
    errs = [abs(lambda_V_p(5, 3, V) - target) for V in (10, 100, 1000)]
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 3 / math.sqrt(1000)


def test_lambda_V_requires_V_ge_1():
    with pytest.raises(ValueError):
        lambda_V_p(5, 3, 0.5)


def test_lambda_V_deterministic():
    assert lambda_V_p(12 * 49, 5, 321.5) == lambda_V_p(12 * 49, 5, 321.5)


def test_expsum_vectorized_matches_scalar():
    ts = np.arange(3, 60)
    for q in (1, 4, 12, 27, 60):
        assert lambda_q_expsum_many(q, ts).tolist() == [lambda_q_expsum(q, int(t)) for t in ts]
