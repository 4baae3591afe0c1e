import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochlab import monomials as mono
from blochlab.errors import DomainError, PreconditionError
from blochlab.monomials import CONSTANTS, L

# (j, s_j, ||F_j||_log) from a 40-digit mpmath root solve of g(j, s) = 0.
ORACLE = [
    (2, 0.34868616768628562955, 0.9775448494891467854),
    (3, 0.23327082880629196614, 1.0507878054111630391),
    (5, 0.14364287026002932919, 1.1738424134677224455),
    (10, 0.074929138087936688182, 1.3716126718529780848),
    (11, 0.06850351092461851867, 1.4007159873440108308),
    (50, 0.016230393669771236377, 1.8997790690027543467),
    (100, 0.0083158134358065267243, 2.1421670761489947428),
    (10**4, 0.000090394662851828300739, 3.8109512981479451765),
    (10**6, 9.3325862636657371548e-7, 5.4991758980161243017),
    (10**8, 9.4890591949083954509e-9, 7.1903157364345265642),
    (2**30, 8.8887333967167478819e-10, 8.062513679200364622),
]


def test_constants_closed_form():
    assert L == pytest.approx(0.08976077337316268, rel=1e-15)
    assert CONSTANTS.c_lower_h == pytest.approx(0.041027398672197929, rel=1e-15)
    assert CONSTANTS.c_upper_band == pytest.approx(28.90003166742822, rel=1e-15)
    assert CONSTANTS.ratio_cap == pytest.approx(0.5518191617571635, rel=1e-15)


class TestRSeq:
    def test_values(self):
        assert mono.r_seq(0) == 0.0
        assert mono.r_seq(1) == pytest.approx(1 - L / (1 + L), rel=1e-15)
        assert 1 - mono.r_seq(10**6) < 1e-7

    def test_vector_and_increasing(self):
        r = mono.r_seq(np.arange(0, 1000))
        assert np.all(np.diff(r) > 0) and r[-1] < 1

    def test_negative(self):
        with pytest.raises(DomainError):
            mono.r_seq(-1)


class TestG:
    @pytest.mark.parametrize("j", [2, 11, 1000])
    def test_limit_at_s_one(self, j):
        assert mono.g(j, 1 - 1e-12) == pytest.approx((j - 1) * math.log(3), rel=1e-9)

    def test_limit_at_s_zero(self):
        assert mono.g(11, 1e-300) < -600

    def test_domain(self):
        for s in (0.0, 1.0, -0.5):
            with pytest.raises(DomainError):
                mono.g(11, s)

    @pytest.mark.parametrize("j", [11, 100, 10**4, 10**8])
    def test_increasing_in_s(self, j):
        s = np.geomspace(1e-15, 1 - 1e-9, 1000)
        assert np.all(np.diff(mono.g(j, s)) > 0)


class TestH:
    def test_j1_is_s_log(self):
        t = np.linspace(0.01, 0.99, 9)
        assert np.allclose(mono.H(1, t), (1 - t) * np.log(3 / (1 - t)), rtol=1e-15)

    def test_h_at_r5_above_bound(self):
        assert mono.h(5, mono.r_seq(5)) > CONSTANTS.c_lower_h

    @pytest.mark.parametrize("j", [1, 7, 1000])
    def test_vanishes_at_boundary(self, j):
        # H_j(1 - s) ~ j s log(3/s) as s -> 0
        assert mono.H(j, 1 - 1e-15) < j * 1e-15 * 40

    def test_h_relation(self):
        assert mono.h(9, 0.7) * math.log(10) == pytest.approx(mono.H(9, 0.7), rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            mono.H(3, 1.0)
        with pytest.raises(DomainError):
            mono.H(0, 0.5)


class TestRoot:
    @pytest.mark.parametrize("j,s,_", [o for o in ORACLE if o[0] >= 11])
    def test_against_oracle(self, j, s, _):
        got, res = mono.solve_tj(j)
        assert got == pytest.approx(s, rel=1e-12)
        assert abs(res) <= 1e-10

    def test_small_j_refused(self):
        with pytest.raises(PreconditionError):
            mono.solve_tj(10)

    def test_j_times_s_window(self):
        s, _ = mono.solve_tj(10**4)
        assert 0.88 <= 10**4 * s <= 0.95

    def test_power_near_inverse_e(self):
        s, _ = mono.solve_tj(10**6)
        assert abs(math.exp((10**6 - 1) * math.log1p(-s)) - 1 / math.e) <= 0.05

    @settings(max_examples=60, deadline=None)
    @given(j=st.integers(11, 10**12))
    def test_root_identity(self, j):
        s, res = mono.solve_tj(j)
        assert abs(res) <= 1e-10
        assert j * s == pytest.approx(1 - (1 - s) / math.log(3 / s), rel=1e-9)


class TestNorm:
    @pytest.mark.parametrize("j,s,norm", ORACLE)
    def test_against_oracle(self, j, s, norm):
        rec = mono.monomial_log_norm(j)
        assert rec.norm == pytest.approx(norm, rel=1e-13)
        # the maximum is flat, so the small-j scan pins s less tightly
        assert rec.s_j == pytest.approx(s, rel=1e-6 if j < 11 else 1e-12)

    def test_j1_boundary_record(self):
        rec = mono.monomial_log_norm(1)
        assert rec.norm == math.log(3) and rec.s_j == 1.0 and rec.boundary
        assert rec.t_j == 0.0

    def test_methods(self):
        assert mono.monomial_log_norm(10).method == "global_scan"
        assert mono.monomial_log_norm(11).method == "root_find"
        assert math.isnan(mono.monomial_log_norm(5).residual)

    @pytest.mark.parametrize("j", [0, -3, 2.5])
    def test_bad_j(self, j):
        with pytest.raises(DomainError):
            mono.monomial_log_norm(j)

    def test_vectorized_matches_scalar(self):
        js = np.array([1, 2, 9, 11, 12, 500, 10**5])
        vec = mono.monomial_log_norms(js)
        scalar = [mono.monomial_log_norm(int(j)).norm for j in js]
        assert np.allclose(vec, scalar, rtol=1e-15, atol=0)

    @settings(max_examples=40, deadline=None)
    @given(j=st.integers(2, 5000))
    def test_norm_is_the_max_of_H(self, j):
        rec = mono.monomial_log_norm(j)
        s = np.geomspace(1e-9, 1 - 1e-9, 4001)
        assert np.max(mono._H_s(j, s)) <= rec.norm * (1 + 1e-12)

    def test_asymptotic_ratio(self):
        vals = [math.e * mono.monomial_log_norm(2**k).norm / math.log(2**k + 1) for k in range(4, 31)]
        tail = vals[2:]  # k >= 6
        assert all(b < a for a, b in zip(tail, tail[1:]))
        assert 1.0 <= vals[-1] <= 1.08

    def test_csv_table(self):
        text = mono.norm_table_csv(mono.norm_table([1, 11]))
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["j", "s_j", "norm", "residual", "method"]
        assert rows[1][2] == "1.0986122886681098"
        assert float(rows[2][2]) == mono.monomial_log_norm(11).norm


class TestHBand:
    @pytest.mark.parametrize("j", [1, 2, 3, 10, 11, 57, 400, 1000])
    def test_min_and_decreasing(self, j):
        lo, hi = mono.one_minus_r_seq(j), mono.one_minus_r_seq(j - 1)
        s_band = np.linspace(min(hi, 1 - 1e-16), lo, 1000)
        assert np.min(mono.h_of_s(j, s_band)) >= CONSTANTS.c_lower_h
        s_tail = np.geomspace(min(hi, 1 - 1e-16), 1e-6, 1000)
        assert np.all(np.diff(mono.h_of_s(j, s_tail)) <= 0)


class TestA:
    def test_values(self):
        assert mono.A(1.0) == 1.0
        assert mono.A(2.0) < mono.A(1.0) and mono.A(10.0) < mono.A(2.0)

    def test_limit(self):
        x = np.geomspace(1, 1e8, 1000)
        a = mono.A(x)
        assert np.all(np.diff(a) < 0) and np.all(a > math.exp(-L))
        assert abs(mono.A(1e8) - math.exp(-L)) <= 1e-7

    def test_domain(self):
        with pytest.raises(DomainError):
            mono.A(0.5)

    @settings(max_examples=80, deadline=None)
    @given(x=st.floats(1.0, 1e9), dx=st.floats(1e-3, 1e3))
    def test_monotone_pairs(self, x, dx):
        # far out the true step drops below one ulp of A, so allow rounding
        assert mono.A(x + dx) <= mono.A(x) * (1 + 4 * np.finfo(float).eps)


class TestThreshold:
    def test_ratio_at_one(self):
        assert mono.threshold_ratio(np.array([1]))[0] == pytest.approx(math.log(3) / math.log(2))
        assert mono.threshold_ratio(np.array([1]))[0] > CONSTANTS.ratio_cap

    def test_N_and_stability(self):
        a = mono.find_threshold_N(10_000)
        b = mono.find_threshold_N(20_000)
        assert a.N == b.N == 13
        assert a.max_ratio_in_window < CONSTANTS.ratio_cap
        assert mono.threshold_ratio(np.array([a.N - 1]))[0] >= CONSTANTS.ratio_cap

    def test_denominator_factor_range(self):
        r = mono.threshold_ratio(np.arange(1, 10_001))
        assert r.min() > 1 / math.e - 0.05 and r.max() < math.log(3) / math.log(2) + 0.05
