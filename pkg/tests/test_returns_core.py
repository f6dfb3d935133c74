import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smclab import (
    ReturnSeries,
    compound_return,
    geometric_mean_return,
    leveraged_daily_compound,
    log_returns,
)
from smclab.errors import DomainError, InvalidInputError

returns_lists = st.lists(
    st.floats(min_value=-0.9, max_value=1.0, allow_nan=False), min_size=1, max_size=40
)


class TestCompoundReturn:
    def test_loss_then_gain(self):
        assert compound_return([-0.01, 0.01]) == pytest.approx(-0.0001, rel=1e-12)

    def test_zeros(self):
        assert compound_return([0.0, 0.0, 0.0]) == 0.0

    def test_two_gains(self):
        assert compound_return([0.01, 0.01]) == pytest.approx(0.0201, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            compound_return([])

    def test_floor_rejected(self):
        with pytest.raises(DomainError):
            compound_return([0.01, -1.0])

    @given(returns_lists.flatmap(lambda xs: st.tuples(st.just(xs), st.permutations(xs))))
    def test_permutation_invariant_exactly(self, pair):
        xs, ys = pair
        assert compound_return(xs) == compound_return(ys)

    def test_result_above_floor(self):
        assert compound_return([-0.5] * 50) > -1.0


class TestGeometricMeanReturn:
    def test_hand_value(self):
        assert geometric_mean_return(0.21, 2) == pytest.approx(0.1, rel=1e-12)

    def test_zero_total(self):
        assert geometric_mean_return(0.0, 252) == 0.0

    def test_worked_value(self):
        # (1.35)^(1/252) - 1 to full double precision
        assert geometric_mean_return(0.35, 252) == pytest.approx(0.0011916006318, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            geometric_mean_return(-1.0, 10)
        with pytest.raises(InvalidInputError):
            geometric_mean_return(0.1, 0)

    @settings(max_examples=200)
    @given(
        total=st.floats(min_value=-0.999, max_value=10.0, allow_nan=False),
        p=st.integers(min_value=1, max_value=500),
    )
    def test_round_trip(self, total, p):
        daily = geometric_mean_return(total, p)
        assert compound_return([daily] * p) == pytest.approx(total, rel=1e-12, abs=1e-12)


class TestLogReturns:
    def test_zero(self):
        assert log_returns([0.0]).tolist() == [0.0]

    def test_inverse_of_exp(self):
        assert log_returns([math.expm1(0.1)])[0] == pytest.approx(0.1, rel=1e-14)

    def test_half_loss(self):
        assert log_returns([-0.5])[0] == pytest.approx(-0.6931471805599453, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_returns([-1.0])


class TestLeveragedDailyCompound:
    def test_two_gains_at_2x(self):
        assert leveraged_daily_compound([0.01, 0.01], 2.0) == pytest.approx(0.0404, rel=1e-12)

    def test_wipeout_censored(self):
        assert leveraged_daily_compound([-0.40], 3.0) == -1.0

    def test_wipeout_is_absorbing(self):
        assert leveraged_daily_compound([-0.40, 0.5, 0.5], 3.0) == -1.0

    def test_beta_one_matches_compound_exactly(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            r = rng.uniform(-0.2, 0.2, rng.integers(1, 60))
            assert leveraged_daily_compound(r, 1.0) == compound_return(r)

    @given(returns_lists, st.sampled_from([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]))
    def test_never_below_floor(self, xs, beta):
        assert leveraged_daily_compound(xs, beta) >= -1.0

    @given(returns_lists.flatmap(lambda xs: st.tuples(st.just(xs), st.permutations(xs))))
    def test_permutation_invariant_exactly(self, pair):
        xs, ys = pair
        assert leveraged_daily_compound(xs, 3.0) == leveraged_daily_compound(ys, 3.0)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            leveraged_daily_compound([], 2.0)


class TestReturnSeries:
    def test_valid(self):
        s = ReturnSeries("X", (dt.date(2020, 1, 2), dt.date(2020, 1, 3)), np.array([0.01, -0.02]))
        assert len(s) == 2
        assert not s.returns.flags.writeable

    def test_dates_must_increase(self):
        d = dt.date(2020, 1, 2)
        with pytest.raises(InvalidInputError):
            ReturnSeries("X", (d, d), np.array([0.0, 0.0]))

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            ReturnSeries("X", (dt.date(2020, 1, 2),), np.array([0.0, 0.0]))

    def test_floor_rejected_at_construction(self):
        with pytest.raises(DomainError):
            ReturnSeries("X", (dt.date(2020, 1, 2),), np.array([-1.0]))

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            ReturnSeries("X", (), np.array([]))
