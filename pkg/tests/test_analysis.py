"""The plateau weight g, the singular double integral, and the Abel bound."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmoments import analysis
from qmoments.errors import ValidationError


class TestG:
    def test_reciprocal_branch(self):
        assert analysis.g(0.5, analysis.GParams(100.0)) == 2.0

    def test_plateau_branch(self):
        assert analysis.g(1e-9, analysis.GParams(100.0)) == 100.0

    def test_loglog_branch(self):
        assert analysis.g(20.0, analysis.GParams(100.0)) == pytest.approx(
            math.log(math.log(20.0))
        )

    def test_boundary_at_ten_takes_loglog(self):
        params = analysis.GParams(100.0)
        assert analysis.g(10.0, params) == pytest.approx(math.log(math.log(10.0)))

    def test_beyond_cap_returns_plateau(self):
        params = analysis.GParams(50.0, exp_cap=1e6)
        assert analysis.g(2e6, params) == 50.0

    def test_branch_points_ordered(self):
        with pytest.raises(ValidationError):
            analysis.GParams(0.05)  # 1/log_x = 20 > 10
        with pytest.raises(ValidationError):
            analysis.GParams(100.0, exp_cap=5.0)

    def test_nonincreasing_on_middle_range(self):
        params = analysis.GParams(1000.0)
        xs = np.linspace(1e-3, 10.0, 500, endpoint=False)
        vals = [analysis.g(float(x), params) for x in xs]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestIntegral:
    def test_positive_and_finite(self):
        res = analysis.integral_I(10.0)
        assert res.value > 0 and math.isfinite(res.value)

    def test_sqrt_log_window(self):
        vals = [analysis.integral_I(L).over_sqrt_log for L in (1e2, 1e4, 1e6)]
        assert max(vals) / min(vals) <= 2.0

    def test_halving_self_consistency(self):
        coarse = analysis.integral_I(10 ** 4, rel_tol=1e-6)
        fine = analysis.integral_I(10 ** 4, rel_tol=5e-7)
        assert abs(coarse.value - fine.value) <= 1e-6 * coarse.value

    def test_empty_region_is_zero(self):
        # artificial cap below 1/log_x empties the domain
        assert analysis.integral_I(2.0, upper=0.4).value == 0.0

    def test_precondition(self):
        with pytest.raises(ValidationError):
            analysis.integral_I(1.0)

    def test_json_fields(self):
        data = analysis.integral_I(100.0).to_dict()
        assert set(data) == {"logX", "I", "I_over_sqrtlog"}


class TestAbelBound:
    def test_alternating_harmonic(self):
        a = [(-1) ** n for n in range(1, 11)]
        b = [1 / n for n in range(1, 11)]
        check = analysis.abel_bound_check(a, b)
        assert check.holds
        assert check.lhs <= check.rhs

    def test_constant_weights(self):
        a = [0.3, -0.7, 0.2, 0.9]
        b = [0.5] * 4
        check = analysis.abel_bound_check(a, b)
        # V = 0, so the bound collapses to M * max |partial sum|
        peak = max(abs(sum(a[: i + 1])) for i in range(len(a)))
        assert check.rhs == pytest.approx(0.5 * peak)
        assert check.holds

    def test_zero_sequence(self):
        check = analysis.abel_bound_check([0.0, 0.0], [1.0, -1.0])
        assert check.lhs == 0.0 and check.holds

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            analysis.abel_bound_check([1.0], [1.0, 2.0])

    @given(
        st.lists(st.floats(min_value=-1, max_value=1), min_size=1, max_size=100),
        st.data(),
    )
    @settings(max_examples=200, deadline=None)
    def test_holds_on_random_data(self, a, data):
        b = data.draw(
            st.lists(
                st.floats(min_value=-1, max_value=1),
                min_size=len(a),
                max_size=len(a),
            )
        )
        assert analysis.abel_bound_check(a, b).holds
