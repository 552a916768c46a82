"""Family moments: exact accumulation, determinism, smoothing, budgets."""

import math

import pytest

from qmoments import arith, charsum, moments
from qmoments.errors import BudgetExceeded, ValidationError


def oracle_moment(X: int, Y: int, k: int) -> tuple[int, int]:
    """Double loop straight from the definition."""
    signed = 0
    absolute = 0
    for d in arith.fundamental_discriminants(X).tolist():
        s = sum(arith.kronecker(d, n) for n in range(1, Y + 1))
        signed += s ** k
        absolute += abs(s) ** k
    return signed, absolute


class TestMoment:
    def test_unit_length_sums(self):
        rec = moments.moment(12, 1, 5)
        assert rec.signed_sum == 3 and rec.abs_sum == 3

    def test_double_loop_oracle(self):
        for X, Y, k in [(100, 2, 2), (100, 5, 3), (500, 7, 4), (300, 11, 1)]:
            signed, absolute = oracle_moment(X, Y, k)
            rec = moments.moment(X, Y, k)
            assert rec.signed_sum == signed
            assert rec.abs_sum == absolute

    def test_even_k_identity(self):
        for k in (2, 4, 6):
            rec = moments.moment(10 ** 4, 7, k)
            assert rec.abs_sum == rec.signed_sum

    def test_abs_dominates_signed(self):
        for k in (1, 3, 5):
            rec = moments.moment(10 ** 4, 9, k)
            assert rec.abs_sum >= abs(rec.signed_sum)

    def test_thread_counts_bit_identical(self):
        recs = [moments.moment(10 ** 5, 13, 3, threads=w) for w in (1, 2, 8)]
        assert len({r.signed_sum for r in recs}) == 1
        assert len({r.abs_sum for r in recs}) == 1

    def test_normalization_fields(self):
        rec = moments.moment(10 ** 4, 16, 2)
        denom = 10 ** 4 * 16.0 * math.log(16.0)
        assert rec.normalized_ratio == pytest.approx(rec.abs_sum / denom)
        assert rec.predicted > 0

    def test_budget_refusal(self):
        with pytest.raises(BudgetExceeded) as exc:
            moments.moment(10 ** 6, 10 ** 6, 2, budget=10 ** 9)
        assert exc.value.estimated_cost == pytest.approx(10 ** 12)

    def test_validation(self):
        with pytest.raises(ValidationError):
            moments.moment(3, 5, 2)
        with pytest.raises(ValidationError):
            moments.moment(100, 0, 2)
        with pytest.raises(ValidationError):
            moments.moment(100, 5, 13)

    def test_ratio_stable_as_x_doubles(self):
        # Y = floor(X^{1/4}): the normalised ratio stays positive and stable
        # when X doubles (tighter for k = 2, looser for the higher moment).
        y = math.floor((10 ** 6) ** 0.25)
        for k, drift_cap in ((2, 0.10), (4, 0.25)):
            a = moments.moment(10 ** 6, y, k).normalized_ratio
            b = moments.moment(2 * 10 ** 6, y, k).normalized_ratio
            assert a > 0 and b > 0
            assert abs(b - a) / a < drift_cap


class TestSmoothed:
    def test_no_support_means_zero(self):
        res = moments.moment_smoothed(10 ** 4, 1, 2)
        assert res.value == 0.0 and res.error_bound == 0.0

    def test_matches_serial_oracle_within_bound(self):
        X, Y, k = 2 * 10 ** 4, 20, 2
        res = moments.moment_smoothed(X, Y, k)
        direct = math.fsum(
            abs(charsum.smoothed_sum(d, Y)) ** k
            for d in arith.fundamental_discriminants(X).tolist()
        )
        assert abs(res.value - direct) <= res.error_bound
        assert res.error_bound < 1e-6 * max(res.value, 1.0)

    def test_monotone_in_x(self):
        lo = moments.moment_smoothed(10 ** 4, 12, 2).value
        hi = moments.moment_smoothed(2 * 10 ** 4, 12, 2).value
        assert hi >= lo

    def test_thread_counts_match(self):
        vals = {
            moments.moment_smoothed(5 * 10 ** 4, 9, 2, threads=w).value
            for w in (1, 2, 8)
        }
        assert len(vals) == 1


class TestRatioScan:
    def test_table_shape_and_constancy(self):
        recs = moments.ratio_scan(2, [(10 ** 4, 4), (2 * 10 ** 4, 4), (4 * 10 ** 4, 4)])
        assert len(recs) == 3
        assert len({r.predicted for r in recs}) == 1
        assert all(r.normalized_ratio > 0 for r in recs)

    def test_csv_round_trip_fields(self):
        recs = moments.ratio_scan(2, [(100, 2)])
        text = moments.records_to_csv(recs)
        header, row = text.strip().splitlines()
        assert header == moments.MOMENT_CSV_HEADER
        fields = row.split(",")
        assert fields[0] == "100" and fields[1] == "2" and fields[2] == "2"
        assert int(fields[3]) == recs[0].signed_sum
