"""Kronecker symbol, discriminant enumeration, weights, and family sums."""

import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import factorint, jacobi_symbol

from qmoments import arith
from qmoments.charsum import chi_values
from qmoments.errors import ValidationError


def legendre_euler(a: int, p: int) -> int:
    """Euler-criterion oracle for an odd prime p."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


class TestKronecker:
    def test_unit_bottom(self):
        for d in (1, 2, 5, 8, -3, 12):
            assert arith.kronecker(d, 1) == 1

    def test_small_values_against_euler_oracle(self):
        # (5|3) reduces to (2|3); (12|5) reduces to (2|5)
        assert arith.kronecker(5, 3) == legendre_euler(5, 3) == -1
        assert arith.kronecker(12, 5) == legendre_euler(12, 5) == -1

    def test_euler_criterion_all_primes_one_mod_four(self):
        for p in arith.primes_up_to(200).tolist():
            if p % 4 != 1:
                continue
            for n in range(1, p):
                assert arith.kronecker(p, n) == legendre_euler(n, p)

    def test_matches_jacobi_on_odd_bottoms(self):
        rng = np.random.default_rng(7)
        for _ in range(2000):
            a = int(rng.integers(-400, 401))
            n = int(rng.integers(0, 200)) * 2 + 1
            assert arith.kronecker(a, n) == jacobi_symbol(a, n)

    def test_total_on_edge_cases(self):
        assert arith.kronecker(1, 0) == 1
        assert arith.kronecker(-1, 0) == 1
        assert arith.kronecker(5, 0) == 0
        assert arith.kronecker(0, 1) == 1
        assert arith.kronecker(0, 7) == 0
        assert arith.kronecker(6, 2) == 0

    @given(
        st.integers(min_value=-10 ** 6, max_value=10 ** 6),
        st.integers(min_value=1, max_value=10 ** 4),
        st.integers(min_value=1, max_value=10 ** 4),
    )
    @settings(max_examples=300, deadline=None)
    def test_complete_multiplicativity_in_bottom(self, a, m, n):
        assert arith.kronecker(a, m * n) == arith.kronecker(a, m) * arith.kronecker(a, n)

    def test_multiplicativity_over_family(self):
        # chi_d(mn) = chi_d(m) chi_d(n) for all fundamental d <= 500, m, n <= 200
        for d in arith.fundamental_discriminants(500).tolist():
            chi = chi_values(d, 200 * 200)
            small = chi[:201].astype(np.int16)
            outer = np.outer(small[1:], small[1:])
            prods = np.outer(np.arange(1, 201), np.arange(1, 201))
            assert np.array_equal(chi[prods], outer.astype(np.int8))

    def test_periodicity_and_evenness(self):
        for d in arith.fundamental_discriminants(500).tolist():
            chi = chi_values(d, 3 * d)
            base = chi[1 : d + 1]
            assert np.array_equal(chi[d + 1 : 2 * d + 1], base)
            assert np.array_equal(chi[2 * d + 1 : 3 * d + 1], base)
            # chi_d(-1) = 1 for positive d: chi(d - n) == chi(n)
            n = np.arange(1, d)
            assert np.array_equal(chi[d - n], chi[n])

    def test_orthogonality_to_trivial(self):
        for d in arith.fundamental_discriminants(10 ** 4).tolist():
            if d < 5:
                continue
            chi = chi_values(d, d)
            assert int(np.sum(chi, dtype=np.int64)) == 0


class TestFundamental:
    def test_examples(self):
        assert arith.is_fundamental(5)
        assert not arith.is_fundamental(9)
        assert not arith.is_fundamental(4)
        assert arith.is_fundamental(8)
        assert arith.is_fundamental(12)
        assert not arith.is_fundamental(1)
        assert arith.is_fundamental(1, include_unit=True)
        assert not arith.is_fundamental(0)

    def test_enumerate_to_12(self):
        assert [d.d for d in arith.enumerate_fundamental(12)] == [5, 8, 12]

    def test_enumerate_empty(self):
        assert list(arith.enumerate_fundamental(4)) == []

    def test_kind_classification(self):
        kinds = {d.d: d.kind for d in arith.enumerate_fundamental(50)}
        assert kinds[5] is arith.DiscriminantKind.ONE_MOD_FOUR_SQUAREFREE
        assert kinds[8] is arith.DiscriminantKind.FOUR_TIMES_M
        assert kinds[12] is arith.DiscriminantKind.FOUR_TIMES_M
        assert kinds[21] is arith.DiscriminantKind.ONE_MOD_FOUR_SQUAREFREE

    def test_segment_size_invariance(self):
        reference = arith.fundamental_discriminants(3000).tolist()
        for seg in (1, 64, 4096):
            got = [d.d for d in arith.enumerate_fundamental(3000, segment_size=seg)]
            assert got == reference

    def test_against_per_integer_filter(self):
        # independent definition route: trial-division is_fundamental per integer
        direct = [d for d in range(1, 2000) if arith.is_fundamental(d)]
        assert arith.fundamental_discriminants(1999).tolist() == direct

    def test_include_unit_prepends_one(self):
        with_unit = arith.fundamental_discriminants(12, include_unit=True).tolist()
        assert with_unit == [1, 5, 8, 12]

    def test_overflow_guard(self):
        with pytest.raises(ValidationError):
            list(arith.enumerate_fundamental(2 ** 63))

    def test_classify_rejects_non_fundamental(self):
        with pytest.raises(ValidationError):
            arith.classify(9)


class TestRadicalWeight:
    def test_examples(self):
        assert arith.radical_weight(1) == 1
        assert arith.radical_weight(12) == Fraction(1, 2)
        assert arith.radical_weight(30) == Fraction(5, 12)

    def test_against_factorint(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(1, 10 ** 6))
            expected = Fraction(1)
            for p in factorint(n):
                expected *= Fraction(p, p + 1)
            assert arith.radical_weight(n) == expected

    def test_rejects_nonpositive(self):
        with pytest.raises(ValidationError):
            arith.radical_weight(0)


class TestFamilyCharSums:
    def test_n_equal_one_counts_family(self):
        assert arith.char_sum_over_discriminants(1, 1000) == arith.fundamental_count(1000)

    def test_direct_oracle_small(self):
        for n in (1, 2, 3, 4, 5, 9, 12, 25):
            direct = sum(
                arith.kronecker(d, n)
                for d in arith.fundamental_discriminants(400).tolist()
            )
            assert arith.char_sum_over_discriminants(n, 400) == direct

    def test_square_argument_density(self):
        # chi_d(4) = 1 exactly when d is odd; the family mean is kappa * (2/3)
        x = 10 ** 6
        kappa = arith.char_sum_over_discriminants(1, x) / x
        s4 = arith.char_sum_over_discriminants(4, x)
        assert abs(s4 / (x * 2 / 3) - kappa) < 0.02 * kappa

    def test_nonsquare_cancellation(self):
        x = 10 ** 6
        for n in (2, 3):
            s = abs(arith.char_sum_over_discriminants(n, x))
            assert s <= 10 * x ** 0.5 * n ** 0.25 * np.log(n + 1)

    def test_thread_merge_identical(self):
        for w in (1, 2, 8):
            assert (
                arith.char_sum_over_discriminants(3, 10 ** 5, threads=w)
                == arith.char_sum_over_discriminants(3, 10 ** 5, threads=1)
            )

    def test_kappa_between_known_densities(self):
        # positive-only family density: measured, reported, never hard-coded
        x = 10 ** 6
        kappa = arith.char_sum_over_discriminants(1, x) / x
        assert 3 / np.pi ** 2 * 0.99 < kappa < 6 / np.pi ** 2


class TestCacheFile:
    def test_round_trip(self, tmp_path):
        values = arith.fundamental_discriminants(10 ** 4)
        path = tmp_path / "discs.qfd"
        arith.write_discriminant_cache(path, values)
        back = arith.read_discriminant_cache(path)
        assert np.array_equal(back, values)
        raw = path.read_bytes()
        assert raw[:4] == b"QFD1"
        assert int.from_bytes(raw[4:12], "little") == values.size

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.qfd"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(ValidationError):
            arith.read_discriminant_cache(path)

    def test_non_ascending_rejected(self, tmp_path):
        path = tmp_path / "bad.qfd"
        with pytest.raises(ValidationError):
            arith.write_discriminant_cache(path, np.array([5, 5, 8]))
