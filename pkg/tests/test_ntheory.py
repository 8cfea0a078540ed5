import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sidonlab.errors import BoundOverflowWarning, DomainError
from sidonlab.ntheory import (
    DESK_GRID,
    balazard_bound,
    calibrate_balazard,
    count_R,
    factor,
    load_or_sieve,
    load_table,
    log_balazard_bound,
    phi_exact,
    rough_count_table,
    save_table,
    sieve_primes,
    smooth_count,
    smooth_count_bound,
    write_count_csv,
)


class TestSieve:
    def test_small(self):
        t = sieve_primes(10)
        assert list(t.primes) == [2, 3, 5, 7]
        assert t.pi() == 4
        assert list(sieve_primes(2).primes) == [2]

    def test_pi_1e4_matches_trial_division(self):
        t = sieve_primes(10_000)
        ref = oracles.primes_trial_division(10_000)
        assert t.pi() == len(ref) == 1229
        assert list(t.primes) == ref

    def test_invariant_primes_are_fixed_points(self, table):
        n = np.arange(2, 5000)
        fixed = n[table.lpf[2:5000] == n]
        assert np.array_equal(fixed, table.primes[table.primes < 5000])

    @pytest.mark.parametrize("bad", [1, 0, -5])
    def test_rejects_small_limit(self, bad):
        with pytest.raises(DomainError):
            sieve_primes(bad)

    def test_cache_round_trip(self, tmp_path):
        t = sieve_primes(5000)
        path = save_table(t, tmp_path)
        assert path.name == "sieve-5000.bin"
        assert np.array_equal(load_table(path).lpf, t.lpf)
        again = load_or_sieve(5000, tmp_path)
        assert np.array_equal(again.lpf, t.lpf)

    def test_corrupt_cache_is_resieved(self, tmp_path):
        (tmp_path / "sieve-100.bin").write_bytes(b"garbage")
        with pytest.warns(UserWarning):
            t = load_or_sieve(100, tmp_path)
        assert t.pi() == 25
        # the bad file was replaced by a good one
        assert load_table(tmp_path / "sieve-100.bin").pi() == 25


class TestFactor:
    def test_twelve(self, table):
        f = factor(12, table)
        assert f.powers == {2: 2, 3: 1}
        assert (f.omega, f.p_plus, f.p_minus) == (3, 3, 2)
        assert f.value() == 12

    def test_one(self, table):
        f = factor(1, table)
        assert f.alpha == () and f.omega == 0
        assert f.p_plus == 1 and f.p_minus == math.inf

    def test_primorial_19(self):
        n = oracles.primorial(19)
        assert n == 9699690
        f = factor(n, sieve_primes(n))
        assert f.omega == 8 and f.squarefree and f.p_plus == 19

    def test_out_of_range(self, table):
        with pytest.raises(DomainError):
            factor(0, table)
        with pytest.raises(DomainError):
            factor(table.limit + 1, table)

    def test_reconstruction_all(self, table):
        n = np.arange(1, table.limit + 1)
        rng = np.random.default_rng(0)
        for v in rng.choice(n, 3000, replace=False):
            f = factor(int(v), table)
            assert f.value() == v
            assert f.powers == oracles.factor_trial_division(int(v))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 316), st.integers(1, 316))
    def test_omega_additive(self, table, a, b):
        assert factor(a * b, table).omega == factor(a, table).omega + factor(b, table).omega

    def test_omega_array_matches_oracle(self, table):
        ref = [oracles.big_omega(n) for n in range(1, 3001)]
        assert table.omega[1:3001].tolist() == ref


class TestRoughCounts:
    def test_examples(self, table):
        assert count_R(30, 2, 2, table) == 4
        t = rough_count_table(30, 2, table, members=True)
        assert t.members[2] == [9, 15, 21, 25]
        assert count_R(30, 29, 1, table) == 0
        assert phi_exact(30, 2, 2, table) == 5
        assert phi_exact(30, 2, 0, table) == 15
        assert phi_exact(30, 2, 5, table) == 0

    @pytest.mark.parametrize("x,y", [(2, 2), (100, 3), (997, 31), (5000, 13)])
    def test_zero_factors_is_one(self, table, x, y):
        assert count_R(x, y, 0, table) == 1

    @pytest.mark.parametrize("y", [2, 3, 5, 7, 11, 13, 97])
    def test_partition_against_gcd_oracle(self, table, y):
        x = 3000
        ref = oracles.rough_count_by_gcd(x, y)
        t = rough_count_table(x, y, table)
        assert t.total() == ref[x]
        for m, c in t.counts.items():
            members = [n for n in range(1, x + 1) if oracles.is_rough(n, y) and oracles.big_omega(n) == m]
            assert c == len(members)

    def test_antitone_in_y(self, table):
        for x in (50, 999, 20_000):
            totals = [rough_count_table(x, y, table).total() for y in (2, 3, 5, 7, 11, 13)]
            assert totals == sorted(totals, reverse=True)

    def test_preconditions(self, table):
        with pytest.raises(DomainError):
            count_R(1, 2, 0, table)
        with pytest.raises(DomainError):
            count_R(30, 2, -1, table)
        with pytest.raises(DomainError):
            phi_exact(table.limit + 1, 2, 0, table)

    def test_csv(self, table):
        import io

        buf = io.StringIO()
        write_count_csv(rough_count_table(30, 2, table).rows(), buf)
        assert buf.getvalue().splitlines() == ["x,y,m,count", "30,2,0,1", "30,2,1,9", "30,2,2,4", "30,2,3,1"]


class TestBalazard:
    def test_direct_value(self):
        # 30/4 * (log 30)^2
        assert balazard_bound(30, 2, 2, 0) == pytest.approx(7.5 * math.log(30) ** 2, rel=1e-14)
        assert balazard_bound(30, 2, 2, 0) == pytest.approx(86.7611, abs=1e-4)

    def test_zero_m_dominates_x(self):
        for x in (10, 1e3, 1e6):
            assert balazard_bound(x, 3, 0, 0) >= x

    def test_overflow_flag(self):
        with pytest.warns(BoundOverflowWarning):
            v = balazard_bound(1e300, 1e4, 0, 1)
        assert v == math.inf
        assert math.isfinite(log_balazard_bound(1e300, 1e4, 0, 1))

    def test_preconditions(self):
        for args in [(1, 2, 0, 0), (30, 1.5, 0, 0), (30, 2, -1, 0), (30, 2, 0, -0.1)]:
            with pytest.raises(DomainError):
                balazard_bound(*args)

    def test_calibration(self, table):
        cal = calibrate_balazard(table)
        assert cal.violations == 0
        assert cal.c_star == 0.02
        assert cal.c_required <= cal.c_star < cal.c_required + 0.01 + 1e-12
        assert phi_exact(10**5, 3, 10, table) <= balazard_bound(1e5, 3, 10, cal.c_star)
        # one notch lower must break somewhere
        from sidonlab.ntheory import _count_violations

        assert _count_violations(table, DESK_GRID["x_max"], DESK_GRID["ys"], DESK_GRID["M_max"], cal.c_star - 0.01) > 0


class TestSmooth:
    def test_examples(self, table):
        assert smooth_count(30, 5, table) == 18
        assert smooth_count(30, 29, table) == 30
        assert smooth_count(30, 2, table) == 5

    def test_bound_examples(self, table):
        assert smooth_count_bound(30, 5, table) == pytest.approx((1 + math.log(30) / math.log(2)) ** 3, rel=1e-14)
        assert smooth_count_bound(30, 5, table) == pytest.approx(206.0994, abs=1e-4)
        assert smooth_count_bound(2, 2, table) == pytest.approx(2.0, rel=1e-14)

    def test_large_bound_in_log_space(self, table):
        from sidonlab.ntheory import log_smooth_count_bound

        lb = log_smooth_count_bound(1e6, 7, table)
        assert lb == pytest.approx(4 * math.log1p(math.log(1e6) / math.log(2)), rel=1e-14)

    def test_smooth_counts_against_oracle(self, table):
        for y in (2, 3, 5, 7, 11):
            ref = sum(1 for n in range(1, 2001) if max(oracles.factor_trial_division(n), default=1) <= y)
            assert smooth_count(2000, y, table) == ref

    def test_domination_and_monotonicity(self, table):
        for x in (DESK_GRID["x_max"], 12345, 999, 30):
            prev = 0
            for y in DESK_GRID["ys"]:
                if y > x:
                    continue
                c = smooth_count(x, y, table)
                assert prev <= c <= smooth_count_bound(x, y, table)
                prev = c

    def test_no_overflow_warnings(self, table):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            smooth_count_bound(1e5, 13, table)
