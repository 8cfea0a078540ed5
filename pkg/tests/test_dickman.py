import io
import math

import numpy as np
import pytest

import oracles
from sidonlab.dickman import (
    NODES,
    RhoTable,
    asymptotic_constant,
    log_rho_asymptotic,
    rho,
    rho_table,
    write_rho_csv,
)
from sidonlab.errors import DomainError

# mean node spacing of the integrator
NATIVE_H = rho_table().step / NODES


def delay_grid(lo=1.1, hi=20.0, n=4000, h=NATIVE_H):
    """Grid on [lo, hi] kept 2h away from the integers, where rho'' jumps."""
    u = np.linspace(lo, hi - 2 * h, n)
    return u[np.abs(u - np.round(u)) > 2 * h]


def test_one_on_unit_interval():
    for u in np.linspace(0, 1, 101):
        assert rho(u) == 1.0
    assert rho(0.7) == 1.0
    assert np.all(rho_table().evaluate(np.linspace(0, 1, 50)) == 1.0)


def test_continuous_at_one():
    assert rho(1 + 1e-12) == pytest.approx(1.0, abs=1e-11)


def test_values_against_quadrature():
    r2, r3 = oracles.rho_quad_2_3()
    assert abs(rho(2) - (1 - math.log(2))) <= 1e-12
    assert abs(rho(2) - r2) <= 1e-12
    assert abs(rho(3) - r3) <= 1e-12
    assert rho(3) == pytest.approx(0.0486084, abs=1e-7)


@pytest.mark.parametrize("u", [1.3, 1.9999, 2.0001, 2.75, 3.5, 4.2, 7.0, 9.99, 12.5, 19.3, 20.0])
def test_absolute_accuracy_to_20(u):
    assert abs(rho(u) - float(oracles.rho_taylor(u))) <= 1e-8


@pytest.mark.parametrize("u", [21.5, 27.0, 33.3, 40.01, 45.5, 50.0])
def test_relative_accuracy_to_50(u):
    ref = float(oracles.rho_taylor(u))
    assert abs(rho(u) / ref - 1) <= 1e-6


def test_oracle_matches_on_dense_sample():
    us = np.linspace(1.01, 60, 97)
    got = rho_table().evaluate(us)
    ref = np.array([float(oracles.rho_taylor(u)) for u in us])
    assert np.max(np.abs(got / ref - 1)) < 1e-12


def test_delay_residual():
    t = rho_table()
    u = delay_grid()
    h = NATIVE_H
    drho = (t.evaluate(u + h) - t.evaluate(u - h)) / (2 * h)
    resid = np.abs(u * drho + t.evaluate(u - 1))
    assert resid.max() <= 1e-6


def test_strictly_decreasing():
    v = rho_table().evaluate(np.linspace(1, 50, 20_000))
    assert np.all(np.diff(v) < 0)
    assert np.all(v > 0)


def test_refuses_out_of_range():
    with pytest.raises(DomainError):
        rho(-0.1)
    with pytest.raises(DomainError):
        rho(100.5)
    with pytest.raises(DomainError):
        rho_table().evaluate([1.0, 101.0])


def test_far_tail_is_positive_and_tiny():
    assert 0 < rho(100) < 1e-220
    # rough size from the classical asymptotics
    assert math.log(rho(100)) == pytest.approx(-527.0, abs=2.0)


def test_small_table_is_consistent():
    small = RhoTable(u_max=5)
    u = np.linspace(0, 5, 77)
    assert np.allclose(small.evaluate(u), rho_table().evaluate(u), rtol=1e-13, atol=0)


def test_derivative_is_delay_form():
    t = rho_table()
    for u in (1.5, 2.5, 10.25):
        assert t.derivative(u) == pytest.approx(-rho(u - 1) / u, rel=1e-15)


class TestAsymptotic:
    def test_direct_substitution(self):
        e2 = math.e**2
        assert log_rho_asymptotic(e2) == pytest.approx(-e2 * (2 + math.log(2)), rel=1e-15)
        assert log_rho_asymptotic(10) == pytest.approx(-10 * (math.log(10) + math.log(math.log(10))), rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_rho_asymptotic(math.e)
        with pytest.raises(DomainError):
            log_rho_asymptotic(2.0)

    def test_bracket_at_20(self):
        lr = math.log(rho(20))
        assert log_rho_asymptotic(20, 2.0) <= lr <= log_rho_asymptotic(20, -1.0)

    def test_constant_is_bounded(self):
        C = asymptotic_constant(np.linspace(3, 50, 2000))
        sup = float(np.max(np.abs(C)))
        assert sup <= 2
        # recorded bracket of the fitted constant
        assert -0.85 <= C.min() and C.max() <= -0.18


def test_csv_table():
    buf = io.StringIO()
    write_rho_csv(3, buf, step=0.5)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "u,rho"
    assert len(rows) == 8
    u, r = rows[5].split(",")
    assert float(u) == 2.0 and float(r) == pytest.approx(1 - math.log(2), abs=1e-14)
    with pytest.raises(DomainError):
        write_rho_csv(150, io.StringIO())
