import io
import json
import math
import warnings

import numpy as np
import pytest

from sidonlab.bounds import (
    ALPHA,
    BETA,
    BoundCertificate,
    DegenerateChoiceWarning,
    EnvelopeConfig,
    bretche_lower,
    certificate,
    delta_lower,
    delta_upper,
    envelope_sweep,
    log_y_lower_choice,
    lower_envelope,
    regime_coefficient,
    sigma_main_terms,
    thresholds,
    upper_envelope,
    write_sweep_csv,
    y_lower_choice,
    y_upper_choice,
)
from sidonlab.dickman import rho
from sidonlab.dirichlet import l1_norm, random_polynomial, sup_norm
from sidonlab.errors import DomainError

SQ2 = math.sqrt(2)
LOG_XS = np.geomspace(math.log(1e2), 1e6, 10)


def logs(L):
    LL = math.log(L)
    return L, LL, math.log(LL)


class TestConfig:
    def test_defaults(self):
        cfg = EnvelopeConfig()
        assert cfg.alpha == 1 / SQ2 and cfg.beta == 2 * SQ2
        assert cfg.C_lower == cfg.C_upper == 0

    def test_validation(self):
        with pytest.raises(DomainError):
            EnvelopeConfig(alpha=3, beta=2)
        with pytest.raises(DomainError):
            EnvelopeConfig(C_upper=math.inf)


class TestThresholds:
    def test_examples(self):
        M1, M2 = thresholds(log_x=math.e**4)
        assert M1 == pytest.approx(math.sqrt(math.e**4 / 4) / SQ2, rel=1e-14)
        assert M1 == pytest.approx(2.6124, abs=1e-4) and M2 == pytest.approx(10.4497, abs=1e-4)
        assert thresholds(1e8)[0] == pytest.approx(1.7780, abs=1e-4)

    @pytest.mark.parametrize("L", LOG_XS)
    def test_ratio(self, L):
        M1, M2 = thresholds(log_x=L)
        assert M2 / M1 == pytest.approx(4, rel=1e-14) and M1 < M2

    def test_domain(self):
        with pytest.raises(DomainError):
            thresholds(math.e**math.e)
        with pytest.raises(DomainError):
            thresholds(10)


class TestParameterChoices:
    def test_y_upper_degenerate_at_desk_scale(self):
        with pytest.warns(DegenerateChoiceWarning):
            y = y_upper_choice(1e8)
        assert y == pytest.approx(0.8631, abs=1e-4)

    def test_y_upper_huge(self):
        L = 1e6
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            y = y_upper_choice(log_x=L)
        assert y == pytest.approx(math.sqrt(L / math.log(L) ** 3), rel=1e-15)
        assert y == pytest.approx(19.4738, abs=1e-4)

    def test_y_lower(self):
        assert log_y_lower_choice(log_x=100) == pytest.approx(math.sqrt(100 * math.log(100) / 2), rel=1e-15)
        assert log_y_lower_choice(log_x=100) == pytest.approx(15.1743, abs=1e-4)
        assert y_lower_choice(1e8) == pytest.approx(math.exp(math.sqrt(math.log(1e8) * math.log(math.log(1e8)) / 2)))


class TestRegimeArithmetic:
    def test_extremality_on_grid(self):
        g = np.linspace(0.3, 3.5, 3_200_001)
        c = 1 / (2 * g) + g / 4
        i = int(np.argmin(c))
        assert abs(g[i] - SQ2) <= 1e-6
        assert abs(c[i] - 1 / SQ2) <= 1e-12
        assert regime_coefficient(SQ2) == pytest.approx(1 / SQ2, rel=1e-15)

    def test_coefficient_examples(self):
        assert regime_coefficient(1 / SQ2) == pytest.approx(SQ2 / 2 + SQ2 / 8, rel=1e-15)
        assert regime_coefficient(2 * SQ2) == pytest.approx(1 / (4 * SQ2) + SQ2 / 2, rel=1e-15)
        assert regime_coefficient(1 / SQ2) == pytest.approx(0.8839, abs=1e-4)
        with pytest.raises(DomainError):
            regime_coefficient(0)

    def test_boundary_coefficients(self):
        # Sigma_1 main term -log x / (2 M1), Sigma_3 main term -(M2/2) log y
        assert abs(1 / (2 * ALPHA) - 1 / SQ2) <= 1e-12
        assert abs(BETA / 4 - 1 / SQ2) <= 1e-12
        for L in (1e4, 1e6, 1e9):
            L, LL, LLL = logs(L)
            cert = certificate(log_x=L)
            assert not cert.heuristic
            s1 = (cert.sigma1_main - L / 2) / math.sqrt(L * LL)
            s3 = (cert.sigma3_main - L / 2 - 0.75 * BETA * LLL * math.sqrt(L / LL)) / math.sqrt(L * LL)
            assert abs(s1 + 1 / SQ2) <= 1e-12
            assert abs(s3 + 1 / SQ2) <= 1e-12

    @pytest.mark.parametrize("gamma", [ALPHA, 1.0, SQ2, 2.0, BETA])
    @pytest.mark.parametrize("L", [20.0, 1e3, 1e6])
    def test_main_term_split_is_exact(self, gamma, L):
        L, LL, LLL = logs(L)
        m = gamma * math.sqrt(L / LL)
        y = math.sqrt(L / LL**3)
        t1, t2 = sigma_main_terms(log_x=L, gamma=gamma)
        exact = -L / (2 * m) - (m / 2) * math.log(y)
        assert t1 + t2 == pytest.approx(exact, rel=1e-12, abs=1e-12)
        assert t2 == pytest.approx(0.75 * gamma * LLL * math.sqrt(L / LL), rel=1e-14)
        # with an explicit y the split still sums to the exact value
        u1, u2 = sigma_main_terms(log_x=L, gamma=gamma, y=7.0)
        assert u1 + u2 == pytest.approx(-L / (2 * m) - (m / 2) * math.log(7.0), rel=1e-12)

    @pytest.mark.parametrize("L", LOG_XS)
    def test_delta_identity(self, L):
        L, LL, LLL = logs(L)
        scale = math.sqrt(L * LL / 2)
        t1, t2 = sigma_main_terms(log_x=L, gamma=BETA)
        assert abs(t2 / scale - 3 * LLL / LL) <= 1e-12
        assert abs(t2 / scale - delta_upper(log_x=L)) <= 1e-12
        t1, _ = sigma_main_terms(log_x=L, gamma=SQ2)
        assert abs(t1 / scale + 1) <= 1e-12


class TestEnvelopes:
    def test_upper_at_1e8(self):
        L, LL, LLL = logs(math.log(1e8))
        ref = 0.5 * L + (-1 + 3 * LLL / LL) * math.sqrt(L * LL / 2)
        assert upper_envelope(1e8) == pytest.approx(ref, rel=1e-14)

    def test_delta_substitution(self):
        L = math.exp(math.e**2)  # loglog x = e^2, logloglog x = 2
        for C in (0.0, 1.5):
            cfg = EnvelopeConfig(C_upper=C)
            assert delta_upper(log_x=L, cfg=cfg) == pytest.approx(6 / math.e**2 + C / math.e**2, rel=1e-14)

    def test_monotone_in_constant(self):
        vals = [upper_envelope(1e10, EnvelopeConfig(C_upper=c)) for c in (-2, 0, 1, 5)]
        assert vals == sorted(vals)
        vals = [lower_envelope(1e10, EnvelopeConfig(C_lower=c)) for c in (-2, 0, 1, 5)]
        assert vals == sorted(vals)

    def test_lower_formula(self):
        L, LL, LLL = logs(50.0)
        ref = 0.5 * L + (-1 - 0.5 * LLL / LL) * math.sqrt(L * LL / 2)
        assert lower_envelope(log_x=L) == pytest.approx(ref, rel=1e-14)
        assert delta_lower(log_x=L) == pytest.approx(-0.5 * LLL / LL)

    def test_ordering_sweep(self):
        for lx in np.linspace(math.log(1e2), math.log(1e12), 400):
            up = upper_envelope(log_x=lx)
            assert lower_envelope(log_x=lx) <= up
            ly = log_y_lower_choice(log_x=lx)
            assert bretche_lower(log_x=lx, log_y=ly, warn=False) <= up

    def test_huge_x_in_log_space(self):
        assert math.isfinite(upper_envelope(log_x=1e6))
        assert lower_envelope(log_x=1e6) < upper_envelope(log_x=1e6)


class TestRhoEstimate:
    def test_unit_u(self):
        L = 30.0
        # log y = log x: the sqrt factor is sqrt(x) and rho(1) = 1
        ref = 0.5 * (L + math.log(L) - math.log(L)) - L / 2
        assert bretche_lower(log_x=L, log_y=L, warn=False) == pytest.approx(ref, rel=1e-14)

    def test_at_exp_100(self):
        L = 100.0
        ly = log_y_lower_choice(log_x=L)
        u = L / ly
        assert u == pytest.approx(6.59, abs=0.01)
        ref = 0.5 * (L + math.log(ly) - math.log(L)) + 0.5 * math.log(rho(u)) - L / (2 * u)
        assert bretche_lower(log_x=L, log_y=ly) == pytest.approx(ref, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            bretche_lower(1e8, 1.5)
        with pytest.raises(DomainError):
            bretche_lower(1e3, 1e4)
        with pytest.raises(DomainError):
            bretche_lower(log_x=1000.0, log_y=math.log(2), warn=False)  # u > 100

    def test_range_warning(self):
        with pytest.warns(DegenerateChoiceWarning):
            bretche_lower(log_x=200.0, log_y=2.5)


class TestCertificate:
    @pytest.mark.parametrize("L", [5.0, 10.0, 20.0, 100.0, 1e4, 1e6])
    def test_invariants(self, L):
        c = certificate(log_x=L)
        assert c.M1 < c.M2
        assert c.total_log >= max(c.sigma1_log, c.sigma2_log, c.sigma3_log)
        assert c.heuristic == (math.sqrt(L / math.log(L) ** 3) < 2)

    def test_desk_scale_is_heuristic_and_noted(self):
        c = certificate(1000)
        assert c.heuristic and c.y == 2.0
        assert any("clamped" in n for n in c.notes)

    def test_dict_round_trip(self):
        c = certificate(log_x=40.0)
        d = json.loads(json.dumps(c.to_dict()))
        assert BoundCertificate.from_dict(d) == c

    def test_explicit_y(self):
        c = certificate(log_x=1e4, y=3.0)
        assert c.y == 3.0
        with pytest.raises(DomainError):
            certificate(log_x=1e4, y=1.0)

    def test_end_to_end_against_random_polynomials(self, table):
        rng = np.random.default_rng(21)
        for _ in range(25):
            x = int(rng.integers(20, 1001))
            f = random_polynomial(rng, x)
            ratio = l1_norm(f) / sup_norm(f, table).lower
            assert math.log(ratio) <= certificate(x).total_log


def test_sweep_csv():
    rows = envelope_sweep(1e3, 1e12, 5)
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,lower_log,upper_log,bretche_log" and len(lines) == 6
    assert float(lines[1].split(",")[0]) == pytest.approx(1e3)
    with pytest.raises(DomainError):
        envelope_sweep(10, 1e3, 5)


def test_plot(tmp_path):
    pytest.importorskip("matplotlib")
    from sidonlab.bounds import plot_sweep

    out = tmp_path / "sweep.png"
    plot_sweep(envelope_sweep(1e3, 1e9, 10), out)
    assert out.stat().st_size > 1000
