import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optoent import (DomainError, InvalidParameterError, SystemParams, bogoliubov_transform,
                     build_diffusion, build_drift, build_model, epr_transform, thermal_occupancy)
from optoent.model import (BASIS_LABELS, DEFAULT_BASIS, change_basis, embed_transform, epr_model,
                           symplectic_form)
from optoent.sweep import FIGURE_BASE

OMEGA2 = symplectic_form(2)

rates = st.floats(min_value=1e-3, max_value=50.0)
couplings = st.floats(min_value=0.0, max_value=20.0)


@st.composite
def params_strategy(draw):
    return SystemParams(
        omega_m=draw(rates), gamma_m=draw(st.floats(0, 1.0)), kappa1=draw(rates),
        kappa2=draw(rates), kappa3=draw(rates), g1=draw(couplings), g2=draw(couplings),
        g3=draw(couplings), temperature=draw(st.floats(0, 1000.0)))


class TestThermalOccupancy:
    # frozen from tests/oracles/mp_reference.py (50-digit mpmath, exact SI h and k_B)
    @pytest.mark.parametrize("temperature, expected", [
        (0.3, 624.59870701212909673),
        (300.0, 625098.07369996050173),
    ])
    def test_reference_values(self, temperature, expected):
        assert thermal_occupancy(10.0, temperature) == pytest.approx(expected, rel=1e-12)

    def test_zero_temperature(self):
        assert thermal_occupancy(10.0, 0.0) == 0.0

    def test_series_cross_check(self):
        # n = 1/x - 1/2 + x/12 + ...
        x = 6.62607015e-34 * 10e6 / (1.380649e-23 * 0.3)
        assert thermal_occupancy(10.0, 0.3) == pytest.approx(1 / x - 0.5 + x / 12, rel=1e-9)

    @pytest.mark.parametrize("omega_m", [0.0, -1.0, float("nan")])
    def test_rejects_bad_frequency(self, omega_m):
        with pytest.raises(InvalidParameterError):
            thermal_occupancy(omega_m, 1.0)

    def test_rejects_negative_temperature(self):
        with pytest.raises(InvalidParameterError):
            thermal_occupancy(10.0, -1.0)

    def test_deep_quantum_regime(self):
        assert 0.0 < thermal_occupancy(10.0, 1e-6) < 1e-200
        assert thermal_occupancy(10.0, 1e-9) == 0.0

    @given(st.floats(1e-3, 1e3), st.floats(1e-4, 1e4), st.floats(1.0001, 10.0))
    def test_monotone_in_temperature(self, omega_m, temperature, factor):
        low = thermal_occupancy(omega_m, temperature)
        high = thermal_occupancy(omega_m, temperature * factor)
        assert 0 <= low <= high

    @given(st.floats(1e-3, 1e2))
    def test_high_temperature_limit(self, omega_m):
        # pick T so that x < 1e-6
        x = 1e-7
        temperature = 6.62607015e-34 * omega_m * 1e6 / (1.380649e-23 * x)
        n = thermal_occupancy(omega_m, temperature)
        x_exact = 6.62607015e-34 * omega_m * 1e6 / (1.380649e-23 * temperature)
        assert abs(n - (1 / x_exact - 0.5)) / n < 1e-6


class TestSystemParams:
    @pytest.mark.parametrize("field, value", [
        ("omega_m", 0.0), ("kappa1", 0.0), ("kappa3", -1.0), ("gamma_m", -1e-4),
        ("g1", -0.1), ("g2", -2.0), ("temperature", -0.3), ("g3", float("inf")),
        ("nbar_override", -1.0),
    ])
    def test_rejects_invalid(self, field, value):
        with pytest.raises(InvalidParameterError):
            FIGURE_BASE.replace(**{field: value})

    def test_nbar_override_wins(self):
        assert FIGURE_BASE.replace(nbar_override=100.0).nbar == 100.0
        assert FIGURE_BASE.nbar == pytest.approx(624.598707012129, rel=1e-12)

    def test_immutable(self):
        with pytest.raises(AttributeError):
            FIGURE_BASE.g1 = 3.0


class TestDrift:
    def test_decoupled_limit(self):
        p = FIGURE_BASE.replace(g1=0.0, g2=0.0, g3=0.0)
        a = build_drift(p)
        wm, gm, k, k3 = 10.0, 1e-4, 0.02, 0.5
        expected = np.zeros((8, 8))
        expected[0:2, 0:2] = [[0, wm], [-wm, -gm]]
        expected[2:4, 2:4] = [[-k, wm], [-wm, -k]]
        expected[4:6, 4:6] = [[-k, -wm], [wm, -k]]
        expected[6:8, 6:8] = [[-k3, wm], [-wm, -k3]]
        np.testing.assert_array_equal(a, expected)

    def test_figure2_entries(self):
        a = build_drift(FIGURE_BASE.replace(g2=1.0, g3=0.8))
        ix = {label: i for i, label in enumerate(BASIS_LABELS)}
        assert a[ix["dp"], ix["dX1"]] == 2.0
        assert a[ix["dY1"], ix["dq"]] == 2.0
        assert a[ix["dX2"], ix["dY2"]] == -10.0
        assert a[ix["dp"], ix["dX2"]] == 1.0
        assert a[ix["dp"], ix["dX3"]] == 0.8

    @given(params_strategy())
    @settings(max_examples=50)
    def test_stencil(self, p):
        a = build_drift(p)
        assert a[0, 1] == p.omega_m
        assert np.all(a[0, [0, 2, 3, 4, 5, 6, 7]] == 0)
        mask = np.zeros((8, 8), dtype=bool)
        mask[0, 1] = mask[1, 0] = mask[1, 1] = True
        for b in (2, 4, 6):
            mask[b:b + 2, b:b + 2] = True
            mask[1, b] = True
            mask[b + 1, 0] = True
        assert mask.sum() == 21
        assert np.all(a[~mask] == 0)
        # mode 2 rotates opposite to modes 1 and 3
        assert a[2, 3] == a[6, 7] == -a[4, 5] == p.omega_m


class TestDiffusion:
    def test_reference(self):
        d = build_diffusion(FIGURE_BASE)
        expected = [0, 1e-4 * (2 * 624.59870701212909673 + 1), 0.02, 0.02, 0.02, 0.02, 0.5, 0.5]
        np.testing.assert_allclose(np.diag(d), expected, rtol=1e-12)
        assert np.diag(d)[1] == pytest.approx(0.12502, abs=1e-5)

    def test_zero_temperature_lossless(self):
        d = build_diffusion(FIGURE_BASE.replace(temperature=0.0, gamma_m=0.0))
        np.testing.assert_array_equal(np.diag(d), [0, 0, 0.02, 0.02, 0.02, 0.02, 0.5, 0.5])

    def test_override(self):
        d = build_diffusion(FIGURE_BASE.replace(nbar_override=100.0))
        assert d[1, 1] == pytest.approx(201e-4, rel=1e-14)

    @given(params_strategy())
    @settings(max_examples=50)
    def test_diagonal_nonnegative(self, p):
        d = build_diffusion(p)
        assert np.all(d == np.diag(np.diag(d)))
        assert np.all(np.diag(d) >= 0)
        assert d[0, 0] == 0


class TestBogoliubov:
    def test_identity_when_g2_zero(self):
        s, gt = bogoliubov_transform(2.0, 0.0)
        assert gt == 2.0
        np.testing.assert_array_equal(s[:2, :2], np.eye(2))
        np.testing.assert_array_equal(s[:2, 2:], np.zeros((2, 2)))

    def test_effective_coupling(self):
        _, gt = bogoliubov_transform(2.0, 1.9)
        assert gt == pytest.approx(math.sqrt(4 - 3.61), rel=1e-14)
        assert gt == pytest.approx(0.6245, abs=5e-5)

    @pytest.mark.parametrize("g1, g2", [(2.0, 2.0), (1.0, 2.0)])
    def test_domain_error(self, g1, g2):
        with pytest.raises(DomainError, match="g2 < g1"):
            bogoliubov_transform(g1, g2)

    def test_combinations(self):
        g1, g2 = 2.0, 1.5
        s, gt = bogoliubov_transform(g1, g2)
        np.testing.assert_allclose(s[0], [g1 / gt, 0, g2 / gt, 0])
        np.testing.assert_allclose(s[1], [0, g1 / gt, 0, -g2 / gt])
        np.testing.assert_allclose(s[2], [g2 / gt, 0, g1 / gt, 0])

    @given(st.floats(0.01, 10.0), st.floats(0.0, 0.999))
    def test_symplectic(self, g1, ratio):
        s, _ = bogoliubov_transform(g1, g1 * ratio)
        # normalise by the size of the entries: they grow like 1/sqrt(1 - ratio^2)
        scale = max(1.0, np.abs(s).max() ** 2)
        np.testing.assert_allclose(s @ OMEGA2 @ s.T, OMEGA2, atol=1e-12 * scale)


class TestEPR:
    def test_symplectic_and_orthogonal(self):
        s = epr_transform()
        np.testing.assert_allclose(s @ OMEGA2 @ s.T, OMEGA2, atol=1e-12)
        np.testing.assert_allclose(s @ s.T, np.eye(4), atol=1e-15)

    def test_involution(self):
        s = epr_transform()
        np.testing.assert_allclose(s @ s, np.eye(4), atol=1e-15)

    def test_vacuum_unchanged(self):
        s = epr_transform()
        np.testing.assert_allclose(s @ (0.5 * np.eye(4)) @ s.T, 0.5 * np.eye(4), atol=1e-15)

    def test_correlated_difference_vanishes(self):
        v = np.diag([1.0, 0.5, 1.0, 0.5])
        v[0, 2] = v[2, 0] = 1.0
        w = epr_transform() @ v @ epr_transform().T
        assert w[2, 2] == pytest.approx(0.0, abs=1e-15)

    def test_epr_model_decouples_at_equal_coupling(self):
        m = epr_model(build_model(FIGURE_BASE))
        # dX+ and dY- only see each other
        for row in (2, 5):
            others = [c for c in range(8) if c not in (2, 5)]
            np.testing.assert_allclose(m.drift[row, others], 0.0, atol=1e-15)

    def test_change_basis_rejects_shape(self):
        with pytest.raises(InvalidParameterError):
            change_basis(build_model(FIGURE_BASE), np.eye(4))

    def test_embed_identity_elsewhere(self):
        f = embed_transform(epr_transform())
        np.testing.assert_array_equal(f[:2, :2], np.eye(2))
        np.testing.assert_array_equal(f[6:, 6:], np.eye(2))
        assert DEFAULT_BASIS.dim == 8
