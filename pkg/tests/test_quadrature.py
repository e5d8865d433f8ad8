"""Quadrature engine: adaptive integration, antiderivative tables."""

from __future__ import annotations

import math

import numpy as np
import pytest

from meanscope.quadrature import (Antiderivative, PanelTable,
                                  QuadratureConfig, QuadratureError,
                                  integrate)


class TestConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.abs_tol == 1e-10 and cfg.rel_tol == 1e-9
        assert cfg.max_subdivisions == 2**15 and cfg.order == 16

    @pytest.mark.parametrize("kwargs", [
        {"abs_tol": 0.0}, {"rel_tol": -1e-3}, {"rule": "simpson"},
        {"max_subdivisions": 0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureConfig(**kwargs)


class TestIntegrate:
    def test_polynomial_exact(self):
        assert integrate(lambda x: x**3, 0, 2) == pytest.approx(4.0, abs=1e-13)

    def test_sine(self):
        assert integrate(np.sin, 0, math.pi) == pytest.approx(2.0, abs=1e-12)

    def test_orientation(self):
        assert integrate(np.cos, math.pi, 0) == pytest.approx(0.0, abs=1e-12)

    def test_indicator_with_breakpoints(self):
        ind = lambda x: np.where((np.asarray(x) >= 0.3)
                                 & (np.asarray(x) < 0.7), 1.0, 0.0)
        v = integrate(ind, 0, 1, breakpoints=[0.3, 0.7])
        assert v == pytest.approx(0.4, abs=1e-14)

    def test_non_convergence_raises(self):
        # square-root kink off any panel edge defeats polynomial rules at
        # every scale, so an unreachable tolerance must surface as an error
        cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-300,
                               max_subdivisions=4)
        with pytest.raises(QuadratureError):
            integrate(lambda x: np.sqrt(np.abs(np.asarray(x) - 1 / 3)),
                      0, 1, cfg)


class TestAntiderivative:
    def test_sine_uniform(self):
        F = Antiderivative(np.sin, 0.0, QuadratureConfig(), ("uniform", 1.0))
        xs = np.array([0.0, 0.5, 3.7, 100.25, 12345.6])
        np.testing.assert_allclose(F(xs), 1 - np.cos(xs), atol=1e-10)

    def test_log_measure_geometric(self):
        F = Antiderivative(lambda x: np.ones_like(np.asarray(x, dtype=float)),
                           1.0, QuadratureConfig(),
                           ("geometric", math.exp(0.125)), mode="log")
        xs = np.array([1.0, 2.0, 1e6, 1e200])
        np.testing.assert_allclose(F(xs), np.log(xs), rtol=1e-12, atol=1e-12)

    def test_piecewise_exact(self, dyadic_log_fn):
        f = dyadic_log_fn
        F = Antiderivative(f.evaluate, 0.0, QuadratureConfig(),
                           ("uniform", 1.0), breakpoints=f.breakpoints,
                           piecewise_constant=True)
        P, L = math.log(4), math.log(2)

        def exact(x):
            k = math.floor(x / P)
            return k * L + min(x - k * P, L)

        # piece integrals are exact; the tiny residual is running-sum
        # rounding over ~1e5 pieces
        for x in (0.31, 5.0, 777.77, 54321.0):
            assert F(x) == pytest.approx(exact(x), abs=1e-6)

    def test_query_order_independence(self):
        cfg = QuadratureConfig()
        F1 = Antiderivative(np.sin, 0.0, cfg, ("uniform", 1.0))
        F2 = Antiderivative(np.sin, 0.0, cfg, ("uniform", 1.0))
        # F1 grows in small steps, F2 jumps straight to the far end
        a = [float(F1(x)) for x in (10.0, 500.0, 2000.0, 10000.0)]
        b = [float(F2(x)) for x in (10000.0, 2000.0, 500.0, 10.0)][::-1]
        assert a == b

    def test_below_origin_rejected(self):
        F = Antiderivative(np.sin, 1.0, QuadratureConfig(),
                           ("geometric", 2.0))
        with pytest.raises(ValueError):
            F(0.5)


class TestPanelTable:
    def test_interpolation_and_integral(self):
        T = PanelTable(np.sin, 0.0, ("uniform", 0.25))
        xs = np.linspace(0.01, 49.9, 1111)
        np.testing.assert_allclose(T(xs), np.sin(xs), atol=1e-12)
        np.testing.assert_allclose(T.integral_to(xs), 1 - np.cos(xs),
                                   atol=1e-12)

    def test_kink_on_panel_edge(self):
        kink = lambda x: np.abs(np.asarray(x, dtype=float) - 2.0)
        T = PanelTable(kink, 0.0, ("uniform", 0.5),
                       breakpoints=lambda lo, hi: np.array(
                           [p for p in (2.0,) if lo < p < hi]))
        xs = np.linspace(0.0, 10.0, 401)
        np.testing.assert_allclose(T(xs), np.abs(xs - 2.0), atol=1e-12)

    def test_lazy_extension(self):
        T = PanelTable(np.cos, 0.0, ("uniform", 0.25))
        first = float(T(3.0))
        T.ensure(200.0)
        assert float(T(3.0)) == first
