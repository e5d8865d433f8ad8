"""Function-space types, group actions, and the analytic corpus."""

from __future__ import annotations

import math

import numpy as np
import pytest

from meanscope.funcspace import (ConjugationDirection, DomainMismatchError,
                                 DomainTag, SmoothnessHint, UnknownLabelError,
                                 conjugate_W, corpus, corpus_lookup, dilate,
                                 make_function, shift, sup_norm_estimate)

LOG2 = math.log(2.0)
LOG4 = math.log(4.0)


class TestMakeFunction:
    def test_constant(self):
        f = make_function("one", DomainTag.ADDITIVE, lambda x: 1.0, 1.0,
                          SmoothnessHint.SMOOTH)
        assert float(f.evaluate(3.7)) == 1.0

    def test_sine_extremum(self):
        f = make_function("s", DomainTag.ADDITIVE, np.sin, 1.0,
                          SmoothnessHint.SMOOTH)
        assert float(f.evaluate(math.pi / 2)) == 1.0

    def test_decay_at_origin(self):
        f = make_function("d", DomainTag.ADDITIVE,
                          lambda x: 1.0 / (1.0 + x), 1.0)
        assert float(f.evaluate(0.0)) == 1.0

    def test_negative_bound_rejected(self):
        with pytest.raises(ValueError):
            make_function("bad", DomainTag.ADDITIVE, np.sin, -1.0)

    def test_bound_violation_rejected(self):
        with pytest.raises(ValueError):
            make_function("bad", DomainTag.ADDITIVE, np.sin, 0.5)

    def test_deterministic_evaluation(self, sin_fn):
        xs = np.linspace(0, 100, 257)
        a = np.asarray(sin_fn.evaluate(xs))
        b = np.asarray(sin_fn.evaluate(xs))
        assert np.array_equal(a, b)

    def test_scalar_only_evaluator_is_wrapped(self):
        f = make_function("scalar", DomainTag.ADDITIVE,
                          lambda x: math.sin(x), 1.0)
        out = f.evaluate(np.array([0.0, math.pi / 2]))
        np.testing.assert_allclose(out, [0.0, 1.0], atol=1e-15)


class TestShift:
    def test_constant_fixed(self, const_add_fn):
        g = shift(const_add_fn, 5.0)
        assert np.all(np.asarray(g.evaluate(np.linspace(0, 50, 11))) == 1.0)

    def test_sine_antiperiod(self, sin_fn):
        g = shift(sin_fn, math.pi)
        xs = np.linspace(0, 30, 61)
        np.testing.assert_allclose(g.evaluate(xs), -np.sin(xs), atol=1e-12)

    def test_dyadic_log_membership(self, dyadic_log_fn):
        # the indicator set is a union of half-open runs [k log4,
        # k log4 + log2), so the point log2 itself is outside
        g = shift(dyadic_log_fn, LOG2)
        assert float(g.evaluate(0.0)) == float(dyadic_log_fn.evaluate(LOG2))
        assert float(g.evaluate(0.0)) == 0.0

    def test_rejects_multiplicative(self, sinlog_fn):
        with pytest.raises(DomainMismatchError):
            shift(sinlog_fn, 1.0)

    def test_rejects_negative(self, sin_fn):
        with pytest.raises(ValueError):
            shift(sin_fn, -0.5)

    def test_semigroup(self, sin_fn, dyadic_log_fn):
        rng = np.random.default_rng(7)
        xs = rng.uniform(0, 200, 300)
        for f in (sin_fn, dyadic_log_fn):
            lhs = shift(shift(f, 1.25), 2.5)
            rhs = shift(f, 3.75)
            np.testing.assert_allclose(lhs.evaluate(xs), rhs.evaluate(xs),
                                       atol=1e-12)


class TestDilate:
    def test_constant_fixed(self, const_mult_fn):
        g = dilate(const_mult_fn, 10.0)
        assert np.all(np.asarray(g.evaluate(np.geomspace(1, 100, 11))) == 1.0)

    def test_sinlog_log_addition(self, sinlog_fn):
        r = 3.5
        g = dilate(sinlog_fn, r)
        xs = np.geomspace(1, 1e4, 41)
        np.testing.assert_allclose(g.evaluate(xs),
                                   np.sin(np.log(xs) + math.log(r)),
                                   atol=1e-12)

    def test_identity(self, dyadic_fn):
        g = dilate(dyadic_fn, 1.0)
        xs = np.geomspace(1, 1e5, 500)
        assert np.array_equal(np.asarray(g.evaluate(xs)),
                              np.asarray(dyadic_fn.evaluate(xs)))

    def test_rejects_additive(self, sin_fn):
        with pytest.raises(DomainMismatchError):
            dilate(sin_fn, 2.0)

    def test_rejects_small_factor(self, sinlog_fn):
        with pytest.raises(ValueError):
            dilate(sinlog_fn, 0.5)

    def test_semigroup(self, sinlog_fn, dyadic_fn):
        rng = np.random.default_rng(11)
        xs = np.exp(rng.uniform(0, 10, 300))
        for f in (sinlog_fn, dyadic_fn):
            lhs = dilate(dilate(f, 2.0), 3.0)
            rhs = dilate(f, 6.0)
            np.testing.assert_allclose(lhs.evaluate(xs), rhs.evaluate(xs),
                                       atol=1e-12)


class TestConjugation:
    def test_sinlog_becomes_sine(self, sinlog_fn):
        g = conjugate_W(sinlog_fn, ConjugationDirection.TO_ADDITIVE)
        xs = np.linspace(0, 40, 81)
        np.testing.assert_allclose(g.evaluate(xs), np.sin(xs), atol=1e-12)

    def test_constant_fixed(self, const_mult_fn):
        g = conjugate_W(const_mult_fn, ConjugationDirection.TO_ADDITIVE)
        assert np.all(np.asarray(g.evaluate(np.linspace(0, 60, 13))) == 1.0)

    def test_round_trip_dyadic(self, dyadic_fn):
        # grid points avoid set boundaries, where one ulp of exp(log x)
        # could legitimately flip the indicator
        there = conjugate_W(dyadic_fn, ConjugationDirection.TO_ADDITIVE)
        back = conjugate_W(there, ConjugationDirection.TO_MULTIPLICATIVE)
        rng = np.random.default_rng(3)
        xs = np.exp(rng.uniform(0.01, 11, 1000))
        assert np.array_equal(np.asarray(back.evaluate(xs)),
                              np.asarray(dyadic_fn.evaluate(xs)))

    def test_round_trip_smooth(self, sinlog_fn, sin_fn):
        back = conjugate_W(
            conjugate_W(sinlog_fn, ConjugationDirection.TO_ADDITIVE),
            ConjugationDirection.TO_MULTIPLICATIVE)
        xs = np.geomspace(1, 1e6, 1000)
        np.testing.assert_allclose(back.evaluate(xs),
                                   sinlog_fn.evaluate(xs), atol=1e-12)
        back2 = conjugate_W(
            conjugate_W(sin_fn, ConjugationDirection.TO_MULTIPLICATIVE),
            ConjugationDirection.TO_ADDITIVE)
        xs = np.linspace(0, 50, 1000)
        np.testing.assert_allclose(back2.evaluate(xs), np.sin(xs),
                                   atol=1e-12)

    def test_intertwines_dilation_and_shift(self, sinlog_fn, dyadic_fn):
        rng = np.random.default_rng(5)
        xs = rng.uniform(0, 12, 400)
        for f in (sinlog_fn, dyadic_fn):
            for s in (0.5, 2.0):
                lhs = conjugate_W(dilate(f, math.exp(s)),
                                  ConjugationDirection.TO_ADDITIVE)
                rhs = shift(conjugate_W(f, ConjugationDirection.TO_ADDITIVE),
                            s)
                np.testing.assert_allclose(lhs.evaluate(xs),
                                           rhs.evaluate(xs), atol=1e-9)

    def test_rejects_wrong_domain(self, sin_fn, sinlog_fn):
        with pytest.raises(DomainMismatchError):
            conjugate_W(sin_fn, ConjugationDirection.TO_ADDITIVE)
        with pytest.raises(DomainMismatchError):
            conjugate_W(sinlog_fn, ConjugationDirection.TO_MULTIPLICATIVE)


class TestBoundPreservation:
    def test_actions_respect_declared_bound(self, sin_fn, dyadic_fn,
                                            dyadic_log_fn):
        rng = np.random.default_rng(13)
        xs_add = rng.uniform(0, 500, 2000)
        xs_mult = np.exp(rng.uniform(0, 13, 2000))
        for g in (shift(sin_fn, 2.0), shift(dyadic_log_fn, 7.0)):
            assert g.bound == 1.0
            assert np.max(np.abs(np.asarray(g.evaluate(xs_add)))) <= g.bound
        for g in (dilate(dyadic_fn, 4.0),
                  conjugate_W(sin_fn, ConjugationDirection.TO_MULTIPLICATIVE)):
            assert g.bound == 1.0
            assert np.max(np.abs(np.asarray(g.evaluate(xs_mult)))) <= g.bound


class TestCorpus:
    def test_required_labels(self):
        labels = {(e.function.label, e.function.domain) for e in corpus()}
        assert ("const:1", DomainTag.ADDITIVE) in labels
        assert ("const:1", DomainTag.MULTIPLICATIVE) in labels
        for lab, dom in [("sin", DomainTag.ADDITIVE),
                         ("decay", DomainTag.ADDITIVE),
                         ("sinlog", DomainTag.MULTIPLICATIVE),
                         ("dyadic-indicator", DomainTag.MULTIPLICATIVE),
                         ("dyadic-indicator-log", DomainTag.ADDITIVE)]:
            assert (lab, dom) in labels

    def test_dyadic_membership(self, dyadic_fn):
        assert float(dyadic_fn.evaluate(5.0)) == 1.0   # 5 in [4, 8)
        assert float(dyadic_fn.evaluate(2.0)) == 0.0   # boundary is open
        assert float(dyadic_fn.evaluate(1.0)) == 1.0

    def test_sinlog_bound(self):
        assert corpus_lookup("sinlog").function.bound == 1.0

    def test_dyadic_density_oracle(self):
        # running average of the indicator at x = 2*4^K: the measure of
        # the set below is the geometric sum (4^(K+1) - 1)/3
        entry = corpus_lookup("dyadic-indicator")
        assert entry.known_values["upper_M"] == pytest.approx(2.0 / 3.0)
        K = 20
        measure = (4.0 ** (K + 1) - 1.0) / 3.0
        assert measure / (2.0 * 4.0 ** K) == pytest.approx(2.0 / 3.0,
                                                           abs=1e-10)
        assert measure / 4.0 ** (K + 1) == pytest.approx(1.0 / 3.0,
                                                         abs=1e-10)
        assert entry.known_values["lower_M"] == pytest.approx(1.0 / 3.0)

    def test_known_values_carry_notes(self):
        for entry in corpus():
            if entry.known_values:
                assert entry.oracle_note.strip()

    def test_lookup_const_synthesis(self):
        e = corpus_lookup("const:2.5", DomainTag.MULTIPLICATIVE)
        assert float(e.function.evaluate(17.0)) == 2.5
        assert e.known_values["upper_M"] == 2.5

    def test_lookup_ambiguous_and_missing(self):
        with pytest.raises(UnknownLabelError):
            corpus_lookup("const:1")
        with pytest.raises(UnknownLabelError):
            corpus_lookup("no-such-function")

    def test_dyadic_log_matches_conjugated_dyadic(self, dyadic_fn,
                                                  dyadic_log_fn):
        rng = np.random.default_rng(17)
        us = rng.uniform(0.01, 20, 1000)
        img = conjugate_W(dyadic_fn, ConjugationDirection.TO_ADDITIVE)
        assert np.array_equal(np.asarray(img.evaluate(us)),
                              np.asarray(dyadic_log_fn.evaluate(us)))


class TestSupNormEstimate:
    def test_constant(self, const_add_fn):
        assert sup_norm_estimate(const_add_fn, 50.0, 100) == 1.0

    def test_sine_dense_grid(self, sin_fn):
        v = sup_norm_estimate(sin_fn, 100.0, 10**5)
        assert 0.999 <= v <= 1.0

    def test_decay_sup_at_origin(self, decay_fn):
        assert sup_norm_estimate(decay_fn, 100.0, 1000) == 1.0

    def test_rejects_few_samples(self, sin_fn):
        with pytest.raises(ValueError):
            sup_norm_estimate(sin_fn, 10.0, 1)


class TestAlgebra:
    def test_linear_combination(self, sin_fn, decay_fn):
        g = 2.0 * sin_fn - decay_fn
        xs = np.linspace(0, 20, 41)
        np.testing.assert_allclose(g.evaluate(xs),
                                   2 * np.sin(xs) - 1 / (1 + xs), atol=1e-14)
        assert g.bound == pytest.approx(3.0)

    def test_domain_mismatch(self, sin_fn, sinlog_fn):
        with pytest.raises(DomainMismatchError):
            sin_fn + sinlog_fn

    def test_pc_combination_stays_pc(self, dyadic_log_fn):
        g = dyadic_log_fn - shift(dyadic_log_fn, LOG2)
        assert g.piecewise_constant
        assert g.breakpoints is not None
