import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opbell.errors import DimensionMismatch, DomainViolation, NonSymmetric
from opbell.functions import Exp, Power, PowerOneMinus
from opbell.matcore import (
    Relation,
    apply_function,
    as_symmetric,
    diag,
    identity,
    is_psd,
    loewner_compare,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    spectral_decompose,
    spectrum_in,
)

from conftest import random_sym

SEEDS = st.integers(0, 2**32 - 1)
GOLDEN_A = [[2.0, 1.0], [1.0, 1.0]]


class TestSpectralDecompose:
    def test_identity(self):
        w, q, _ = spectral_decompose(np.eye(2))
        np.testing.assert_array_equal(w, [1.0, 1.0])
        np.testing.assert_allclose(q.T @ q, np.eye(2))

    def test_already_diagonal(self):
        w, q, _ = spectral_decompose(diag([0.2, 0.7]))
        np.testing.assert_array_equal(w, [0.2, 0.7])
        np.testing.assert_array_equal(q, np.eye(2))

    def test_characteristic_polynomial(self):
        w, _, _ = spectral_decompose(GOLDEN_A)
        # roots of x^2 - 3x + 1
        np.testing.assert_allclose(w, [(3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2], rtol=1e-15)

    def test_rejects_asymmetric(self):
        with pytest.raises(NonSymmetric):
            spectral_decompose([[1.0, 0.1], [0.0, 1.0]])

    def test_symmetrizes_rounding_asymmetry(self):
        a = as_symmetric([[1.0, 0.5 + 1e-14], [0.5, 1.0]])
        assert a[0, 1] == a[1, 0]

    def test_dimension_cap(self):
        with pytest.raises(DimensionMismatch):
            spectral_decompose(np.eye(17))

    def test_read_only(self):
        a = as_symmetric(np.eye(2))
        with pytest.raises(ValueError):
            a[0, 0] = 3.0


class TestApplyFunction:
    def test_cube_of_averaged_difference(self):
        out = apply_function([[-0.5, -0.5], [-0.5, 0.5]], Power(3))
        np.testing.assert_allclose(out, [[-0.25, -0.25], [-0.25, 0.25]], atol=1e-15)

    def test_cube_of_one_minus_a(self):
        out = apply_function([[-1.0, -1.0], [-1.0, 0.0]], Power(3))
        np.testing.assert_allclose(out, [[-3.0, -2.0], [-2.0, -1.0]], atol=1e-14)

    @pytest.mark.parametrize("f", [Exp(), Power(0.5), Power(3), PowerOneMinus(-2)])
    def test_identity_maps_to_scalar(self, f):
        if isinstance(f, PowerOneMinus):
            x = 0.5 * np.eye(3)
            np.testing.assert_allclose(apply_function(x, f), f(0.5) * np.eye(3), rtol=1e-15)
        else:
            np.testing.assert_allclose(apply_function(np.eye(3), f), f(1.0) * np.eye(3), rtol=1e-15)

    def test_domain_violation_names_eigenvalue(self):
        with pytest.raises(DomainViolation, match="eigenvalue"):
            apply_function(diag([-0.5, 1.0]), Power(0.5))

    def test_rounding_negative_eigenvalue_is_clipped(self):
        out = apply_function(diag([-1e-14, 4.0]), Power(0.5))
        np.testing.assert_allclose(out, diag([0.0, 2.0]))

    def test_matches_lapack_oracle(self, rng):
        from oracles import eigh_fn

        for _ in range(50):
            a = random_sym(5, rng, 0.1, 3.0)
            np.testing.assert_allclose(apply_function(a, Power(0.5)), eigh_fn(a, np.sqrt), atol=1e-13)
            np.testing.assert_allclose(apply_function(a, Exp()), eigh_fn(a, np.exp), atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(SEEDS)
    def test_power_one_is_identity_twice(self, seed):
        a = random_sym(4, np.random.default_rng(seed), -2, 2)
        out = apply_function(apply_function(a, Power(1)), Power(1))
        assert np.max(np.abs(out - a)) <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(SEEDS)
    def test_commuting_inputs_act_entrywise(self, seed):
        d = np.random.default_rng(seed).uniform(0.01, 3, 5)
        np.testing.assert_allclose(np.diag(apply_function(diag(d), Exp())), np.exp(d), rtol=1e-15)


class TestPsdAndOrder:
    def test_boundary_psd(self):
        assert is_psd(diag([0.0, 1.0]), 1e-9)

    def test_indefinite(self):
        # det = 1.25*0.25 - 0.75^2 < 0
        assert not is_psd([[1.25, 0.75], [0.75, 0.25]], 1e-9)

    def test_negative_identity(self):
        assert not is_psd(-np.eye(3), 0.5)

    def test_compare_equal(self):
        a = random_sym(3, np.random.default_rng(0))
        assert loewner_compare(a, a).relation is Relation.EQUAL

    def test_compare_counterexample_sides(self):
        res = loewner_compare([[-0.25, -0.25], [-0.25, 0.25]], [[-1.5, -1.0], [-1.0, 0.0]], 1e-9)
        assert res.relation is Relation.INCOMPARABLE

    def test_compare_zero_identity(self):
        assert loewner_compare(np.zeros((2, 2)), np.eye(2)).relation is Relation.LESS_EQ
        assert loewner_compare(np.eye(2), np.zeros((2, 2))).relation is Relation.GREATER_EQ

    def test_compare_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            loewner_compare(np.eye(2), np.eye(3))

    def test_tolerance_scales_with_norm(self):
        big = 1e6 * np.eye(2)
        res = loewner_compare(big + 1e-4 * np.eye(2), big, 1e-9)
        assert res.relation is Relation.EQUAL
        assert res.tol == pytest.approx(1e-9 * (1e6 + 1e-4))

    @settings(max_examples=60, deadline=None)
    @given(SEEDS)
    def test_transitivity(self, seed):
        rng = np.random.default_rng(seed)
        a = random_sym(4, rng)
        b = a + random_sym(4, rng, 0, 1)
        c = b + random_sym(4, rng, 0, 1)
        assert loewner_compare(a, b).less_eq and loewner_compare(b, c).less_eq
        assert loewner_compare(a, c, 2e-9).less_eq

    @settings(max_examples=60, deadline=None)
    @given(SEEDS)
    def test_psd_is_congruence_invariant(self, seed):
        rng = np.random.default_rng(seed)
        d = rng.uniform(-0.2, 1, 4)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        x = q.T @ np.diag(d) @ q
        assert is_psd(x, 1e-9) == (d.min() >= -1e-9 * max(1, np.abs(d).max()))


class TestNormAndSpectrum:
    def test_spectrum_endpoints(self):
        assert spectrum_in(diag([0.1, 0.5]), 0.1, 0.5, 0.0)

    def test_spectrum_exceeds(self):
        assert not spectrum_in(GOLDEN_A, 0.0, 1.0, 1e-9)

    def test_point_interval(self):
        assert spectrum_in(identity(3), 1.0, 1.0, 0.0)

    def test_norms(self):
        assert operator_norm(np.eye(2)) == 1.0
        assert operator_norm(diag([-0.3, 0.8])) == 0.8
        assert operator_norm(GOLDEN_A) == pytest.approx((3 + math.sqrt(5)) / 2, rel=1e-15)


def test_json_round_trip():
    a = random_sym(3, np.random.default_rng(5))
    obj = matrix_to_json(a)
    assert obj["n"] == 3
    np.testing.assert_array_equal(matrix_from_json(obj), as_symmetric(a))
    with pytest.raises(DimensionMismatch):
        matrix_from_json({"n": 2, "rows": obj["rows"]})
