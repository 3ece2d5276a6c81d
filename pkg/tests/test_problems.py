import json

import numpy as np
import pytest

from accellab.problems import (
    BOUNDED_SET,
    SINGLE_POINT,
    UNBOUNDED_SET,
    ObjectiveOracle,
    catalog_to_json,
    check_cocoercivity,
    check_convexity_inequality,
    check_gradient_fd,
    get_catalog_entry,
    make_counterexample_1d,
    make_quadratic,
    make_segment_argmin_2d,
    random_quadratic,
)


class TestMakeQuadratic:
    def test_identity_case(self):
        o = make_quadratic(np.eye(2), np.zeros(2))
        assert o.lipschitz == 1.0
        assert o.fstar == 0.0
        assert o.argmin_kind == SINGLE_POINT
        np.testing.assert_allclose(o.known_minimizers[0], [0.0, 0.0])
        assert o.value(np.array([1.0, 1.0])) == pytest.approx(1.0)

    def test_nullspace_line(self):
        o = make_quadratic(np.diag([2.0, 0.0]), np.zeros(2))
        assert o.argmin_kind == UNBOUNDED_SET
        assert o.lipschitz == 2.0
        # several distinct minimizers along the nullspace get recorded
        assert len(o.known_minimizers) >= 2
        for z in o.known_minimizers:
            assert o.value(z) == pytest.approx(0.0, abs=1e-14)

    def test_shifted_minimizer(self):
        A = np.diag([3.0, 1.0])
        b = np.array([3.0, 2.0])
        o = make_quadratic(A, b)
        # independent route: solve A x = b and evaluate
        x_star = np.linalg.solve(A, b)
        np.testing.assert_allclose(x_star, [1.0, 2.0], atol=1e-14)
        np.testing.assert_allclose(o.known_minimizers[0], x_star, atol=1e-12)
        assert o.fstar == pytest.approx(-3.5, abs=1e-13)

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            make_quadratic([[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0])

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError, match="semidefinite"):
            make_quadratic(np.diag([1.0, -1.0]), np.zeros(2))

    def test_rejects_inconsistent_b(self):
        with pytest.raises(ValueError, match="unbounded below"):
            make_quadratic(np.diag([2.0, 0.0]), np.array([0.0, 1.0]))

    def test_zero_matrix_needs_explicit_lipschitz(self):
        with pytest.raises(ValueError, match="lipschitz"):
            make_quadratic(np.zeros((2, 2)), np.zeros(2))
        o = make_quadratic(np.zeros((2, 2)), np.zeros(2), lipschitz=1.0)
        assert o.value(np.array([3.0, -4.0])) == 0.0
        np.testing.assert_allclose(o.gradient(np.array([3.0, -4.0])), [0.0, 0.0])

    def test_loose_lipschitz_allowed_tight_rejected(self):
        o = make_quadratic(0.5 * np.eye(2), np.zeros(2), lipschitz=1.0)
        assert o.lipschitz == 1.0
        with pytest.raises(ValueError, match="below the largest eigenvalue"):
            make_quadratic(np.eye(2), np.zeros(2), lipschitz=0.5)

    def test_gap_channel_matches_value(self):
        o = make_quadratic(np.diag([3.0, 1.0]), np.array([3.0, 2.0]))
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.uniform(-5, 5, 2)
            assert o.gap(x) == pytest.approx(o.value(x) - o.fstar, rel=1e-9, abs=1e-12)
            assert o.gap(x) >= 0.0


class TestCounterexampleOracle:
    def test_piecewise_values(self):
        o = make_counterexample_1d()
        assert o.value(2.0) == pytest.approx(0.5)
        assert float(o.gradient(2.0)[0]) == pytest.approx(1.0)
        assert o.value(0.0) == 0.0
        assert float(o.gradient(0.0)[0]) == 0.0
        assert o.value(-3.0) == pytest.approx(2.0)
        assert float(o.gradient(-3.0)[0]) == pytest.approx(-2.0)

    def test_metadata(self):
        o = make_counterexample_1d()
        assert o.lipschitz == 1.0
        assert o.fstar == 0.0
        assert o.argmin_kind == BOUNDED_SET
        got = sorted(float(z[0]) for z in o.known_minimizers)
        assert got == [-1.0, 0.0, 1.0]

    def test_gradient_globally_1_lipschitz(self, rng):
        o = make_counterexample_1d()
        xs = rng.uniform(-10, 10, size=(1000, 2))
        for x, y in xs:
            gx = float(o.gradient([x])[0])
            gy = float(o.gradient([y])[0])
            assert abs(gx - gy) <= abs(x - y) + 1e-12


class TestSegmentArgmin2d:
    def test_values(self):
        o = make_segment_argmin_2d()
        assert o.value(np.array([0.0, 0.0])) == 0.0
        assert o.value(np.array([2.0, 0.0])) == pytest.approx(0.5)
        np.testing.assert_allclose(o.gradient(np.array([2.0, 3.0])), [1.0, 3.0])

    def test_interior_minimizer_accepted(self):
        o = make_segment_argmin_2d()
        assert o.is_minimizer(np.array([0.5, 0.0]))
        assert not o.is_minimizer(np.array([1.5, 0.0]))


class TestInequalitySlacks:
    def test_convexity_trivial_and_derived(self):
        quad = make_quadratic(np.eye(2), np.zeros(2))
        assert check_convexity_inequality(quad, [1.0, 1.0], [1.0, 1.0]) == 0.0
        assert check_convexity_inequality(quad, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(0.5)
        ce = make_counterexample_1d()
        assert check_convexity_inequality(ce, [0.0], [2.0]) == pytest.approx(0.5)

    def test_cocoercivity_trivial_and_equality_cases(self):
        quad = make_quadratic(np.eye(2), np.zeros(2))
        assert check_cocoercivity(quad, [0.5, 0.5], [0.5, 0.5]) == 0.0
        # L-smooth quadratics attain equality
        assert check_cocoercivity(quad, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(0.0, abs=1e-14)
        ce = make_counterexample_1d()
        assert check_cocoercivity(ce, [0.0], [2.0]) == pytest.approx(0.0, abs=1e-14)

    def test_dimension_mismatch_rejected(self):
        quad = make_quadratic(np.eye(2), np.zeros(2))
        with pytest.raises(ValueError):
            check_convexity_inequality(quad, [1.0], [1.0, 0.0])
        with pytest.raises(ValueError):
            check_cocoercivity(quad, [1.0, 0.0], [1.0])

    def test_random_pairs_nonnegative(self, catalog, rng):
        for entry in catalog:
            o = entry.oracle
            for _ in range(1000):
                x = rng.uniform(-10, 10, o.dim)
                y = rng.uniform(-10, 10, o.dim)
                assert check_convexity_inequality(o, x, y) >= -1e-10
                assert check_cocoercivity(o, x, y) >= -1e-10


class TestGradientFiniteDifference:
    def test_quadratic_and_smooth_branch(self):
        quad = make_quadratic(np.eye(2), np.zeros(2))
        assert check_gradient_fd(quad, [1.0, 2.0], 1e-5) <= 1e-9
        ce = make_counterexample_1d()
        assert check_gradient_fd(ce, [3.0], 1e-5) <= 1e-9

    def test_reduced_order_at_seam(self):
        ce = make_counterexample_1d()
        assert check_gradient_fd(ce, [1.0], 1e-5) <= 1e-4

    def test_rejects_nonpositive_h(self):
        quad = make_quadratic(np.eye(2), np.zeros(2))
        with pytest.raises(ValueError):
            check_gradient_fd(quad, [1.0, 0.0], 0.0)

    def test_random_points_catalog(self, catalog, rng):
        h = 1e-5
        for entry in catalog:
            o = entry.oracle
            done = 0
            while done < 100:
                x = rng.uniform(-10, 10, o.dim)
                if entry.id in ("counterexample", "segment2d") and abs(abs(x[0]) - 1.0) <= 10 * h:
                    continue
                assert check_gradient_fd(o, x, h) <= 1e-6
                done += 1


class TestOracleValidation:
    def test_declared_minimizer_must_attain_fstar(self):
        with pytest.raises(ValueError, match="attain"):
            ObjectiveOracle(
                dim=1,
                value=lambda x: float(x[0] ** 2),
                gradient=lambda x: 2.0 * np.asarray(x),
                lipschitz=2.0,
                fstar=0.0,
                argmin_kind=SINGLE_POINT,
                known_minimizers=(np.array([1.0]),),
            )

    def test_gradient_must_vanish_at_minimizer(self):
        with pytest.raises(ValueError, match="vanish"):
            ObjectiveOracle(
                dim=1,
                value=lambda x: float(x[0]),
                gradient=lambda x: np.ones(1),
                lipschitz=1.0,
                fstar=0.0,
                argmin_kind=SINGLE_POINT,
                known_minimizers=(np.array([0.0]),),
            )

    def test_bad_kind_and_dim(self):
        with pytest.raises(ValueError):
            ObjectiveOracle(dim=0, value=lambda x: 0.0, gradient=lambda x: np.zeros(0),
                            lipschitz=1.0, fstar=0.0, argmin_kind=SINGLE_POINT,
                            known_minimizers=())
        with pytest.raises(ValueError):
            ObjectiveOracle(dim=1, value=lambda x: 0.0, gradient=lambda x: np.zeros(1),
                            lipschitz=1.0, fstar=0.0, argmin_kind="everywhere",
                            known_minimizers=())

    def test_minimizers_immutable(self):
        o = make_counterexample_1d()
        with pytest.raises(ValueError):
            o.known_minimizers[0][0] = 5.0


class TestCatalog:
    def test_ids_unique(self, catalog):
        ids = [e.id for e in catalog]
        assert len(ids) == len(set(ids))

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            get_catalog_entry("nope")

    def test_json_export_schema(self):
        from jsonschema import validate

        from accellab._artifacts import SCHEMAS

        doc = catalog_to_json()
        validate(doc, SCHEMAS["catalog"])
        text = json.dumps(doc)
        assert "quad-iso" in text and "counterexample" in text

    def test_json_roundtrip_rebuilds(self):
        for item in catalog_to_json():
            if item["kind"] == "quadratic":
                o = make_quadratic(item["params"]["A"], item["params"]["b"])
                assert o.lipschitz == pytest.approx(item["L"])
                assert o.fstar == pytest.approx(item["fstar"], abs=1e-12)


class TestRandomQuadratic:
    def test_deterministic_and_conditioned(self):
        o1, x1 = random_quadratic(10, seed=3)
        o2, x2 = random_quadratic(10, seed=3)
        np.testing.assert_array_equal(x1, x2)
        assert o1.fstar == o2.fstar
        assert 1e-2 - 1e-9 <= o1.lipschitz <= 1.0 + 1e-9

    def test_lipschitz_is_max_eigenvalue(self):
        o, _ = random_quadratic(8, seed=11)
        # probe the Hessian through gradient differences
        rng = np.random.default_rng(0)
        H = np.empty((8, 8))
        e = np.eye(8)
        g0 = o.gradient(np.zeros(8))
        for i in range(8):
            H[:, i] = o.gradient(e[i]) - g0
        assert o.lipschitz == pytest.approx(float(np.linalg.eigvalsh(0.5 * (H + H.T))[-1]), rel=1e-9)
