import math

import numpy as np
import pytest

import accellab.ode as O
from accellab.errors import IntegrationError
from accellab.problems import get_catalog_entry, default_start, make_counterexample_1d, make_quadratic
from reference_counterexample import reference_events


class TestTableau:
    def test_matches_reference_runge_kutta_pair(self):
        from scipy.integrate._ivp.rk import RK45

        np.testing.assert_array_equal(O._B, RK45.B)
        np.testing.assert_array_equal(O._C[:6], RK45.C)
        np.testing.assert_array_equal(O._P, RK45.P)
        np.testing.assert_array_equal(O._E, -RK45.E)
        for i in range(1, 6):
            np.testing.assert_array_equal(O._A[i], RK45.A[i][:i])


class TestConfigValidation:
    def test_rejects_bad_parameters(self):
        ok = dict(r=3.0, t0=0.0, x0=[1.0], v0=[0.0], horizon=10.0)
        O.OdeConfig(**ok)
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "r": 0.0})
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "t0": -1.0})
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "r": 2.0})  # t0 = 0 only for r = 3
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "v0": [1.0]})  # resting start required at t0 = 0
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "horizon": -1.0})
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "rel_tol": 2.0})
        with pytest.raises(ValueError):
            O.OdeConfig(**{**ok, "max_steps": 0})
        with pytest.raises(ValueError):
            O.OdeConfig(r=3.0, t0=0.0, x0=[1.0, 2.0], v0=[0.0], horizon=1.0)

    def test_horizon_equal_t0_single_sample(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        cfg = O.OdeConfig(r=3.0, t0=2.0, x0=[1.0, 0.0], v0=[0.1, 0.0], horizon=2.0)
        traj, recs = O.integrate(oracle, cfg, [np.zeros(2)])
        assert len(traj.ts) == 1 and traj.ts[0] == 2.0
        assert len(recs[0]) == 1


class TestFlatRegionClosedForm:
    def test_velocity_power_law(self):
        oracle = make_counterexample_1d()
        cfg = O.OdeConfig(r=1.0, t0=1.0, x0=[0.0], v0=[-0.3], horizon=5.0)
        traj, _ = O.integrate(oracle, cfg, [])
        v_end = float(traj.vs[-1][0])
        exact = -0.3 * (1.0 / 5.0) ** 1.0
        assert abs(v_end - exact) / abs(exact) <= 1e-8
        x_end = float(traj.xs[-1][0])
        assert x_end == pytest.approx(-0.3 * math.log(5.0), abs=1e-9)

    @pytest.mark.parametrize("r", [0.5, 1.0])
    def test_power_law_other_exponents(self, r):
        oracle = make_counterexample_1d()
        cfg = O.OdeConfig(r=r, t0=1.0, x0=[0.0], v0=[-0.1], horizon=4.0)
        traj, _ = O.integrate(oracle, cfg, [])
        exact = -0.1 * (1.0 / 4.0) ** r
        assert float(traj.vs[-1][0]) == pytest.approx(exact, rel=1e-8)


class TestEnergyFunctions:
    def test_r3_examples(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        z = np.zeros(2)
        # t = 0 kills the gap term, leaving ||2 (x - z)||^2 / 2 = 2
        assert O.energy_r3(0.0, [1.0, 0.0], [0.0, 0.0], z, oracle) == pytest.approx(2.0)
        assert O.energy_r3(5.0, z, z, z, oracle) == 0.0
        got = O.energy_r3(1.0, [1.0, 0.0], [-1.0, 0.0], z, oracle)
        assert got == pytest.approx(1.0)  # 0.5 + ||(-1,0)+(2,0)||^2/2

    def test_general_reduces_to_r3(self, rng):
        oracle = make_quadratic(np.diag([2.0, 1.0]), np.array([2.0, 1.0]))
        z = oracle.known_minimizers[0]
        for _ in range(100):
            t = float(rng.uniform(0.1, 50.0))
            x = rng.uniform(-3, 3, 2)
            v = rng.uniform(-3, 3, 2)
            a = O.energy_general(t, x, v, z, 3.0, oracle)
            b = O.energy_r3(t, x, v, z, oracle)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-12)

    def test_general_examples(self):
        oracle = make_quadratic(np.eye(1), np.zeros(1))
        z = np.zeros(1)
        assert O.energy_general(3.0, z, z, z, 2.0, oracle) == 0.0
        got = O.energy_general(1.0, [1.0], [0.0], z, 2.0, oracle)
        assert got == pytest.approx(1.0)  # 1^{-1} (1/2 + ||0 + 1*1||^2/2)
        with pytest.raises(ValueError):
            O.energy_general(0.0, [1.0], [0.0], z, 2.0, oracle)

    def test_F_examples(self):
        oracle = make_quadratic(np.eye(1), np.zeros(1))
        z = np.zeros(1)
        assert O.energy_F(2.0, z, z, z, 1.5, oracle) == 0.0
        got = O.energy_F(1.0, [1.0], [0.0], z, 1.5, oracle)
        assert got == pytest.approx(1.25)  # 0.5 + 0.25 + ||(2r/3)||^2/2 = 0.5+0.25+0.5
        with pytest.raises(ValueError):
            O.energy_F(0.0, [1.0], [0.0], z, 1.5, oracle)
        with pytest.raises(ValueError):
            O.energy_F(1.0, [1.0], [0.0], z, 3.5, oracle)


@pytest.fixture(scope="module")
def quad_run():
    oracle = make_quadratic(np.eye(2), np.zeros(2))
    cfg = O.OdeConfig(r=3.0, t0=0.0, x0=[1.0, 0.0], v0=[0.0, 0.0], horizon=100.0)
    traj, recs = O.integrate(oracle, cfg, [np.zeros(2)])
    return oracle, traj, recs


class TestCriticallyDampedRuns:
    def test_micro_step_start(self, quad_run):
        _, traj, _ = quad_run
        assert traj.ts[0] == 0.0
        assert traj.ts[1] == pytest.approx(1e-6)
        assert np.all(np.diff(traj.ts) > 0)
        assert traj.ts[-1] == 100.0

    def test_energy_monotone(self, quad_run):
        _, _, recs = quad_run
        E = np.array([r.e_z for r in recs[0]])
        assert E[0] == pytest.approx(2.0)
        assert np.all(np.diff(E) <= 1e-8 * max(1.0, E[0]))

    def test_rate_bound_along_trajectory(self, quad_run):
        oracle, traj, recs = quad_run
        E0 = recs[0][0].e_z
        gaps = np.array([oracle.gap(x) for x in traj.xs[1:]])
        assert np.all(gaps <= E0 / traj.ts[1:] ** 2 + 1e-8)

    def test_trajectory_bound(self, quad_run):
        oracle, traj, recs = quad_run
        bound = 0.5 * math.sqrt(2.0 * recs[0][0].e_z) + 1e-6
        assert float(np.max(np.linalg.norm(traj.xs, axis=1))) <= bound

    def test_energy_records_align_with_samples(self, quad_run):
        _, traj, recs = quad_run
        assert len(recs[0]) == len(traj.ts)
        assert all(np.isfinite(r.e_z) and np.isfinite(r.osc) for r in recs[0])
        assert all(r.f_z is None for r in recs[0])  # only defined for r in (1,3)


class TestSubcriticalRuns:
    @pytest.mark.parametrize("r", [1.5, 2.0, 2.5])
    @pytest.mark.parametrize("pid", ["quad-iso", "segment2d", "quad-degenerate"])
    def test_energies_rate_and_growth(self, r, pid):
        entry = get_catalog_entry(pid)
        oracle = entry.oracle
        cfg = O.OdeConfig(r=r, t0=1.0, x0=default_start(pid),
                          v0=np.zeros(oracle.dim), horizon=30.0)
        traj, recs = O.integrate(oracle, cfg, list(oracle.known_minimizers))
        gaps = np.array([oracle.gap(x) for x in traj.xs])
        for j, z in enumerate(oracle.known_minimizers):
            E = np.array([rec.e_z for rec in recs[j]])
            F = np.array([rec.f_z for rec in recs[j]])
            scale_E = 1e-8 * max(1.0, E[0])
            scale_F = 1e-8 * max(1.0, F[0])
            assert np.all(np.diff(E) <= scale_E)
            assert np.all(np.diff(F) <= scale_F)
            assert np.all(gaps <= F[0] / traj.ts ** (2.0 * r / 3.0) + 1e-8)
            dist = np.linalg.norm(traj.xs - z, axis=1)
            first = 3.0 / math.sqrt(r * (3.0 - r)) * math.sqrt(F[0]) * traj.ts ** ((3.0 - r) / 3.0)
            assert np.all(dist <= first + 1e-6)

    def test_second_branch_asymptotic(self):
        entry = get_catalog_entry("quad-degenerate")
        oracle = entry.oracle
        r = 1.5
        cfg = O.OdeConfig(r=r, t0=1.0, x0=default_start("quad-degenerate"),
                          v0=np.zeros(2), horizon=100.0)
        traj, recs = O.integrate(oracle, cfg, [oracle.known_minimizers[0]])
        z = oracle.known_minimizers[0]
        E0 = recs[0][0].e_z
        mask = traj.ts >= 10.0
        dist = np.linalg.norm(traj.xs[mask] - z, axis=1)
        lead = (2.0 * math.sqrt(2.0) / (r + 1.0)) * math.sqrt(E0)
        assert np.all(dist / traj.ts[mask] ** ((3.0 - r) / 2.0) <= 1.1 * lead)


class TestIntegratePreconditions:
    def test_rejects_non_minimizer_z(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        cfg = O.OdeConfig(r=3.0, t0=1.0, x0=[1.0, 0.0], v0=[0.0, 0.0], horizon=2.0)
        with pytest.raises(ValueError, match="not a minimizer"):
            O.integrate(oracle, cfg, [np.array([1.0, 1.0])])

    def test_rejects_dim_mismatch(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        cfg = O.OdeConfig(r=3.0, t0=1.0, x0=[1.0], v0=[0.0], horizon=2.0)
        with pytest.raises(ValueError, match="shape"):
            O.integrate(oracle, cfg, [])

    def test_max_steps_exceeded_with_partial_trajectory(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        cfg = O.OdeConfig(r=3.0, t0=1.0, x0=[1.0, 0.0], v0=[0.0, 0.0],
                          horizon=100.0, max_steps=5)
        with pytest.raises(IntegrationError, match="max_steps") as err:
            O.integrate(oracle, cfg, [])
        partial = err.value.trajectory
        assert partial.ts[0] == 1.0
        assert partial.ts[-1] < 100.0
        assert err.value.at == partial.ts[-1]

    def test_non_finite_start(self):
        oracle = make_counterexample_1d()
        cfg = O.OdeConfig(r=1.0, t0=1.0, x0=[1e200], v0=[0.0], horizon=2.0)
        with pytest.raises(IntegrationError, match="non-finite"):
            O.integrate(oracle, cfg, [])

    def test_events_need_1d(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        cfg = O.OdeConfig(r=3.0, t0=1.0, x0=[2.0, 0.0], v0=[0.0, 0.0], horizon=2.0)
        with pytest.raises(ValueError, match="1-D"):
            O.integrate(oracle, cfg, [], detect_unit_events=True)


_CYCLE = (O.ENTER_FLAT_FROM_RIGHT, O.EXIT_FLAT_LEFT, O.ENTER_FLAT_FROM_LEFT, O.EXIT_FLAT_RIGHT)


class TestDivergentRegime:
    def test_validation(self):
        with pytest.raises(ValueError):
            O.run_counterexample(1.5, 1.0, 10.0)
        with pytest.raises(ValueError):
            O.run_counterexample(1.0, 0.0, 10.0)

    def test_event_pattern_and_bounds(self, counterexample_run_default):
        traj = counterexample_run_default
        events = traj.events
        assert len(events) >= 4
        for i, ev in enumerate(events):
            assert ev.kind == _CYCLE[i % 4]
            assert ev.velocity != 0.0
        assert events[0].velocity < 0.0
        # flat traversal takes at least 2/|entry velocity|
        assert events[1].t - events[0].t >= 2.0 / abs(events[0].velocity)

    def test_event_count_matches_tight_reference(self, counterexample_run_default, golden):
        ref = golden["full"]["counterexample"]
        assert len(counterexample_run_default.events) == ref["event_count"]

    def test_events_match_semianalytic_oracle(self, counterexample_run_default):
        ref = reference_events(200.0)
        events = counterexample_run_default.events
        assert len(events) == len(ref)
        for ev, (t_ref, x_ref, v_ref) in zip(events, ref):
            assert abs(ev.t - t_ref) <= 5e-4
            assert abs(ev.velocity - v_ref) <= 1e-6
            expected_value = 1.0 if ev.kind in (_CYCLE[0], _CYCLE[3]) else -1.0
            assert expected_value == x_ref

    def test_tight_reference_matches_semianalytic_oracle(self):
        traj = O.run_counterexample(1.0, 1.0, 60.0, rel_tol=1e-12, abs_tol=1e-14)
        ref = [e for e in reference_events(60.0)]
        assert len(traj.events) == len(ref)
        for ev, (t_ref, _, v_ref) in zip(traj.events, ref):
            assert abs(ev.t - t_ref) <= 1e-6
            assert abs(ev.velocity - v_ref) <= 1e-8

    def test_oscillator_energy_monotone(self, counterexample_run_default):
        osc = O.oscillator_energy(counterexample_run_default, make_counterexample_1d())
        assert np.all(np.diff(osc) <= 1e-8 * max(1.0, osc[0]))

    def test_sturm_excursions(self, counterexample_run_default):
        rep = O.sturm_excursion_check(counterexample_run_default, 1.0)
        assert rep.passed
        assert rep.max_violation <= 1e-6

    def test_sturm_vacuous_inside(self):
        oracle = make_counterexample_1d()
        cfg = O.OdeConfig(r=1.0, t0=1.0, x0=[0.5], v0=[0.0], horizon=10.0)
        traj, _ = O.integrate(oracle, cfg, [], detect_unit_events=True)
        rep = O.sturm_excursion_check(traj, 1.0)
        assert rep.passed and rep.max_violation == 0.0
        assert "vacuous" in rep.notes

    def test_sturm_flags_synthetic_long_excursion(self):
        ts = np.linspace(0.0, 6.0, 601)
        xs = np.where((ts > 1.0) & (ts < 5.0), 1.5, 0.0).reshape(-1, 1)
        vs = np.zeros_like(xs)
        traj = O.ODETrajectory(ts=ts, xs=xs, vs=vs, events=[], step_stats=O.StepStats())
        rep = O.sturm_excursion_check(traj, 1.0)
        assert not rep.passed
        assert rep.max_violation == pytest.approx(4.0 - math.pi, abs=0.05)


class TestStepControl:
    def test_order_check_halved_tolerances(self):
        oracle = make_quadratic(np.eye(2), np.zeros(2))
        tol = 1e-6
        ends = []
        for t in (tol, tol / 2.0):
            cfg = O.OdeConfig(r=3.0, t0=0.0, x0=[1.0, 0.0], v0=[0.0, 0.0],
                              horizon=50.0, rel_tol=t, abs_tol=t * 1e-3)
            traj, _ = O.integrate(oracle, cfg, [])
            ends.append(traj.xs[-1])
        diff = float(np.linalg.norm(ends[0] - ends[1]))
        assert diff <= 10.0 * tol * max(1.0, float(np.linalg.norm(ends[1])))

    def test_step_stats_recorded(self, counterexample_run_default):
        stats = counterexample_run_default.step_stats
        assert stats.accepted == len(counterexample_run_default.ts) - 1
        assert stats.rejected >= 0
        assert 0 < stats.min_step <= stats.max_step

    def test_tighter_tolerance_reduces_error_against_closed_form(self):
        oracle = make_counterexample_1d()
        errs = []
        for rtol in (1e-6, 1e-9):
            cfg = O.OdeConfig(r=1.0, t0=1.0, x0=[0.0], v0=[-0.3], horizon=5.0,
                              rel_tol=rtol, abs_tol=rtol * 1e-3)
            traj, _ = O.integrate(oracle, cfg, [])
            errs.append(abs(float(traj.xs[-1][0]) + 0.3 * math.log(5.0)))
        assert errs[1] < errs[0]
