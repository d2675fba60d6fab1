"""Test the grid, the linearized solver and the periodic nonlinear solver"""
import numpy as np
import pytest

from app.errors import ConfigError, SolverError
from app.linear.basic_state import MINUS, P, PLUS, BasicState
from app.linear.operators import PerturbationFields, boundary_operator_apply
from app.physics.eos import ThermoParams
from app.solver.grid import (
    Grid,
    d2_periodic,
    fourth_difference_interior,
    fourth_difference_periodic,
    ssp_rk2_step,
    trapezoid_weights,
)
from app.solver.linearized import KEPT_PER_SIDE, BoundaryClosure, ScenarioConfig, SourceTerms, run_linearized
from app.solver.monitors import DiagnosticsSeries
from app.solver.periodic import PeriodicConfig, planar_data, run_nonlinear_periodic, smooth_planar_data
from app.solver.scenarios import build_basic_state, build_scenario, preset, smooth_ramp, zero_model
from app.data.schema import BasicStateSpec

PARAMS = ThermoParams()


class TestGrid:
    """Grid construction and time step"""

    def test_parse(self):
        """n1xn2 strings"""
        grid = Grid.parse("64x32", L1=10.0, T=1.0)
        assert (grid.n1, grid.n2) == (64, 32)
        assert grid.h1 == pytest.approx(10.0 / 64)
        assert grid.h2 == pytest.approx(1.0 / 32)
        print("✅ grid parsed")

    @pytest.mark.parametrize("spec", ["64", "64x", "ax32", "", "64*32"])
    def test_parse_rejects(self, spec):
        """Malformed grid strings are configuration errors"""
        with pytest.raises(ConfigError):
            Grid.parse(spec, L1=10.0, T=1.0)

    def test_too_small(self):
        with pytest.raises(ConfigError):
            Grid(L1=1.0, n1=2, n2=16, T=1.0)

    def test_cfl_range(self):
        """CFL above 1/2 is refused"""
        with pytest.raises(SolverError):
            Grid(L1=1.0, n1=16, n2=16, T=1.0, cfl=0.6)
        print("✅ CFL bound enforced")

    def test_step_lands_on_final_time(self):
        """n_steps dt = T and dt <= CFL min(h)"""
        grid = Grid(L1=10.0, n1=64, n2=32, T=1.0)
        assert grid.n_steps == 128
        assert grid.n_steps * grid.dt == pytest.approx(1.0, abs=1e-14)
        grid = Grid(L1=1.0, n1=30, n2=30, T=0.7)
        assert grid.dt <= grid.cfl * min(grid.h1, grid.h2) * (1 + 1e-12)
        assert grid.n_steps * grid.dt == pytest.approx(0.7, abs=1e-14)
        print("✅ time step lands on T")

    def test_trapezoid_weights(self):
        w = trapezoid_weights(11, 0.1)
        assert w.sum() == pytest.approx(1.0)
        assert w[0] == w[-1] == pytest.approx(0.05)


class TestStencils:
    """Finite differences and the time stepper"""

    def test_constants_give_zero(self):
        """Dissipation stencils vanish exactly on constants"""
        U = np.full((12, 10, 6), 0.37)
        assert np.all(fourth_difference_periodic(U, axis=1) == 0.0)
        assert np.all(fourth_difference_interior(U, axis=0) == 0.0)
        assert np.all(d2_periodic(U, 0.1, axis=1, order=4) == 0.0)
        print("✅ constants pass through exactly")

    def test_fourth_order_beats_second(self):
        """Order-4 periodic derivative is more accurate on a sine"""
        n = 32
        x = np.arange(n) / n
        f = np.sin(2 * np.pi * x)
        exact = 2 * np.pi * np.cos(2 * np.pi * x)
        e2 = np.max(np.abs(d2_periodic(f, 1.0 / n, order=2) - exact))
        e4 = np.max(np.abs(d2_periodic(f, 1.0 / n, order=4) - exact))
        assert e4 < e2 / 10, f"order 4 error {e4:.3g} vs order 2 {e2:.3g}"
        print(f"✅ errors {e2:.3g} -> {e4:.3g}")

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            d2_periodic(np.zeros(8), 0.1, order=3)

    def test_heun_step(self):
        """One step on y' = -y gives 1 - dt + dt^2/2"""
        dt = 0.1
        (y,) = ssp_rk2_step(lambda t, s: (-s[0],), (np.array([1.0]),), 0.0, dt)
        assert y[0] == pytest.approx(1.0 - dt + 0.5 * dt * dt, abs=1e-15)
        print("✅ Heun step")


class TestBoundaryClosure:
    """Characteristic closure at x1 = 0"""

    def test_imposes_jumps_and_keeps_outgoing(self):
        """The closure imposes the four jumps and preserves the kept combinations"""
        basic = BasicState.constant(PARAMS, 1.0, (0.0, 0.2), (0.8, 0.3), 0.5, -0.5, 8, 12, 10.0)
        closure = BoundaryClosure(basic)
        assert closure.rows.shape == (12, 2 * KEPT_PER_SIDE, 12)
        rng = np.random.default_rng(4)
        provisional = rng.standard_normal((2, 12, 6))
        jumps = rng.standard_normal((4, 12))
        out = closure.apply(provisional, jumps)

        Udot = np.zeros(basic.U.shape)
        Udot[:, 0] = out
        rows = boundary_operator_apply(basic, PerturbationFields(Udot, np.zeros(12)))
        assert np.allclose(rows[:4], jumps, atol=1e-10), "jump conditions not imposed"

        flat = lambda Y: Y.transpose(1, 0, 2).reshape(-1, 12)
        kept_in = np.einsum("nij,nj->ni", closure.rows, flat(provisional))
        kept_out = np.einsum("nij,nj->ni", closure.rows, flat(out))
        assert np.allclose(kept_in, kept_out, atol=1e-10), "outgoing combinations changed"
        print("✅ closure imposes jumps and keeps outgoing data")


class TestLinearizedRuns:
    """End-to-end linearized runs on small grids"""

    def test_zero_source_stays_zero(self):
        """Zero data and zero sources give exactly zero fields"""
        config = build_scenario(zero_model(n1=8, n2=8, T=0.1))
        result = run_linearized(config)
        assert np.all(result.Udot == 0.0)
        assert np.all(result.phi == 0.0)
        assert np.all(result.series.column("I") == 0.0)
        assert result.series.all_finite()
        print(f"✅ zero run: {len(result.series)} records, all zero")

    def test_diagnostics_columns(self):
        """Energy, constraint and boundary monitors are recorded"""
        result = run_linearized(build_scenario(zero_model(n1=8, n2=8, T=0.05)))
        frame = result.series.to_frame()
        for name in ("step", "t", "l2", "I", "jump_HN", "entropy_residual", "rt_term", "boundary_flux", "g6_norm"):
            assert name in frame.columns, f"missing column {name}"
        assert frame["t"].iloc[-1] == pytest.approx(0.05)
        print("✅ diagnostics columns present")

    def test_manufactured_solution_converges(self):
        """Halving h reduces the manufactured-solution error"""
        errors = []
        for n in (16, 32):
            result = run_linearized(build_scenario(preset("mms", n=n, T=0.2)))
            errors.append(float(np.hypot(result.errors["l2_U"], result.errors["l2_phi"])))
        assert errors[1] < errors[0] / 2.5, f"errors {errors}"
        print(f"✅ MMS errors {errors[0]:.3e} -> {errors[1]:.3e}")

    def test_grid_mismatch(self):
        """Basic state and grid must agree"""
        model = zero_model(n1=8, n2=8)
        config = build_scenario(model)
        with pytest.raises(ConfigError):
            ScenarioConfig("bad", config.basic, SourceTerms.zero(config.basic), Grid(10.0, 16, 8, 0.1))
        print("✅ mismatched grid rejected")


class TestScenarios:
    """Scenario construction"""

    def test_smooth_ramp(self):
        assert smooth_ramp(0.0, 0.25) == 0.0
        assert smooth_ramp(0.125, 0.25) == pytest.approx(0.5)
        assert smooth_ramp(1.0, 0.25) == 1.0

    def test_rayleigh_taylor_profile(self):
        """Pressure slope is added on both sides and vanishes far out"""
        grid = Grid(10.0, 20, 8, 0.1)
        spec = BasicStateSpec(kind="rayleigh_taylor", p=PARAMS.pbar, v=[0.0, 0.0], H=[0.8, 0.2])
        basic = build_basic_state(PARAMS, spec, grid)
        assert np.allclose(basic.U[PLUS, ..., P], basic.U[MINUS, ..., P])
        assert np.all(basic.U[:, 0, :, P] == 0.0)
        assert np.allclose(basic.U[:, -1, :, P], 0.0)
        print("✅ Rayleigh-Taylor profile")

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset("tsunami")

    def test_manufactured_sources_vanish_at_start(self):
        """t^2 F is zero at t = 0"""
        config = build_scenario(preset("mms", n=8, T=0.1))
        U_star, phi_star = config.sources.exact(0.0)
        assert np.all(U_star == 0.0) and np.all(phi_star == 0.0)
        assert np.all(config.sources.f(0.0) == 0.0)
        print("✅ manufactured data start from zero")


class TestPeriodicSolver:
    """Nonlinear solver on the torus"""

    def test_uniform_state_unchanged(self):
        """A uniform state is a bitwise fixed point"""
        U0 = planar_data(
            8,
            p=lambda X, Y: np.full(X.shape, 1.0),
            u=lambda X, Y: np.broadcast_to([0.1, 0.05], X.shape + (2,)),
            H=lambda X, Y: np.broadcast_to([0.5, 0.3], X.shape + (2,)),
            S=lambda X, Y: np.full(X.shape, 0.2),
        )
        result = run_nonlinear_periodic(PeriodicConfig(PARAMS, U0, n_steps=5))
        assert np.array_equal(result.U, U0)
        print("✅ uniform state unchanged")

    def test_planar_invariance(self):
        """u3 = H3 = 0 stays exactly zero"""
        result = run_nonlinear_periodic(PeriodicConfig(PARAMS, smooth_planar_data(16), n_steps=10))
        assert result.summary["W_max"] == 0.0
        print("✅ planar data stay planar")

    def test_cadence_thins_records_not_w(self):
        """Records every cadence steps plus the last; W_max still sees every step"""
        U0 = smooth_planar_data(16)
        planar = run_nonlinear_periodic(PeriodicConfig(PARAMS, U0, n_steps=10, cadence=4))
        assert list(planar.series.column("step")) == [0, 4, 8, 10]
        assert planar.summary["W_max"] == 0.0

        U0[..., 3] = 1e-3 * np.sin(2.0 * np.pi * np.arange(16) / 16)[:, None]
        tilted = run_nonlinear_periodic(PeriodicConfig(PARAMS, U0, n_steps=10, cadence=4))
        assert tilted.summary["W_max"] >= tilted.series.max("W_max") > 0.0
        print(f"✅ {len(tilted.series)} records, W_max {tilted.summary['W_max']:.2e}")

    def test_initial_divergence(self):
        """The curl-built initial field is discretely divergence free"""
        result = run_nonlinear_periodic(PeriodicConfig(PARAMS, smooth_planar_data(16), n_steps=2))
        assert result.series.column("div_H")[0] < 1e-12
        assert result.series.all_finite()
        print(f"✅ div H(0) = {result.series.column('div_H')[0]:.2e}")

    def test_pressure_floor(self):
        """Pressure at or below 3 pbar / 4 stops the run"""
        U0 = smooth_planar_data(8)
        U0[..., 0] = 0.5 * PARAMS.pbar
        with pytest.raises(SolverError) as exc:
            run_nonlinear_periodic(PeriodicConfig(PARAMS, U0, n_steps=1))
        assert exc.value.condition == "(5.1')"
        print("✅ pressure floor enforced")

    def test_config_validation(self):
        U0 = smooth_planar_data(8)
        with pytest.raises(ConfigError):
            PeriodicConfig(PARAMS, U0, n_steps=4, T=0.1)
        with pytest.raises(ConfigError):
            PeriodicConfig(PARAMS, U0[:4])
        with pytest.raises(ConfigError):
            PeriodicConfig(PARAMS, U0, n_steps=4, cadence=0)


class TestDiagnosticsSeries:
    """Per-step records"""

    def test_frame_and_max(self):
        series = DiagnosticsSeries()
        series.append({"step": 0, "t": 0.0, "I": 1.0})
        series.append({"step": 1, "t": 0.1, "I": 3.0})
        frame = series.to_frame()
        assert list(frame.columns) == ["step", "t", "I"]
        assert series.max("I") == 3.0
        assert series.last()["t"] == 0.1
        assert series.all_finite()
        series.append({"step": 2, "t": 0.2, "I": float("nan")})
        assert not series.all_finite()
        print("✅ diagnostics series")
