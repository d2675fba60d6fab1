"""Test samplers, refinement studies and the property suites"""
import numpy as np
import pytest

from app.errors import PreconditionError
from app.physics.eos import ThermoParams
from app.verification import suites
from app.verification.convergence import (
    MIN_RATIO,
    NormalFieldStudy,
    RefinementStudy,
    divergence_study,
    g6_transport_study,
    gronwall_fit,
    normal_field_study,
    observed_orders,
)
from app.physics.symmetrizer import flux_unknowns
from app.verification.samplers import (
    make_rng,
    sample_contact_points,
    sample_negative_pressure,
    sample_states,
)
from app.verification.suites import SuiteContext, SuiteResult, conservative_flux_mismatch, run_all, run_suite

PARAMS = ThermoParams()


class TestSamplers:
    """Seeded random states"""

    def test_reproducible(self):
        """Same seed, same states"""
        a = sample_states(make_rng(42), 50, PARAMS)
        b = sample_states(make_rng(42), 50, PARAMS)
        assert np.array_equal(a.unknowns(), b.unknowns())
        c = sample_states(make_rng(43), 50, PARAMS)
        assert not np.array_equal(a.unknowns(), c.unknowns())
        print("✅ sampling is reproducible")

    def test_admissible_ranges(self):
        """p >= pbar and |v| below the light-speed margin"""
        batch = sample_states(make_rng(1), 500, PARAMS)
        assert np.all(batch.p >= PARAMS.pbar)
        assert np.all(np.linalg.norm(batch.v, axis=-1) <= 1.0 - PARAMS.nu)
        print("✅ sampled states admissible")

    def test_negative_pressure(self):
        batch = sample_negative_pressure(make_rng(2), 100, PARAMS)
        assert np.all(batch.p < 0.0)

    def test_contact_points(self):
        """Equal p, v, H across the front, entropy jump and dt phi = v_N"""
        pts = sample_contact_points(make_rng(3), 200, PARAMS)
        assert np.array_equal(pts.plus.p, pts.minus.p)
        assert np.array_equal(pts.plus.v, pts.minus.v)
        assert np.array_equal(pts.plus.H, pts.minus.H)
        assert np.all(np.abs(pts.plus.S - pts.minus.S) >= 0.1 - 1e-12)
        HN = pts.plus.H[:, 0] - pts.plus.H[:, 1] * pts.d2phi
        assert np.all(np.abs(HN) >= 1.5 * PARAMS.kappa)
        assert np.allclose(pts.dtphi, pts.plus.v[:, 0] - pts.plus.v[:, 1] * pts.d2phi)
        print("✅ contact points satisfy the contact conditions")


class TestRefinement:
    """Observed orders and ratios"""

    def test_observed_orders(self):
        assert np.allclose(observed_orders([4.0, 1.0, 0.25]), [2.0, 2.0])
        assert np.allclose(observed_orders([1.0, 0.125]), [3.0])

    def test_study_frame(self):
        study = RefinementStudy("demo", [16, 32, 64], [1.0, 0.25, 0.0625])
        assert study.min_order == pytest.approx(2.0)
        assert study.min_ratio == pytest.approx(4.0)
        frame = study.to_frame()
        assert list(frame.columns) == ["n", "error", "order"]
        assert np.isnan(frame["order"].iloc[0])
        print("✅ refinement study table")

    def test_normal_field_decision(self):
        """Lifted run converges, control stays O(1)"""
        lifted = RefinementStudy("lifted", [32, 64], [1e-3, 1e-3 / (MIN_RATIO + 0.5)])
        control = RefinementStudy("control", [32, 64], [0.5, 0.45])
        assert NormalFieldStudy(lifted, control).passed
        assert not NormalFieldStudy(control, control).passed
        print("✅ normal-field decision rule")

    def test_g6_transport_second_order(self):
        """The transported normal-field datum converges at second order"""
        study = g6_transport_study(levels=(32, 64), T=0.5)
        assert study.min_order >= 1.8, f"orders {study.orders}"
        print(f"✅ g6 transport orders {study.orders}")


class TestGronwallFit:
    """Affine fit of log(I + delta)"""

    def test_exponential_growth(self):
        """Pure exponential is a straight line in the log"""
        t = np.linspace(0.0, 1.0, 41)
        fit = gronwall_fit(t, 0.5 * np.exp(2.0 * t), delta=0.0)
        assert fit.slope == pytest.approx(2.0, rel=1e-10)
        assert fit.passed
        print(f"✅ slope {fit.slope:.6f}")

    def test_default_delta(self):
        t = np.linspace(0.0, 1.0, 11)
        I = t ** 2
        fit = gronwall_fit(t, I)
        assert fit.delta == pytest.approx(1.0)

    def test_bump_fails(self):
        """A transient spike exceeds the fitted line"""
        t = np.linspace(0.0, 1.0, 101)
        I = 1.0 + 10.0 * np.exp(-((t - 0.5) / 0.05) ** 2)
        fit = gronwall_fit(t, I, delta=0.0)
        assert not fit.passed
        print(f"✅ bump rejected ({fit.relative_exceedance:.2f} of range)")

    def test_non_finite(self):
        t = np.linspace(0.0, 1.0, 5)
        fit = gronwall_fit(t, [0.0, 1.0, np.nan, 2.0, 3.0])
        assert not fit.finite
        assert not fit.passed

    def test_delta_fraction_widens_range(self):
        """The default offset caps the log range at log 2; a smaller one resolves early growth"""
        t = np.linspace(0.0, 1.0, 51)
        I = 1e-3 * np.exp(6.0 * t)
        default = gronwall_fit(t, I)
        assert default.value_range <= np.log(2.0) + 1e-12
        narrow = gronwall_fit(t, I, delta_fraction=0.01)
        assert narrow.delta == pytest.approx(0.01 * I.max())
        assert narrow.value_range > 3.0 * default.value_range
        print(f"✅ log range {default.value_range:.3f} -> {narrow.value_range:.3f}")

    @pytest.mark.parametrize("fraction", [0.0, -0.5])
    def test_delta_fraction_must_be_positive(self, fraction):
        with pytest.raises(ValueError):
            gronwall_fit(np.linspace(0.0, 1.0, 5), np.ones(5), delta_fraction=fraction)


class TestConservativeFlux:
    """Symmetrized flux matrices against the conservation-law fluxes"""

    def sample(self, seed):
        rng = make_rng(seed)
        U = sample_states(rng, 1, PARAMS).unknowns()[0]
        N = rng.standard_normal(3)
        N /= np.linalg.norm(N)
        dU = rng.standard_normal(8)
        dU[4:7] -= (dU[4:7] @ N) * N
        return U, N, dU

    @pytest.mark.parametrize("seed", [11, 12, 13])
    def test_plane_wave_matches(self, seed):
        U, N, dU = self.sample(seed)
        mismatch = conservative_flux_mismatch(PARAMS, U, N, dU)
        assert mismatch < 1e-6, f"mismatch {mismatch:.3e}"
        print(f"✅ conservative mismatch {mismatch:.2e}")

    def test_perturbed_flux_detected(self, monkeypatch):
        """A wrong G_N no longer matches the conservation laws"""
        U, N, dU = self.sample(11)
        monkeypatch.setattr(
            suites, "flux_unknowns",
            lambda params, W, n: flux_unknowns(params, W, n) + 0.1 * np.eye(8),
        )
        assert conservative_flux_mismatch(PARAMS, U, N, dU) > 1e-3
        print("✅ perturbed flux rejected")

    def test_suite_reports_conservative_error(self, monkeypatch):
        ctx = SuiteContext(PARAMS, seed=7, scale=0.01)
        result = run_suite("flux_decomposition", ctx)
        assert result.passed
        assert result.metrics["conservative_error"] <= 1e-6
        monkeypatch.setattr(
            suites, "flux_unknowns",
            lambda params, W, n: flux_unknowns(params, W, n) * 1.01,
        )
        assert not run_suite("flux_decomposition", ctx).passed


class TestConstraintPropagation:
    """Normal-field jump and div H on small grids"""

    def test_control_dominates_lifted(self):
        """Transported g6 keeps [H_N] at roundoff; the frozen control stays O(1)"""
        study = normal_field_study(levels=(16, 32), T=0.5)
        lifted, control = study.lifted.errors, study.control.errors
        assert max(lifted) < 1e-8, f"lifted {lifted}"
        assert min(control) > 1e-2, f"control {control}"
        assert control[-1] > 100.0 * lifted[-1]
        assert study.passed
        print(f"✅ jump_HN lifted {lifted[-1]:.2e}, control {control[-1]:.3f}")

    def test_divergence_second_order(self):
        study = divergence_study(PARAMS, levels=(32, 64))
        assert study.min_ratio >= MIN_RATIO, f"errors {study.errors}"
        print(f"✅ div H ratio {study.min_ratio:.2f}")

    def test_suite_passes(self):
        ctx = SuiteContext(PARAMS, seed=20240611, levels=(32, 64))
        result = run_suite("constraint_propagation", ctx)
        assert result.passed, f"{result.metrics} {result.message}"
        assert result.metrics["jump_HN_control"] > 10.0 * result.metrics["jump_HN_lifted"]
        print(f"✅ constraint propagation: {result.metrics}")


class TestSuites:
    """Property suites at small sample sizes"""

    ctx = SuiteContext(PARAMS, seed=20240611, scale=0.01)

    @pytest.mark.parametrize("name", [
        "symmetry",
        "flux_decomposition",
        "boundary_signature",
        "kinematics",
        "quadratic_form",
    ])
    def test_algebraic_suite_passes(self, name):
        result = run_suite(name, self.ctx)
        assert result.passed, f"{name}: {result.metrics} {result.message}"
        assert result.elapsed >= 0.0
        print(f"✅ {name}: {result.metrics}")

    def test_zero_source_suite(self):
        result = run_suite("zero_source", self.ctx)
        assert result.passed
        assert result.metrics["linear_max"] == 0.0
        assert result.metrics["periodic_change"] == 0.0
        print("✅ zero-source suite")

    def test_independent_streams(self):
        """Each suite draws from its own jumped stream"""
        a = self.ctx.rng(0).standard_normal(5)
        b = self.ctx.rng(1).standard_normal(5)
        again = self.ctx.rng(0).standard_normal(5)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, again)

    def test_library_error_becomes_failure(self, monkeypatch):
        """A ContactError inside a suite is reported, not raised"""
        def broken(ctx):
            raise PreconditionError("closure singular", condition="(mf.1)")

        monkeypatch.setitem(suites.SUITES, "broken", broken)
        result = run_suite("broken", self.ctx)
        assert not result.passed
        assert "(mf.1)" in result.message
        print("✅ errors are captured")

    def test_run_all_subset(self, monkeypatch):
        monkeypatch.setitem(suites.SUITES, "ok", lambda ctx: SuiteResult("ok", True))
        results = run_all(self.ctx, ["ok", "ok"])
        assert [r.passed for r in results] == [True, True]
        assert results[0].to_dict()["name"] == "ok"
