"""Test jump conditions, classification and the contact reduction"""
import numpy as np
import pytest

from app.errors import CausalityError
from app.physics.eos import ThermoParams
from app.physics.jumps import (
    DiscontinuityClass,
    FrontGeometry,
    classify,
    contact_partner,
    contact_reduction_check,
    decide_class,
    flux_residuals,
    flux_residuals_projected,
    mass_flux,
    rh_partner,
    rh_residuals,
    rotate_planar,
)
from app.physics.kinematics import PrimitiveState
from app.verification.samplers import make_rng, perturb, sample_states

PARAMS = ThermoParams()
LEFT = PrimitiveState(p=1.0, v=(0.2, -0.1), H=(0.9, 0.4), S=-0.3)


class TestMassFlux:
    """j = rho Gamma (v.n - sigma)"""
    
    def test_comoving(self):
        """v.n = sigma gives zero"""
        geom = FrontGeometry.from_slopes(0.2)
        assert mass_flux(PARAMS, LEFT, geom) == pytest.approx(0.0, abs=1e-15)
    
    def test_boosted(self):
        """rho=1, v=(0.6,0,0), sigma=0 gives 0.75"""
        state = PrimitiveState(p=1.0, v=(0.6, 0.0))
        assert mass_flux(PARAMS, state, FrontGeometry.from_slopes(0.0)) == pytest.approx(0.75)
    
    def test_linear_in_sigma(self):
        """Slope -rho Gamma in sigma"""
        state = PrimitiveState(p=1.0, v=(0.6, 0.0))
        a = mass_flux(PARAMS, state, FrontGeometry.from_slopes(0.5))
        b = mass_flux(PARAMS, state, FrontGeometry.from_slopes(0.6))
        assert (b - a) / 0.1 == pytest.approx(-1.25)
        assert b == pytest.approx(0.0, abs=1e-14)


class TestGeometry:
    """Normal, tangents and front speed"""
    
    def test_orthonormal(self):
        """|n| = 1 and n.tau = 0"""
        geom = FrontGeometry.from_slopes(0.3, 0.7, -0.2)
        assert np.linalg.norm(geom.n) == pytest.approx(1.0)
        for t in geom.tau:
            assert geom.n @ t == pytest.approx(0.0, abs=1e-15)
    
    def test_speed_bound(self):
        """sigma^2 <= (dt phi)^2 with equality only on a flat front"""
        rng = make_rng(40)
        for _ in range(100):
            dt, s = rng.uniform(-1, 1, 2)
            sigma = FrontGeometry.from_slopes(dt, s).sigma
            assert sigma ** 2 <= dt ** 2
        assert FrontGeometry.from_slopes(0.4, 0.0).sigma == 0.4


class TestResiduals:
    """Jump-condition residuals"""
    
    def test_identical_states(self):
        """No discontinuity gives zero residuals"""
        geom = FrontGeometry.from_slopes(0.2)
        res = rh_residuals(PARAMS, LEFT, LEFT, geom)
        assert res.norm() == 0.0
    
    def test_contact_data(self):
        """[p]=[v]=[H]=0, [S]!=0, sigma=v_n gives zero residuals"""
        right, geom = contact_partner(PARAMS, LEFT, entropy_jump=0.8, d2phi=0.3)
        assert rh_residuals(PARAMS, LEFT, right, geom).norm() <= 1e-12
    
    def test_pressure_perturbation(self):
        """Raising p+ by delta on contact data gives r11 = delta"""
        right, geom = contact_partner(PARAMS, LEFT, entropy_jump=0.8)
        delta = 1e-3
        res = rh_residuals(PARAMS, LEFT, right.with_(p=right.p + delta), geom)
        assert res.r11 == pytest.approx(delta, rel=1e-9)
    
    def test_weak_form_agreement(self):
        """Residuals equal -sigma[Q] + [F.n] on arbitrary pairs"""
        rng = make_rng(41)
        a = sample_states(rng, 200, PARAMS)
        b = sample_states(rng, 200, PARAMS)
        for i in range(200):
            geom = FrontGeometry.from_slopes(*rng.uniform(-0.5, 0.5, 3))
            left, right = a.state(i), b.state(i)
            direct = rh_residuals(PARAMS, left, right, geom).as_vector(planar=False)
            weak = flux_residuals_projected(PARAMS, left, right, geom).as_vector(planar=False)
            assert np.allclose(direct, weak, rtol=1e-11, atol=1e-11), f"pair {i}"
            Rn = flux_residuals(PARAMS, left, right, geom)["induction"] @ geom.n
            r13 = rh_residuals(PARAMS, left, right, geom).r13
            assert Rn == pytest.approx(-geom.sigma * r13, abs=1e-12)
    
    def test_frame_consistency(self):
        """A common planar rotation leaves residuals unchanged"""
        rng = make_rng(42)
        a = sample_states(rng, 50, PARAMS, planar=True)
        b = sample_states(rng, 50, PARAMS, planar=True)
        for i in range(50):
            geom = FrontGeometry.from_slopes(*rng.uniform(-0.5, 0.5, 2))
            angle = rng.uniform(0.0, 2 * np.pi)
            before = rh_residuals(PARAMS, a.state(i), b.state(i), geom).as_vector(planar=False)
            after = rh_residuals(
                PARAMS, rotate_planar(a.state(i), angle), rotate_planar(b.state(i), angle), geom.rotated(angle)
            ).as_vector(planar=False)
            assert np.allclose(before, after, rtol=1e-12, atol=1e-12)


class TestClassify:
    """Discontinuity taxonomy"""
    
    def test_contact(self):
        """Contact data is a Contact"""
        right, geom = contact_partner(PARAMS, LEFT, entropy_jump=0.5)
        assert classify(PARAMS, LEFT, right, geom) == DiscontinuityClass.CONTACT
    
    def test_current_vortex_sheet(self):
        """j = 0, H_n = 0 with balanced total pressure"""
        left = PrimitiveState(p=2.5, H=(0.0, 1.0))
        right = PrimitiveState(p=1.0, H=(0.0, 2.0))
        geom = FrontGeometry.from_slopes(0.0)
        assert classify(PARAMS, left, right, geom) == DiscontinuityClass.CURRENT_VORTEX_SHEET
    
    def test_unrelated_states(self):
        """States violating the jump conditions are not a discontinuity"""
        right = PrimitiveState(p=2.0, v=(0.1, 0.3), H=(0.1, 0.0))
        geom = FrontGeometry.from_slopes(0.0)
        assert classify(PARAMS, LEFT, right, geom) == DiscontinuityClass.NOT_A_DISCONTINUITY
    
    def test_decision_rule(self):
        """Shock and Alfven branches of the pure rule"""
        assert decide_class(0.0, 1.0, j=0.3, Hn=1.0, rho_jump=0.2, tol=1e-9) == DiscontinuityClass.SHOCK
        assert decide_class(0.0, 1.0, j=0.3, Hn=1.0, rho_jump=0.0, tol=1e-9) == DiscontinuityClass.ALFVEN
        assert decide_class(0.0, 0.0, j=0.0, Hn=1.0, rho_jump=0.0, tol=1e-9) == DiscontinuityClass.NOT_A_DISCONTINUITY


class TestContactReduction:
    """{j = 0, H_n != 0, |sigma| < 1} <=> contact conditions"""
    
    def test_constructive_partners(self):
        """Solved partners with j = 0 satisfy [p] = [v] = [H] = 0"""
        rng = make_rng(43)
        batch = sample_states(rng, 40, PARAMS, planar=True)
        done = 0
        for i in range(len(batch)):
            left = batch.state(i)
            s = rng.uniform(-0.5, 0.5)
            if abs(left.H[0] - left.H[1] * s) < PARAMS.kappa:
                continue
            geom = FrontGeometry.from_slopes(left.v[0] - left.v[1] * s, s)
            right = rh_partner(
                PARAMS, left, geom, fixed={"S": left.S + 0.7}, guess=perturb(rng, left, 1e-3)
            )
            report = contact_reduction_check(PARAMS, left, right, geom, tol=1e-9)
            assert report.passed, f"failed steps {report.failed_steps()}"
            assert max(abs(v) for v in report.contact_residuals.values()) <= 1e-10
            done += 1
        assert done > 20, "too few usable samples"
    
    def test_converse(self):
        """Contact data satisfy all jump conditions"""
        rng = make_rng(44)
        batch = sample_states(rng, 1000, PARAMS, planar=True)
        for i in range(len(batch)):
            right, geom = contact_partner(PARAMS, batch.state(i), rng.uniform(0.1, 1.0), rng.uniform(-1, 1))
            assert rh_residuals(PARAMS, batch.state(i), right, geom).norm() <= 1e-12 * max(1.0, 10 * batch.p[i])
    
    def test_injected_tangential_jump(self):
        """[H_tau] != 0 fails at the (16) step with residual (1-sigma^2)[H_tau]"""
        right, geom = contact_partner(PARAMS, LEFT, entropy_jump=0.5)
        right = right.with_(H=right.H + np.array([0.0, 0.2, 0.0]))
        report = contact_reduction_check(PARAMS, LEFT, right, geom)
        failed = report.failed_steps()
        assert "(16) (1-sigma^2)[H_tau] = 0" in failed
        step = [s for s in report.steps if s.name.startswith("(16)")][0]
        assert step.residual == pytest.approx((1 - geom.sigma ** 2) * 0.2)
        assert report.steps[0].passed and report.steps[1].passed
        assert report.first_failure == "(16) (1-sigma^2)[H_tau] = 0"

    @pytest.mark.parametrize("field, delta, link", [
        ("H", np.array([0.2, 0.0, 0.0]), "(13) [H_n] = 0"),
        ("v", np.array([0.0, 0.05, 0.0]), "(14) [v_tau] = 0"),
        ("p", 1e-3, "(11) [p] = 0"),
    ])
    def test_first_failure_names_link(self, field, delta, link):
        """A jump injected into one field breaks the chain at the step that reads it"""
        right, geom = contact_partner(PARAMS, LEFT, entropy_jump=0.5)
        right = right.with_(**{field: getattr(right, field) + delta})
        report = contact_reduction_check(PARAMS, LEFT, right, geom)
        assert report.first_failure == link, report.to_dict()
        step = [s for s in report.steps if s.name == link][0]
        assert step.residual == pytest.approx(float(np.max(np.abs(delta))), rel=1e-6)
        assert step.equation > 0.0
        print(f"✅ {field} jump breaks at {link}")

    def test_steps_follow_chain(self):
        """Contact data pass every link in order (10), (13), (14), (16), (11), (15)"""
        right, geom = contact_partner(PARAMS, LEFT, entropy_jump=0.5, d2phi=0.3)
        report = contact_reduction_check(PARAMS, LEFT, right, geom)
        assert report.passed and report.first_failure is None
        assert [s.name.split()[0] for s in report.steps] == ["(10)", "(13)", "(14)", "(16)", "(16)", "(13)", "(11)", "(15)"]
        assert all(s.residual <= 1e-12 for s in report.steps)
    
    def test_superluminal_front(self):
        """|sigma| >= 1 is a causality error"""
        with pytest.raises(CausalityError):
            contact_reduction_check(PARAMS, LEFT, LEFT, FrontGeometry.from_slopes(1.2))
