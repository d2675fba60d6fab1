"""Test Lorentz kinematics and the magnetic four-vector"""
import numpy as np
import pytest

from app.errors import DomainError
from app.physics.eos import ThermoParams
from app.physics.kinematics import (
    PrimitiveState,
    b_squared_closed_form,
    full_kinematics,
    lorentz_extend,
    lorentz_jacobian,
    magnetic_four,
    velocity_from_u,
)
from app.verification.samplers import make_rng, sample_states

PARAMS = ThermoParams()


class TestLorentz:
    """Gamma, u and the inverse map"""
    
    def test_rest(self):
        """v=0 gives Gamma=1, u=0"""
        gamma, u = lorentz_extend(np.zeros(3))
        assert gamma == 1.0 and np.all(u == 0.0)
    
    def test_boost(self):
        """v=(0.6,0,0) gives Gamma=1.25, u=(0.75,0,0)"""
        gamma, u = lorentz_extend([0.6, 0.0, 0.0])
        assert gamma == pytest.approx(1.25)
        assert np.allclose(u, [0.75, 0.0, 0.0])
    
    def test_light_speed_rejected(self):
        """|v| >= 1 is a domain error"""
        with pytest.raises(DomainError):
            lorentz_extend([0.8, 0.6, 0.0])
    
    def test_round_trip(self):
        """u -> v -> u is the identity"""
        rng = make_rng(10)
        u = rng.uniform(-5.0, 5.0, (1000, 3))
        _, back = lorentz_extend(velocity_from_u(u))
        assert np.allclose(back, u, rtol=1e-13, atol=1e-14)
    
    def test_jacobian(self):
        """du = Gamma (dv + (u.dv) u) matches central differences"""
        rng = make_rng(11)
        batch = sample_states(rng, 100, PARAMS)
        dv = rng.standard_normal((100, 3))
        h = 1e-6
        fd = (lorentz_extend(batch.v + h * dv)[1] - lorentz_extend(batch.v - h * dv)[1]) / (2 * h)
        exact = lorentz_jacobian(batch.v, dv)
        assert np.allclose(fd, exact, rtol=1e-6, atol=1e-8), "Jacobian mismatch"


class TestMagneticFour:
    """b-four-vector identities"""
    
    def test_rest_frame(self):
        """v=0 gives b0=0, b=H, B^2=|H|^2"""
        H = np.array([0.3, -1.2, 0.5])
        b0, b, B2 = magnetic_four(np.zeros(3), H)
        assert b0 == 0.0 and np.allclose(b, H) and B2 == pytest.approx(H @ H)
    
    def test_hand_example(self):
        """v=(0.6,0,0), H=(1,0,0) gives b0=0.75, b=(1.25,0,0), B^2=1"""
        b0, b, B2 = magnetic_four([0.6, 0.0, 0.0], [1.0, 0.0, 0.0])
        assert b0 == pytest.approx(0.75)
        assert np.allclose(b, [1.25, 0.0, 0.0])
        assert B2 == pytest.approx(1.0)
        assert b_squared_closed_form([0.6, 0.0, 0.0], [1.0, 0.0, 0.0]) == pytest.approx(1.0)
    
    def test_identities_on_samples(self):
        """Two B^2 formulas agree and u^a b_a = 0 on 10^5 states"""
        rng = make_rng(12)
        batch = sample_states(rng, 100_000, PARAMS)
        gamma, u = lorentz_extend(batch.v)
        b0, b, B2 = magnetic_four(batch.v, batch.H)
        closed = b_squared_closed_form(batch.v, batch.H)
        scale = np.maximum(1.0, gamma ** 2 * np.sum(batch.H * batch.H, axis=-1))
        assert np.max(np.abs(B2 - closed) / scale) <= 1e-12, "B^2 formulas disagree"
        ortho = -gamma * b0 + np.sum(u * b, axis=-1)
        assert np.max(np.abs(ortho) / scale) <= 1e-12, "u^a b_a != 0"
        assert np.all(B2[np.linalg.norm(batch.H, axis=-1) > 0] > 0.0)
        print("✅ four-vector identities on 10^5 samples")


class TestFullKinematics:
    """Aggregated derived fields"""
    
    def test_unit_state(self):
        """p=1, S=0, v=0, H=0 gives rho=1, h=5, Gamma=1, B^2=0, q=1"""
        k = full_kinematics(PARAMS, PrimitiveState(p=1.0))
        assert k.rho == pytest.approx(1.0)
        assert k.h == pytest.approx(5.0)
        assert k.gamma_lorentz == pytest.approx(1.0)
        assert k.B2 == pytest.approx(0.0)
        assert k.q == pytest.approx(1.0)
    
    def test_total_pressure(self):
        """q = p + B^2/2"""
        state = PrimitiveState(p=0.7, v=(0.2, 0.1), H=(1.0, -0.5), S=0.3)
        k = full_kinematics(PARAMS, state)
        assert k.q == pytest.approx(0.7 + 0.5 * b_squared_closed_form(state.v, state.H))
    
    def test_gamma_identity(self):
        """Gamma^2 = 1 + |u|^2"""
        state = PrimitiveState(p=1.0, v=(0.5, -0.3, 0.2))
        k = full_kinematics(PARAMS, state)
        assert k.gamma_lorentz ** 2 == pytest.approx(1.0 + k.u @ k.u, rel=1e-12)
    
    def test_planar_padding(self):
        """2-component vectors are padded with a zero third component"""
        state = PrimitiveState(p=1.0, v=(0.1, 0.2), H=(1.0, 0.0))
        assert state.v.shape == (3,) and state.is_planar
        assert np.allclose(PrimitiveState.from_unknowns(state.unknowns()).v, state.v)
