"""Benchmark matrix assembly, the boundary pencil and solver steps"""
import time
import sys
from pathlib import Path
import statistics
import logging

sys.path.insert(0, str(Path(__file__).parent.parent))

from app.config import settings
from app.physics.characteristics import boundary_signature_batch
from app.physics.eos import ThermoParams
from app.physics.symmetrizer import assemble_unknowns
from app.solver.linearized import LinearizedSolver
from app.solver.periodic import PeriodicConfig, PeriodicSolver, smooth_planar_data
from app.solver.scenarios import build_scenario, gronwall_model
from app.verification.samplers import make_rng, sample_contact_points, sample_states

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def _time(fn, runs: int):
    times = []
    for _ in range(runs):
        start = time.time()
        fn()
        times.append((time.time() - start) * 1000)
    return times


def _report(name: str, times):
    logger.info(f"📊 {name}")
    logger.info(f"  Runs: {len(times)}")
    logger.info(f"  Mean: {statistics.mean(times):.1f}ms")
    logger.info(f"  Median: {statistics.median(times):.1f}ms")
    logger.info(f"  Min: {min(times):.1f}ms")
    logger.info(f"  Max: {max(times):.1f}ms")


def benchmark():
    """Time the hot paths on representative sizes"""
    params = ThermoParams.from_settings()
    rng = make_rng(settings.DEFAULT_SEED)
    
    logger.info("🏃 Running benchmarks...")
    U = sample_states(rng, 10_000, params).unknowns()
    _report("assemble A0..A3, 10^4 states", _time(lambda: assemble_unknowns(params, U), 5))
    
    pts = sample_contact_points(rng, 1_000, params)
    _report(
        "boundary signature, 10^3 points",
        _time(lambda: boundary_signature_batch(params, pts.plus.unknowns(), pts.minus.unknowns(), pts.d2phi, pts.dtphi), 5),
    )
    
    solver = LinearizedSolver(build_scenario(gronwall_model()))
    state = (solver.basic.U * 0.0, solver.v2_plus * 0.0, solver.v2_plus * 0.0)
    _report("linearized rhs, 64x32", _time(lambda: solver.rhs(0.0, state), 20))
    
    periodic = PeriodicSolver(PeriodicConfig(params, smooth_planar_data(64), n_steps=1))
    _report("periodic rhs, 64x64", _time(lambda: periodic.rhs(0.0, (periodic.config.U0,)), 20))


if __name__ == "__main__":
    benchmark()
