"""Jump-condition endpoints"""
from fastapi import APIRouter
import logging

from app.data.schema import ClassifyResponse, JumpRequest, ReductionResponse
from app.errors import ContactError
from app.physics.jumps import classify, contact_reduction_check, mass_flux, residual_scale, rh_residuals
from app.routes import contact_http_error, resolve_params

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/jumps/classify", response_model=ClassifyResponse)
async def classify_jump(request: JumpRequest):
    """
    Classify a pair of traces across a front
    
    Args:
        left: Omega- trace
        right: Omega+ trace
        front: local front slopes (dt phi, d2 phi, d3 phi)
        tol: relative tolerance
    
    Returns:
        Class name, mass flux and the jump-condition residuals
    """
    try:
        params = resolve_params(request.left.params)
        left, right = request.left.to_state(), request.right.to_state()
        geom = request.front.geometry()
        kind = classify(params, left, right, geom, request.tol)
        res = rh_residuals(params, left, right, geom)
        scale = residual_scale(params, left, right)
        j = mass_flux(params, right, geom)
    except ContactError as e:
        raise contact_http_error(e)
    
    vec = res.as_vector(planar=False)
    names = ["r10", "r11", "r12_1", "r12_2", "r13", "r14_1", "r14_2", "r15"]
    logger.info(f"📦 classified as {kind.value}")
    return ClassifyResponse(
        kind=kind.value,
        mass_flux=j,
        residuals={n: float(v) for n, v in zip(names, vec)},
        residual_norm=res.norm() / scale,
    )


@router.post("/jumps/reduction", response_model=ReductionResponse)
async def reduction(request: JumpRequest):
    """
    Step-by-step check that j = 0, H_n != 0 force a contact
    
    Returns:
        Per-step residuals and the contact residuals [p], [v], [H]
    """
    try:
        params = resolve_params(request.left.params)
        report = contact_reduction_check(
            params, request.left.to_state(), request.right.to_state(), request.front.geometry(), request.tol
        )
    except ContactError as e:
        raise contact_http_error(e)
    
    return ReductionResponse(
        passed=report.passed,
        failed_steps=report.failed_steps(),
        first_failure=report.first_failure,
        steps={s.name: s.residual for s in report.steps},
        equations={s.name: s.equation for s in report.steps},
        contact_residuals=report.contact_residuals,
    )
