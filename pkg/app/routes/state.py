"""Single-state endpoints"""
from fastapi import APIRouter, HTTPException
import logging

from app.data.schema import (
    ConditionResult,
    SpeedsRequest,
    SpeedsResponse,
    StateCheckResponse,
    StateModel,
)
from app.errors import ContactError
from app.physics.characteristics import char_spectrum
from app.physics.eos import hyperbolicity_report
from app.routes import contact_http_error, resolve_params

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/state/check", response_model=StateCheckResponse)
async def check_state(state: StateModel):
    """
    Hyperbolicity and admissibility report for one state
    
    Args:
        state: primitive state (p, v, H, S), optional EOS parameters
    
    Returns:
        Per-condition flags and margins; failing conditions listed
    """
    try:
        params = resolve_params(state.params)
        report = hyperbolicity_report(params, state.to_state())
    except ContactError as e:
        logger.warning(f"⚠️ state check rejected: {e}")
        raise contact_http_error(e)
    
    return StateCheckResponse(
        admissible=report.admissible,
        checks={
            k: ConditionResult(description=c.description, passed=c.passed, margin=c.margin if c.margin == c.margin else None)
            for k, c in report.checks.items()
        },
        failures=report.failures(),
    )


@router.post("/state/speeds", response_model=SpeedsResponse)
async def state_speeds(request: SpeedsRequest):
    """
    Characteristic eigenvalues and magnetosonic speeds along a direction
    
    Args:
        state: planar admissible state
        N: direction (N1, N2)
    
    Returns:
        Sorted eigenvalues, the four speeds and their minimum
    """
    if len(request.N) != 2:
        raise HTTPException(status_code=422, detail={"error": "N must have two components", "condition": "config"})
    try:
        params = resolve_params(request.state.params)
        spectrum = char_spectrum(params, request.state.to_state(), tuple(request.N))
    except ContactError as e:
        raise contact_http_error(e)
    
    return SpeedsResponse(
        eigenvalues=[float(x) for x in spectrum.lambdas],
        speeds=spectrum.speeds,
        margin=spectrum.margin,
    )
