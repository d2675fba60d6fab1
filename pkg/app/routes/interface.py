"""Interface endpoints"""
from fastapi import APIRouter
import numpy as np

from app.data.schema import CutoffRequest, CutoffResponse
from app.errors import ContactError
from app.interface.front import Cutoff
from app.routes import contact_http_error

router = APIRouter()


@router.post("/interface/cutoff", response_model=CutoffResponse)
async def sample_cutoff(request: CutoffRequest):
    """Sample chi and chi' at the given points"""
    try:
        chi = Cutoff(request.kind)
    except ContactError as e:
        raise contact_http_error(e)
    s = np.asarray(request.s, dtype=float)
    return CutoffResponse(
        kind=chi.kind,
        chi=[float(x) for x in np.atleast_1d(chi(s))],
        dchi=[float(x) for x in np.atleast_1d(chi.derivative(s))],
        max_slope=chi.max_slope,
    )
