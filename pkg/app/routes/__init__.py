"""API routes"""
from typing import Optional

from fastapi import HTTPException

from app.data.schema import ParamsModel
from app.errors import ContactError
from app.physics.eos import ThermoParams


def resolve_params(model: Optional[ParamsModel]) -> ThermoParams:
    """Request parameters, or the configured defaults"""
    if model is None:
        return ThermoParams.from_settings()
    return model.to_params()


def contact_http_error(e: ContactError) -> HTTPException:
    """422 naming the violated condition, also in the X-Contact-Condition header"""
    headers = {"X-Contact-Condition": e.condition} if e.condition else None
    return HTTPException(status_code=422, detail={"error": e.message, "condition": e.condition}, headers=headers)
