"""
RMHD Contact API
Admissibility, characteristic speeds and jump classification for relativistic MHD contact discontinuities
"""
from fastapi import FastAPI, Request
from contextlib import asynccontextmanager
from starlette.middleware.base import BaseHTTPMiddleware
import uvicorn
import logging
import uuid
import time

from app import __version__
from app.config import settings
from app.physics.eos import ThermoParams
from app.routes import interface, jumps, state

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Validate the configured parameters once on startup"""
    logger.info(f"🚀 Starting RMHD Contact API v{__version__}")
    params = ThermoParams.from_settings()
    app.state.params = params
    logger.info(
        f"📦 EOS gamma={params.gamma:.6g}, A={params.A}, pressure floor pbar={params.pbar}; "
        f"margins nu={params.nu}, kappa={params.kappa}, epsilon={params.epsilon}"
    )
    if params.gamma > 2.0:
        logger.warning("⚠️ stiff gamma enabled: causality is checked per state")
    logger.info(f"📦 cutoff {settings.CUTOFF_KIND}, configuration schema v{settings.SCHEMA_VERSION}")
    logger.info("✅ Contact API ready: /api/state, /api/jumps, /api/interface")
    
    yield
    
    logger.info("👋 Shutting down RMHD Contact API")


class RequestIDMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next):
        request_id = str(uuid.uuid4())
        request.state.request_id = request_id
        response = await call_next(request)
        response.headers["X-Request-ID"] = request_id
        return response


class LoggingMiddleware(BaseHTTPMiddleware):
    """Access log; rejected inputs are logged with the contact condition they violate"""
    
    async def dispatch(self, request: Request, call_next):
        start_time = time.time()
        request_id = getattr(request.state, "request_id", "-")
        logger.info(f"[{request_id}] {request.method} {request.url.path}")
        
        response = await call_next(request)
        
        duration_ms = (time.time() - start_time) * 1000
        condition = response.headers.get("X-Contact-Condition")
        if condition:
            logger.warning(f"⚠️ [{request_id}] {response.status_code} {request.url.path} violates {condition} - {duration_ms:.2f}ms")
        else:
            logger.info(f"[{request_id}] {response.status_code} - {duration_ms:.2f}ms")
        return response


app = FastAPI(
    title="RMHD Contact API",
    description="Relativistic MHD contact discontinuities: admissibility, speeds, jump conditions",
    version=__version__,
    lifespan=lifespan
)

# LoggingMiddleware runs inside RequestIDMiddleware
app.add_middleware(LoggingMiddleware)
app.add_middleware(RequestIDMiddleware)

app.include_router(state.router, prefix="/api", tags=["State"])
app.include_router(jumps.router, prefix="/api", tags=["Jumps"])
app.include_router(interface.router, prefix="/api", tags=["Interface"])


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "service": "RMHD Contact API",
        "version": __version__,
        "status": "running",
        "docs": "/docs",
        "health": "/health"
    }


@app.get("/health")
async def health_check():
    """
    Health check with the active parameter set
    
    Returns:
        - status: "healthy"
        - params: EOS constants and margins in use
        - schema_version: accepted configuration file version
    """
    return {
        "status": "healthy",
        "params": {
            "gamma": settings.GAMMA,
            "A": settings.EOS_A,
            "pbar": settings.PBAR,
            "nu": settings.NU,
            "kappa": settings.KAPPA,
            "epsilon": settings.EPSILON,
            "allow_stiff_gamma": settings.ALLOW_STIFF_GAMMA,
        },
        "cutoff": settings.CUTOFF_KIND,
        "schema_version": settings.SCHEMA_VERSION,
        "api_version": __version__
    }


if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host="0.0.0.0",
        port=settings.PORT,
        reload=settings.DEBUG
    )
