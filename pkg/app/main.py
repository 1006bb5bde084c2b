"""
HTTP front end for the random-access simulator

Serves closed forms, the RAR codec and short campaigns over the profile
named by ``PROFILE_NAME``. Long campaigns run from ``python -m app``.
"""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.routing import APIRoute

from .config import settings
from .api import router
from .services import simulation_service

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def _log_endpoints() -> None:
    for route in router.routes:
        if isinstance(route, APIRoute):
            methods = ",".join(sorted(route.methods))
            logger.info(f"  {methods:<5} {route.path:<20} {route.summary or route.name}")


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"🚀 Starting {settings.SERVICE_NAME} v{settings.SERVICE_VERSION}")
    try:
        await simulation_service.initialize()
        p = simulation_service.params
        logger.info(
            f"📡 Operating point: N_ZC={p.n_zc}, G={p.guard}, L={p.delay_spread}, "
            f"pu={p.pu_over_sigma2:.4g}, PT={p.pt_over_sigma2:.4g}"
        )
        logger.info(f"📚 Endpoints (API caps: {settings.MAX_API_FRAMES} frames, {settings.MAX_API_TRIALS} trials):")
        _log_endpoints()
        logger.info(f"✅ Listening on http://{settings.HOST}:{settings.PORT}")
        yield
    except Exception as e:
        logger.error(f"❌ Startup failed: {e}")
        raise
    finally:
        logger.info("🛑 Simulator service stopped")


app = FastAPI(
    title=settings.SERVICE_NAME,
    description="""
    # Massive-MIMO Random Access Simulator

    The base station detects Zadoff-Chu preambles by averaging correlation
    power over its antennas, groups colliding UEs by timing advance and
    answers each group with an MRT-beamformed, CRC-protected RAR.

    ## Features
    - 📐 Closed-form SINR, asymptote and minimum antenna count
    - 🔢 RAR encoder / decoder (24-bit frame, CRC-5)
    - 🎲 Short Monte-Carlo campaigns (repeat attempts, RA failure)
    - 📈 False-alarm / detection probabilities
    """,
    version=settings.SERVICE_VERSION,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS.split(","),
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(router)


@app.get("/")
async def root():
    """Service identity and the active profile"""
    return {
        "service": settings.SERVICE_NAME,
        "version": settings.SERVICE_VERSION,
        "profile": settings.PROFILE_NAME,
        "ready": simulation_service.initialized,
        "docs": "/docs",
    }
