import logging

from fastapi import APIRouter, HTTPException, status
from fastapi.concurrency import run_in_threadpool

from app.services import grid_service, pole_service, pseudonorm_service, trajectory_service
from jost.errors import JostError
from models.models import JostGridReport, PoleReport, PseudonormReport, RunConfig, TrajectoryReport

logger = logging.getLogger(__name__)

# Роутер для поиска нулей
poles_router = APIRouter(prefix="/poles", tags=["Poles"])

# Роутер для псевдонорм
pseudonorm_router = APIRouter(prefix="/pseudonorm", tags=["Pseudonorm"])

# Роутер для сетки значений f(k)
grid_router = APIRouter(prefix="/jost-grid", tags=["Jost grid"])

# Роутер для траекторий
trajectory_router = APIRouter(prefix="/trajectory", tags=["Trajectory"])


def _unprocessable(e: JostError) -> HTTPException:
    logger.warning("Ошибка вычисления: %s", e.message)
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=e.to_dict())


@poles_router.post(
    "/",
    response_model=PoleReport,
    summary="Поиск нулей функции Йоста",
    description="Находит все нули f_l(k) в прямоугольнике, классифицирует их и считает псевдонормы"
)
async def find_poles(config: RunConfig):
    """Поиск нулей в области config.region"""
    try:
        return await run_in_threadpool(pole_service.find, config)
    except JostError as e:
        raise _unprocessable(e)


@pseudonorm_router.post(
    "/",
    response_model=PseudonormReport,
    summary="Псевдонорма состояния",
    description="Уточняет нуль методом Ньютона от config.k0 и сравнивает формулу с квадратурой"
)
async def compute_pseudonorm(config: RunConfig):
    """Псевдонорма в нуле около config.k0"""
    try:
        return await run_in_threadpool(pseudonorm_service.compute, config)
    except JostError as e:
        raise _unprocessable(e)


@grid_router.post(
    "/",
    response_model=JostGridReport,
    summary="Значения f(k) на сетке",
    description="Возвращает |f| и arg f на сетке NxM; размер сетки ограничен 400x400"
)
async def jost_grid(config: RunConfig):
    """Сетка значений функции Йоста"""
    try:
        return await run_in_threadpool(grid_service.evaluate, config)
    except JostError as e:
        raise _unprocessable(e)


@trajectory_router.post(
    "/",
    response_model=TrajectoryReport,
    summary="Траектории нулей",
    description="Отслеживает нули при изменении параметра потенциала"
)
async def pole_trajectory(config: RunConfig):
    """Траектории нулей по развертке config.sweep"""
    try:
        return await run_in_threadpool(trajectory_service.run, config)
    except JostError as e:
        raise _unprocessable(e)
