import logging
import os
from contextlib import asynccontextmanager
from fastapi import FastAPI, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import uvicorn
from dotenv import load_dotenv

from app.routes import grid_router, poles_router, pseudonorm_router, trajectory_router
from jost import JostError, __version__
from models.core import UNITS_LINE

# Загружаем переменные окружения
load_dotenv()

logging.basicConfig(
    level=os.getenv("LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Управление жизненным циклом приложения"""
    logger.info("Jost Pole Service %s запущен (%s)", __version__, UNITS_LINE)
    yield
    logger.info("Jost Pole Service остановлен")


# Создание экземпляра FastAPI
app = FastAPI(
    title="Jost Pole Service API",
    description="""
    Сервис поиска нулей функции Йоста и псевдонорм резонансных состояний

    ## Функциональность

    * **Нули**: поиск по принципу аргумента, классификация bound / virtual / resonant
    * **Псевдонорма**: формула через df/dk и f(-k0), проверка квадратурой
    * **Сетка**: |f| и arg f на прямоугольнике плоскости k
    * **Траектории**: движение нулей при изменении параметров потенциала

    ## Единицы

    hbar^2/2m = 1, E = k^2. Связанные состояния лежат при Re k = 0, Im k < 0.

    ## Примеры использования

    1. POST /poles/ с потенциалом и областью поиска
    2. POST /pseudonorm/ с начальным приближением k0
    3. POST /trajectory/ с разверткой параметра
    """,
    version=__version__,
    license_info={
        "name": "MIT",
    },
    lifespan=lifespan
)

# Добавляем CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Подключаем роутеры
app.include_router(poles_router)
app.include_router(pseudonorm_router)
app.include_router(grid_router)
app.include_router(trajectory_router)


@app.get(
    "/",
    tags=["Health"],
    summary="Проверка работоспособности",
    description="Возвращает статус работы сервиса"
)
async def health_check():
    """Проверка работоспособности сервиса"""
    return {
        "status": "ok",
        "message": "Jost Pole Service API работает",
        "version": __version__
    }


@app.get(
    "/health",
    tags=["Health"],
    summary="Детальная проверка здоровья",
    description="Возвращает версию и соглашение о единицах"
)
async def detailed_health_check():
    """Детальная проверка здоровья сервиса"""
    return {
        "status": "ok",
        "version": __version__,
        "units": UNITS_LINE,
        "engines": ["analytic", "numeric"],
        "message": "Jost Pole Service API"
    }


@app.exception_handler(JostError)
async def jost_exception_handler(request, exc: JostError):
    """Ошибки вычислений вне роутеров"""
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content={"detail": exc.to_dict()})


# Глобальный обработчик исключений
@app.exception_handler(Exception)
async def global_exception_handler(request, exc):
    """Глобальный обработчик исключений"""
    logger.exception("Необработанная ошибка")
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={
            "error": "Внутренняя ошибка сервера",
            "detail": str(exc) if os.getenv("DEBUG", "false").lower() == "true" else "Обратитесь к администратору"
        }
    )


def serve(host: str = None, port: int = None, debug: bool = None):
    """Запуск uvicorn с настройками из окружения"""
    host = host or os.getenv("HOST", "0.0.0.0")
    port = port or int(os.getenv("PORT", 8000))
    debug = os.getenv("DEBUG", "false").lower() == "true" if debug is None else debug

    uvicorn.run(
        "main:app",
        host=host,
        port=port,
        reload=debug,
        log_level=os.getenv("LOG_LEVEL", "info").lower()
    )


if __name__ == "__main__":
    serve()
