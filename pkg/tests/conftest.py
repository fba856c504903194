"""
Конфигурация pytest и общие fixtures: потенциалы, вычислители,
независимые эталоны нулей и тестовый API сервер для E2E тестов
"""

import asyncio
import math
import multiprocessing
import os
import sys
import time

import aiohttp
import pytest
import pytest_asyncio
import uvicorn
from scipy.optimize import brentq, newton

# Добавляем корневую директорию проекта в PYTHONPATH
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from jost.evaluators import AnalyticJost, NumericJost  # noqa: E402
from jost.square_well import jost_sw_l0, jost_sw_l0_dk  # noqa: E402
from models.core import Sampled, SquareWell  # noqa: E402


# Настройки для тестов
TEST_PORT = 8001
BASE_URL = f"http://localhost:{TEST_PORT}"


def bound_kappa(depth: float, radius: float, lo: float, hi: float) -> float:
    """
    Эталон связанного состояния l = 0 бисекцией: tan(qa) = -q/kappa,
    то есть q cos(qa) + kappa sin(qa) = 0, q = sqrt(V0 - kappa^2)
    """
    def condition(kappa):
        q = math.sqrt(depth - kappa * kappa)
        return q * math.cos(q * radius) + kappa * math.sin(q * radius)

    return brentq(condition, lo, hi, xtol=1e-15, rtol=1e-15)


def virtual_kappa(depth: float, radius: float, lo: float, hi: float) -> float:
    """Эталон виртуального состояния l = 0: q cos(qa) - kappa sin(qa) = 0"""
    def condition(kappa):
        q = math.sqrt(depth - kappa * kappa)
        return q * math.cos(q * radius) - kappa * math.sin(q * radius)

    return brentq(condition, lo, hi, xtol=1e-15, rtol=1e-15)


@pytest.fixture(scope="session")
def well_4():
    """Яма V0 = 4, a = 1: одно связанное состояние"""
    return SquareWell(depth=4.0, radius=1.0)


@pytest.fixture(scope="session")
def well_2():
    """Яма V0 = 2, a = 1: виртуальное состояние около 0.25i"""
    return SquareWell(depth=2.0, radius=1.0)


@pytest.fixture(scope="session")
def smooth_potential():
    """Гладкий потенциал, заданный в узлах"""
    grid = [0.05 * i for i in range(41)]
    values = [-3.0 * math.exp(-2.0 * r * r) for r in grid]
    return Sampled(grid=grid, values=values, cutoff=2.0)


@pytest.fixture(scope="session")
def analytic_4(well_4):
    return AnalyticJost(0, well_4)


@pytest.fixture(scope="session")
def analytic_2(well_2):
    return AnalyticJost(0, well_2)


@pytest.fixture(scope="session")
def numeric_4(well_4):
    return NumericJost(well_4, 0)


@pytest.fixture(scope="session")
def bound_k0(well_4):
    return -1j * bound_kappa(well_4.depth, well_4.radius, 0.3, 1.0)


@pytest.fixture(scope="session")
def virtual_k0(well_2):
    return 1j * virtual_kappa(well_2.depth, well_2.radius, 0.1, 0.5)


@pytest.fixture(scope="session")
def resonance_k0(well_4):
    """Резонанс V0 = 4, l = 0 около 3.9 + 1.7i (Ньютон по точной формуле)"""
    return complex(newton(
        lambda k: jost_sw_l0(k, well_4), 3.9 + 1.7j,
        fprime=lambda k: jost_sw_l0_dk(k, well_4), tol=1e-13, maxiter=100,
    ))


def run_test_server(port: int):
    """
    Запускает тестовый API сервер в отдельном процессе

    Args:
        port: порт для запуска сервера
    """
    os.environ['PORT'] = str(port)
    os.environ['DEBUG'] = 'false'
    os.environ['LOG_LEVEL'] = 'WARNING'

    # Импортируем приложение
    from main import app

    # Запускаем сервер
    uvicorn.run(
        app,
        host="127.0.0.1",
        port=port,
        log_level="error",
        access_log=False
    )


async def _server_ready() -> bool:
    try:
        async with aiohttp.ClientSession() as session:
            async with session.get(f"{BASE_URL}/health") as response:
                return response.status == 200
    except (aiohttp.ClientError, OSError):
        return False


@pytest.fixture(scope="session")
def test_server():
    """
    Fixture для запуска тестового API сервера

    Запускает сервер в отдельном процессе и ждет его готовности
    """
    server_process = multiprocessing.Process(
        target=run_test_server,
        args=(TEST_PORT,),
        daemon=True
    )
    server_process.start()

    # Ждем, пока сервер запустится
    max_retries = 30
    retry_delay = 1

    for i in range(max_retries):
        if asyncio.run(_server_ready()):
            print(f"\nТестовый API сервер запущен на порту {TEST_PORT}")
            break
        if i < max_retries - 1:
            time.sleep(retry_delay)
    else:
        server_process.terminate()
        server_process.join(timeout=5)
        if server_process.is_alive():
            server_process.kill()
        raise Exception(
            f"Не удалось запустить тестовый сервер после {max_retries} попыток"
        )

    yield

    # Останавливаем сервер после тестов
    server_process.terminate()
    server_process.join(timeout=5)

    # Если процесс не завершился, убиваем его принудительно
    if server_process.is_alive():
        server_process.kill()
        server_process.join()

    print(f"\nТестовый API сервер остановлен")


@pytest_asyncio.fixture
async def session(test_server):
    """Создание aiohttp сессии для тестов"""
    async with aiohttp.ClientSession() as session:
        yield session
