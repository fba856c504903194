"""
Вычислители функции Йоста: общий интерфейс для аналитической
(прямоугольная яма) и численной ветвей
"""

import logging
from typing import Callable, Dict, Literal, Protocol, Tuple

import numpy as np

from jost.errors import PreconditionError
from jost.radial import (
    DEFAULT_TOL,
    RadialGrid,
    cauchy_derivative,
    integrate_regular,
    jost_derivative,
    jost_function,
    numeric_irregular,
)
from jost.square_well import irregular_solution_sw, jost_sw, jost_sw_l0_dk, regular_solution_sw
from models.core import SquareWell, check_l

logger = logging.getLogger(__name__)

Engine = Literal["auto", "analytic", "numeric"]
RadialFunction = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


class JostEvaluator(Protocol):
    engine: str
    l: int
    potential: object

    def value(self, k: complex) -> complex: ...

    def derivative(self, k: complex) -> complex: ...

    def minus(self, k: complex) -> complex: ...

    def regular(self, k: complex) -> RadialFunction: ...

    def irregular(self, k: complex, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]: ...


def _vectorize(func: Callable[[float], Tuple[complex, complex]]) -> RadialFunction:
    def apply(radii):
        pairs = [func(float(r)) for r in np.atleast_1d(radii)]
        values = np.array([p[0] for p in pairs], dtype=complex)
        derivs = np.array([p[1] for p in pairs], dtype=complex)
        return values, derivs

    return apply


class AnalyticJost:
    """Точные формулы прямоугольной ямы"""
    engine = "analytic"

    def __init__(self, l: int, well: SquareWell):
        self.l = check_l(l)
        self.potential = well

    def value(self, k: complex) -> complex:
        return jost_sw(self.l, k, self.potential)

    def derivative(self, k: complex) -> complex:
        if self.l == 0:
            return jost_sw_l0_dk(k, self.potential)
        return cauchy_derivative(self.value, k, singular_at_origin=True).value

    def minus(self, k: complex) -> complex:
        return self.value(-complex(k))

    def regular(self, k: complex) -> RadialFunction:
        return _vectorize(lambda r: regular_solution_sw(self.l, k, self.potential, r))

    def irregular(self, k: complex, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return _vectorize(lambda r: irregular_solution_sw(self.l, k, self.potential, r))(radii)


class NumericJost:
    """Интегрирование ОДУ для произвольного потенциала с обрезанием"""
    engine = "numeric"

    def __init__(self, potential, l: int, tol: float = DEFAULT_TOL):
        self.l = check_l(l)
        self.potential = potential
        self.tol = tol
        self._irregular = numeric_irregular(potential, self.l, tol)

    def value(self, k: complex) -> complex:
        return jost_function(self.potential, self.l, k, self.tol)

    def derivative(self, k: complex) -> complex:
        return jost_derivative(self.potential, self.l, k, self.tol).value

    def minus(self, k: complex) -> complex:
        return self.value(-complex(k))

    def regular(self, k: complex) -> RadialFunction:
        grid = RadialGrid.for_potential(self.potential, n_nodes=2)
        return integrate_regular(self.potential, self.l, k, grid, self.tol).evaluate

    def irregular(self, k: complex, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self._irregular(k, radii)


class CachedJost:
    """Запоминает значения f(k): сканирование контура многократно проходит одни и те же точки"""

    def __init__(self, inner: JostEvaluator):
        self.inner = inner
        self._values: Dict[complex, complex] = {}
        self.hits = 0

    @property
    def engine(self) -> str:
        return self.inner.engine

    @property
    def l(self) -> int:
        return self.inner.l

    @property
    def potential(self):
        return self.inner.potential

    def value(self, k: complex) -> complex:
        k = complex(k)
        cached = self._values.get(k)
        if cached is not None:
            self.hits += 1
            return cached
        result = self.inner.value(k)
        self._values[k] = result
        return result

    def derivative(self, k: complex) -> complex:
        return self.inner.derivative(k)

    def minus(self, k: complex) -> complex:
        return self.value(-complex(k))

    def regular(self, k: complex) -> RadialFunction:
        return self.inner.regular(k)

    def irregular(self, k: complex, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.inner.irregular(k, radii)


def make_evaluator(potential, l: int, engine: Engine = "auto", tol: float = DEFAULT_TOL) -> CachedJost:
    """auto: аналитика для прямоугольной ямы, иначе численный движок"""
    if engine not in ("auto", "analytic", "numeric"):
        raise PreconditionError(f"Неизвестный движок: {engine}", {"engine": engine})
    if engine == "analytic" and not isinstance(potential, SquareWell):
        raise PreconditionError(
            "Аналитический движок доступен только для прямоугольной ямы",
            {"engine": engine, "potential": getattr(potential, "type", "unknown")},
        )

    if engine == "numeric" or (engine == "auto" and not isinstance(potential, SquareWell)):
        inner: JostEvaluator = NumericJost(potential, l, tol)
    else:
        inner = AnalyticJost(l, potential)
    logger.debug("Вычислитель Йоста: %s, l=%d", inner.engine, inner.l)
    return CachedJost(inner)
