"""
Базовые типы: соглашение о единицах, потенциалы с конечным радиусом
обрезания и классификация нулей функции Йоста
"""

import math
from enum import Enum
from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from scipy.interpolate import PchipInterpolator

from jost.errors import ClassificationError, DomainError, PreconditionError

# hbar^2/2m = 1: E = k^2, внутри ямы q^2 = k^2 + V0
UNITS_LINE = "hbar^2/2m = 1; E = k^2"


class PoleClass(str, Enum):
    BOUND = "bound"
    VIRTUAL = "virtual"
    RESONANT = "resonant"


def check_momentum(k: complex, allow_zero: bool = False) -> complex:
    """Проверяет, что импульс конечен (и ненулевой, если нуль запрещен)"""
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise DomainError(f"Импульс должен быть конечным, получено {k}", {"k": str(k)})
    if k == 0 and not allow_zero:
        raise DomainError("Импульс k = 0 недопустим для этой операции", {"k": "0"})
    return k


def check_l(l: int) -> int:
    """Проверяет орбитальный момент"""
    if isinstance(l, bool) or int(l) != l or l < 0:
        raise DomainError(f"Орбитальный момент должен быть целым >= 0, получено {l}", {"l": l})
    return int(l)


class SquareWell(BaseModel):
    """Прямоугольная яма: V = -V0 при r <= a, 0 при r > a"""
    # в отчетах ключи V0 и a, на входе допустимы и depth/radius
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    type: Literal["square_well"] = "square_well"
    depth: float = Field(..., alias="V0", ge=0, description="Глубина V0 (V0 = 0 - свободная частица)")
    radius: float = Field(..., alias="a", gt=0, description="Радиус a")

    @property
    def cutoff_radius(self) -> float:
        return self.radius

    def integration_breaks(self) -> Tuple[float, ...]:
        return (self.radius,)

    def value(self, r: float) -> float:
        return -self.depth if r <= self.radius else 0.0

    def value_at_origin(self) -> float:
        return -self.depth


class PiecewiseConstant(BaseModel):
    """Кусочно-постоянный потенциал: values[i] на i-м интервале, 0 за cutoff"""
    model_config = ConfigDict(frozen=True)

    type: Literal["piecewise_constant"] = "piecewise_constant"
    breakpoints: List[float] = Field(default_factory=list, description="Внутренние точки разрыва")
    values: List[float] = Field(..., min_length=1, description="Значения на интервалах")
    cutoff: float = Field(..., gt=0, description="Радиус обрезания R")

    @model_validator(mode="after")
    def validate_layout(self):
        points = self.breakpoints
        if len(self.values) != len(points) + 1:
            raise ValueError("Число значений должно быть на единицу больше числа точек разрыва")
        if any(b >= c for b, c in zip(points, points[1:])):
            raise ValueError("Точки разрыва должны строго возрастать")
        if points and (points[0] <= 0 or points[-1] >= self.cutoff):
            raise ValueError("Точки разрыва должны лежать внутри (0, cutoff)")
        return self

    @property
    def cutoff_radius(self) -> float:
        return self.cutoff

    def integration_breaks(self) -> Tuple[float, ...]:
        return tuple(self.breakpoints) + (self.cutoff,)

    def value(self, r: float) -> float:
        if r > self.cutoff:
            return 0.0
        # значение на (b_{i-1}, b_i] - правая граница включена
        index = int(np.searchsorted(self.breakpoints, r, side="left"))
        return self.values[index]

    def value_at_origin(self) -> float:
        return self.values[0]


class Sampled(BaseModel):
    """Потенциал, заданный в узлах; между узлами - монотонный кубический сплайн (PCHIP)"""
    model_config = ConfigDict(frozen=True)

    type: Literal["sampled"] = "sampled"
    grid: List[float] = Field(..., min_length=2, description="Возрастающая сетка, grid[-1] = cutoff")
    values: List[float] = Field(..., min_length=2, description="Значения в узлах")
    cutoff: float = Field(..., gt=0, description="Радиус обрезания R")

    _spline: PchipInterpolator = PrivateAttr()

    @model_validator(mode="after")
    def validate_grid(self):
        if len(self.grid) != len(self.values):
            raise ValueError("Длины grid и values должны совпадать")
        if any(b >= c for b, c in zip(self.grid, self.grid[1:])):
            raise ValueError("Сетка должна строго возрастать")
        if self.grid[0] < 0:
            raise ValueError("Сетка должна начинаться с r >= 0")
        if not math.isclose(self.grid[-1], self.cutoff, rel_tol=1e-12):
            raise ValueError("Последний узел сетки должен совпадать с cutoff")
        return self

    def model_post_init(self, __context) -> None:
        self._spline = PchipInterpolator(self.grid, self.values, extrapolate=False)

    @property
    def cutoff_radius(self) -> float:
        return self.cutoff

    def integration_breaks(self) -> Tuple[float, ...]:
        return tuple(g for g in self.grid if g > 0)

    def value(self, r: float) -> float:
        if r > self.cutoff:
            return 0.0
        if r <= self.grid[0]:
            return self.values[0]
        return float(self._spline(r))

    def value_at_origin(self) -> float:
        return self.values[0]


PotentialSpec = Annotated[
    Union[SquareWell, PiecewiseConstant, Sampled],
    Field(discriminator="type"),
]


def classify(k0: complex, tol: float = 1e-8) -> PoleClass:
    """
    Классифицирует нуль функции Йоста:
    bound (Re k = 0, Im k <= 0), virtual (Re k = 0, Im k > 0),
    resonant (Re k != 0, Im k > 0)
    """
    if not tol > 0:
        raise PreconditionError(f"Допуск классификации должен быть > 0, получено {tol}", {"tol": tol})
    k0 = check_momentum(k0, allow_zero=True)

    on_axis = abs(k0.real) < tol * (1.0 + abs(k0))
    if on_axis:
        return PoleClass.BOUND if k0.imag <= 0 else PoleClass.VIRTUAL
    if k0.imag > 0:
        return PoleClass.RESONANT

    raise ClassificationError(
        f"Нуль k0 = {k0} с Re k0 != 0 и Im k0 <= 0 не относится ни к одному классу",
        {"k0": {"re": k0.real, "im": k0.imag}, "tol": tol},
    )


def energy(k: complex) -> complex:
    """E = k^2 в единицах hbar^2/2m = 1"""
    return complex(k) ** 2


def mirror(k0: complex) -> complex:
    """Зеркальный партнер резонанса: -conj(k0)"""
    return -complex(k0).conjugate()
