from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.core import PotentialSpec, UNITS_LINE

GRID_CAP = 400


class ComplexValue(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> "ComplexValue":
        value = complex(value)
        return cls(re=value.real, im=value.imag)

    @classmethod
    def maybe(cls, value: Optional[complex]) -> Optional["ComplexValue"]:
        return None if value is None else cls.of(value)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class ScanRegion(BaseModel):
    """Прямоугольник в плоскости k и параметры поиска нулей"""
    model_config = ConfigDict(frozen=True)

    re_min: float = Field(..., description="Нижняя граница Re k")
    re_max: float = Field(..., description="Верхняя граница Re k")
    im_min: float = Field(..., description="Нижняя граница Im k")
    im_max: float = Field(..., description="Верхняя граница Im k")
    max_depth: int = Field(default=8, ge=0, le=30, description="Максимальная глубина деления")
    newton_tol: float = Field(default=1e-12, gt=0, description="Допуск Ньютона")
    boundary_margin: float = Field(default=1e-3, gt=0, lt=0.5, description="Относительное расширение при нуле на границе")
    class_tol: float = Field(default=1e-8, gt=0, description="Допуск классификации")

    @model_validator(mode="after")
    def validate_bounds(self):
        if not self.re_min < self.re_max:
            raise ValueError("re_min должно быть меньше re_max")
        if not self.im_min < self.im_max:
            raise ValueError("im_min должно быть меньше im_max")
        return self

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self) -> List[complex]:
        """Обход против часовой стрелки"""
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def dilated(self, fraction: float) -> "ScanRegion":
        dx, dy = fraction * self.width, fraction * self.height
        return self.model_copy(update={
            "re_min": self.re_min - dx, "re_max": self.re_max + dx,
            "im_min": self.im_min - dy, "im_max": self.im_max + dy,
        })

    def contains(self, k: complex) -> bool:
        return self.re_min <= k.real <= self.re_max and self.im_min <= k.imag <= self.im_max

    def quadrants(self, split: Tuple[float, float] = (0.5123, 0.4871)) -> List["ScanRegion"]:
        # деление чуть в стороне от середины: симметричные области не режутся по мнимой оси
        c = complex(self.re_min + split[0] * self.width, self.im_min + split[1] * self.height)
        cells = [
            (self.re_min, c.real, self.im_min, c.imag),
            (c.real, self.re_max, self.im_min, c.imag),
            (self.re_min, c.real, c.imag, self.im_max),
            (c.real, self.re_max, c.imag, self.im_max),
        ]
        return [
            self.model_copy(update={"re_min": a, "re_max": b, "im_min": d, "im_max": e})
            for a, b, d, e in cells
        ]


class RegulatorSchedule(BaseModel):
    """Последовательность eps_n = eps0 ratio^n гауссова регулятора"""
    model_config = ConfigDict(frozen=True)

    eps0: Optional[float] = Field(default=None, gt=0, description="Начальный eps; по умолчанию 0.5/R^2")
    ratio: float = Field(default=0.5, gt=0, lt=1, description="Множитель последовательности")
    count: int = Field(default=8, ge=3, le=40, description="Число членов")
    tail_tol: float = Field(default=1e-16, gt=0, description="Отсечка хвоста интеграла")

    def epsilons(self, cutoff: float) -> np.ndarray:
        eps0 = self.eps0 if self.eps0 is not None else 0.5 / cutoff ** 2
        return eps0 * self.ratio ** np.arange(self.count)


class Sweep(BaseModel):
    """Параметрическое семейство: V0 или a прямоугольной ямы, scale - множитель потенциала"""
    parameter: Literal["V0", "a", "scale"] = Field(..., description="Изменяемый параметр")
    lo: float = Field(..., description="Начальное значение")
    hi: float = Field(..., description="Конечное значение")
    steps: int = Field(..., ge=2, le=10000, description="Число точек")

    def values(self) -> List[float]:
        return [float(x) for x in np.linspace(self.lo, self.hi, self.steps)]


class RunConfig(BaseModel):
    """Полная конфигурация запуска: общая для CLI и HTTP"""
    potential: PotentialSpec
    l: int = Field(default=0, ge=0, le=60, description="Орбитальный момент")
    region: Optional[ScanRegion] = Field(default=None, description="Область поиска")
    engine: Literal["auto", "analytic", "numeric"] = Field(default="auto", description="Вычислитель")
    tol: float = Field(default=1e-11, gt=0, lt=1e-2, description="Допуск ОДУ")
    schedule: RegulatorSchedule = Field(default_factory=RegulatorSchedule)
    output_format: Literal["json", "csv"] = Field(default="json", description="Формат вывода")
    k0: Optional[ComplexValue] = Field(default=None, description="Начальное приближение нуля")
    trace: bool = Field(default=False, description="Выводить таблицу N_eps")
    sweep: Optional[Sweep] = Field(default=None, description="Параметрическая траектория")
    resolution: Tuple[int, int] = Field(default=(100, 100), description="Сетка NxM для jost-grid")

    @field_validator("resolution")
    def validate_resolution(cls, v):
        nx, ny = v
        if nx < 2 or ny < 2:
            raise ValueError("Разрешение должно быть не меньше 2x2")
        return min(nx, GRID_CAP), min(ny, GRID_CAP)


class PoleRecordOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k0: ComplexValue
    E: ComplexValue
    classification: Optional[str] = Field(default=None, alias="class")
    residual: float
    pseudonorm: Optional[ComplexValue] = None
    norm_constant: Optional[ComplexValue] = None
    flags: List[str] = Field(default_factory=list)


class PoleReport(BaseModel):
    units: str = UNITS_LINE
    potential: Dict[str, Any]
    l: int
    engine: str
    region: ScanRegion
    winding_number: int
    poles: List[PoleRecordOut]


class EpsilonRow(BaseModel):
    eps: float
    value: ComplexValue


class PseudonormReport(BaseModel):
    units: str = UNITS_LINE
    potential: Dict[str, Any]
    l: int
    engine: str
    k0_start: ComplexValue
    k0: ComplexValue
    classification: Optional[str] = None
    newton_iterations: int
    formula: ComplexValue
    oracle: ComplexValue
    oracle_method: Literal["gaussian", "continued_tail"]
    oracle_error: float
    discrepancy: float
    norm_constant: ComplexValue
    table: Optional[List[EpsilonRow]] = None


class JostGridRow(BaseModel):
    re_k: float
    im_k: float
    abs_f: float
    arg_f: float


class JostGridReport(BaseModel):
    units: str = UNITS_LINE
    potential: Dict[str, Any]
    l: int
    engine: str
    resolution: Tuple[int, int]
    rows: List[JostGridRow]


class TrajectoryRow(BaseModel):
    parameter: float
    k0: ComplexValue
    classification: Optional[str] = None
    pseudonorm: Optional[ComplexValue] = None
    branch: int


class BranchOut(BaseModel):
    branch: int
    start: float
    end: float
    reason: str


class TrajectoryReport(BaseModel):
    units: str = UNITS_LINE
    potential: Dict[str, Any]
    l: int
    engine: str
    sweep: Sweep
    rows: List[TrajectoryRow]
    branches: List[BranchOut]
