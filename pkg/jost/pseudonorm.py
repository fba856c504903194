"""
Псевдонорма состояния в нуле k0 функции Йоста.

N(k0) = df/dk(k0) f(-k0) / (4i k0^{2l+2}) - регуляризованный интеграл от phi^2.
Для проверки формулы есть три независимых способа посчитать сам интеграл:
гауссов регулятор с экстраполяцией по eps, аналитическое продолжение
хвоста через интегральные экспоненты и прямой интеграл для связанных состояний.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1

from jost.errors import (
    DegenerateZeroError,
    DomainError,
    MultipleZeroError,
    PreconditionError,
    RegularizationError,
)
from jost.specfun import hankel_minus_coefficients, outgoing_wave_series
from models.core import check_momentum
from models.models import RegulatorSchedule

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-8
DERIVATIVE_FLOOR = 1e-12
MINUS_FLOOR = 1e-12
PANEL_NODES = 24
MAX_PANELS = 200000

_LEG_X, _LEG_W = np.polynomial.legendre.leggauss(PANEL_NODES)


@dataclass
class RegularizedPseudonorm:
    value: complex
    error: float
    epsilons: List[float]
    values: List[complex]
    diagonal: List[complex] = field(default_factory=list)

    def table(self) -> List[Tuple[float, complex]]:
        return list(zip(self.epsilons, self.values))


@dataclass
class NormalizedState:
    factor: complex
    phase: float
    radii: np.ndarray
    values: np.ndarray


def _require_zero(jost, k0: complex, zero_tol: float = ZERO_TOL) -> complex:
    k0 = check_momentum(k0, allow_zero=True)
    if k0 == 0:
        raise DomainError("Пороговый нуль k0 = 0 не рассматривается", {"k0": "0"})
    residual = abs(jost.value(k0))
    if residual >= zero_tol * (1.0 + abs(k0)):
        raise PreconditionError(
            f"k0 = {k0} не является нулем f_{jost.l}: |f(k0)| = {residual:.3e}",
            {"k0": {"re": k0.real, "im": k0.imag}, "residual": residual},
        )
    return k0


def pseudonorm_formula(jost, k0: complex, zero_tol: float = ZERO_TOL) -> complex:
    """N = df/dk(k0) f(-k0) / (4i k0^{2l+2})"""
    k0 = _require_zero(jost, k0, zero_tol)
    derivative = jost.derivative(k0)
    if abs(derivative) < DERIVATIVE_FLOOR:
        raise MultipleZeroError(
            f"|df/dk(k0)| = {abs(derivative):.3e}: вероятно, кратный нуль",
            {"k0": {"re": k0.real, "im": k0.imag}, "derivative": abs(derivative)},
        )
    return derivative * jost.minus(k0) / (4j * k0 ** (2 * jost.l + 2))


def proportionality_constant(jost, k0: complex) -> complex:
    """C(k0) в f(k0, r) = C(k0) phi(k0, r): C = -2i k0^{l+1} / f(-k0)"""
    k0 = check_momentum(k0)
    minus = jost.minus(k0)
    if abs(minus) < MINUS_FLOOR * (1.0 + abs(k0)):
        raise DegenerateZeroError(
            "f(-k0) = 0: регулярное и нерегулярное решения не пропорциональны",
            {"k0": {"re": k0.real, "im": k0.imag}, "minus": abs(minus)},
        )
    return -2j * k0 ** (jost.l + 1) / minus


def _interior_points(potential) -> List[float]:
    cutoff = potential.cutoff_radius
    return [b for b in potential.integration_breaks() if 0 < b < cutoff]


def _complex_quad(func, lo: float, hi: float, points: List[float]) -> complex:
    """quad по вещественной и мнимой частям отдельно"""
    limit = max(200, 4 * len(points))
    options = {"points": points or None, "limit": limit, "epsabs": 1e-14, "epsrel": 1e-12}
    re, _ = quad(lambda r: func(r).real, lo, hi, **options)
    im, _ = quad(lambda r: func(r).imag, lo, hi, **options)
    return complex(re, im)


def _interior_integral(jost, k0: complex, eps: float = 0.0) -> complex:
    phi = jost.regular(k0)
    cutoff = jost.potential.cutoff_radius

    def integrand(r):
        value = phi(np.array([r]))[0][0]
        return value * value * math.exp(-eps * r * r)

    return _complex_quad(integrand, 0.0, cutoff, _interior_points(jost.potential))


def _tail_direction(k0: complex) -> float:
    """Угол луча r = R + t e^{i theta}, на котором F(k0, r) не растет"""
    if k0.imag <= 0:
        return 0.0
    arg = cmath.phase(k0)
    if arg < math.pi / 4:
        return -arg
    if arg > 3 * math.pi / 4:
        return math.pi - arg
    return 0.0


def _tail_length(k0: complex, theta: float, eps: float, tail_tol: float) -> float:
    budget = -math.log(tail_tol)
    decay = -(k0 * cmath.exp(1j * theta)).imag
    lengths = []
    if eps > 0:
        lengths.append(math.sqrt(budget / (eps * math.cos(2 * theta))))
    if decay > 0:
        lengths.append(budget / (2 * decay))
    if not lengths:
        raise RegularizationError("Хвост интеграла не затухает на выбранном луче", {"k0": str(k0)})
    return min(lengths)


def _tail_integral(l: int, k0: complex, cutoff: float, constant: complex, eps: float,
                   tail_tol: float) -> complex:
    """
    int_R^inf (F/C)^2 e^{-eps r^2} dr по лучу из R: гауссовы панели с шагом
    в четверть периода осцилляции
    """
    theta = _tail_direction(k0)
    direction = cmath.exp(1j * theta)
    length = _tail_length(k0, theta, eps, tail_tol)
    width = 0.5 * math.pi / max(2 * abs(k0), 1.0 / cutoff)
    panels = int(math.ceil(length / width))
    if panels > MAX_PANELS:
        raise RegularizationError(
            f"Хвост требует {panels} панелей: eps слишком мал",
            {"eps": eps, "panels": panels, "k0": str(k0)},
        )
    edges = np.linspace(0.0, length, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mids[:, None] + half[:, None] * _LEG_X[None, :]).ravel()
    weights = (half[:, None] * _LEG_W[None, :]).ravel()

    r = cutoff + t * direction
    wave, _ = outgoing_wave_series(l, k0, r)
    integrand = (wave / constant) ** 2 * np.exp(-eps * r * r)
    return complex(np.sum(weights * integrand) * direction)


def _richardson(values: List[complex], ratio: float) -> Tuple[List[complex], List[float]]:
    """Нижняя диагональ таблицы Ричардсона (самые малые eps) для ошибки по целым степеням eps"""
    level = list(values)
    diagonal = [level[-1]]
    for m in range(1, len(values)):
        mult = ratio ** m
        level = [(level[i + 1] - mult * level[i]) / (1.0 - mult) for i in range(len(level) - 1)]
        diagonal.append(level[-1])
    increments = [abs(b - a) for a, b in zip(diagonal, diagonal[1:])]
    return diagonal, increments


def pseudonorm_regularized(jost, k0: complex, schedule: Optional[RegulatorSchedule] = None,
                           zero_tol: float = ZERO_TOL) -> RegularizedPseudonorm:
    """
    lim_{eps -> 0} int_0^inf phi^2 e^{-eps r^2} dr: внутренняя часть - quad,
    внешняя - phi = F(k0, r)/C(k0) на повернутом луче, затем экстраполяция
    Ричардсона по eps.
    """
    k0 = _require_zero(jost, k0, zero_tol)
    schedule = schedule or RegulatorSchedule()
    if k0.imag > 0 and (k0 * k0).real <= 0:
        raise RegularizationError(
            "Гауссова последовательность расходится при Im k0 > 0 и Re k0^2 <= 0",
            {"k0": {"re": k0.real, "im": k0.imag}},
        )

    cutoff = jost.potential.cutoff_radius
    constant = proportionality_constant(jost, k0)
    epsilons = [float(e) for e in schedule.epsilons(cutoff)]
    values = []
    for eps in epsilons:
        inner = _interior_integral(jost, k0, eps)
        outer = _tail_integral(jost.l, k0, cutoff, constant, eps, schedule.tail_tol)
        values.append(inner + outer)
        logger.debug("N_eps: eps=%.3e N=%s", eps, inner + outer)

    diagonal, increments = _richardson(values, schedule.ratio)
    best = int(np.argmin(increments))
    value = diagonal[best + 1]
    error = increments[best]
    if error >= increments[0] and error > 1e-9 * (1.0 + abs(value)):
        raise RegularizationError(
            "Приращения экстраполяции Ричардсона не убывают",
            {
                "k0": {"re": k0.real, "im": k0.imag},
                "table": [[e, v.real, v.imag] for e, v in zip(epsilons, values)],
                "increments": increments,
            },
        )
    return RegularizedPseudonorm(value=value, error=error, epsilons=epsilons, values=values,
                                 diagonal=diagonal)


def _tail_coefficients(l: int, k0: complex) -> np.ndarray:
    """b_n: F^2 = i^{2l} e^{-2ik0 r} sum_n b_n r^{-n}"""
    a = np.array([c * (-1j / (2 * k0)) ** m for m, c in enumerate(hankel_minus_coefficients(l))])
    return np.convolve(a, a)


def _exponential_integrals(z: complex, count: int) -> List[complex]:
    """E_0..E_{count-1}; E_{n+1} = (e^{-z} - z E_n)/n"""
    e_minus = cmath.exp(-z)
    values = [e_minus / z]
    if count > 1:
        values.append(complex(exp1(z)))
    for n in range(1, count - 1):
        values.append((e_minus - z * values[n]) / n)
    return values


def continued_tail(l: int, k0: complex, cutoff: float, constant: complex) -> complex:
    """Аналитическое продолжение int_R^inf (F/C)^2 dr = C^{-2} i^{2l} sum b_n R^{1-n} E_n(2ik0 R)"""
    b = _tail_coefficients(l, k0)
    z = 2j * k0 * cutoff
    e_n = _exponential_integrals(z, len(b))
    total = sum(b_n * cutoff ** (1 - n) * e_n[n] for n, b_n in enumerate(b))
    return (1j ** (2 * l)) * total / constant ** 2


def pseudonorm_continued_tail(jost, k0: complex, zero_tol: float = ZERO_TOL) -> complex:
    """int_0^R phi^2 dr плюс аналитически продолженный хвост; годится для всех нулей"""
    k0 = _require_zero(jost, k0, zero_tol)
    cutoff = jost.potential.cutoff_radius
    constant = proportionality_constant(jost, k0)
    return _interior_integral(jost, k0) + continued_tail(jost.l, k0, cutoff, constant)


def direct_norm(jost, k0: complex, zero_tol: float = ZERO_TOL, tail_tol: float = 1e-16) -> complex:
    """Обычный интеграл int_0^inf phi^2 dr для связанного состояния"""
    k0 = _require_zero(jost, k0, zero_tol)
    if not k0.imag < 0:
        raise PreconditionError("Прямой интеграл сходится только при Im k0 < 0", {"k0": str(k0)})
    cutoff = jost.potential.cutoff_radius
    constant = proportionality_constant(jost, k0)
    return _interior_integral(jost, k0) + _tail_integral(jost.l, k0, cutoff, constant, 0.0, tail_tol)


def pseudonorm_oracle(jost, k0: complex, schedule: Optional[RegulatorSchedule] = None,
                      zero_tol: float = ZERO_TOL) -> Tuple[complex, float, str, Optional[RegularizedPseudonorm]]:
    """Гауссов регулятор там, где он сходится, иначе продолженный хвост"""
    k0 = complex(k0)
    if k0.imag > 0 and (k0 * k0).real <= 0:
        value = pseudonorm_continued_tail(jost, k0, zero_tol)
        return value, 0.0, "continued_tail", None
    result = pseudonorm_regularized(jost, k0, schedule, zero_tol)
    return result.value, result.error, "gaussian", result


def normalized_state(jost, k0: complex, r, zero_tol: float = ZERO_TOL) -> NormalizedState:
    """
    psi = [4i k0^{2l+2} / (df/dk(k0) f(-k0))]^{1/2} phi, главная ветвь корня.

    В знаменателе стоит f(-k0), а не f(k0): f(k0) = 0 в нуле, а с f(-k0)
    множитель равен N^{-1/2}, так что int psi^2 dr = 1.
    """
    norm = pseudonorm_formula(jost, k0, zero_tol)
    if norm == 0:
        raise DegenerateZeroError("Нулевая псевдонорма: состояние не нормируется", {"k0": str(k0)})
    k0 = complex(k0)
    factor = cmath.sqrt(4j * k0 ** (2 * jost.l + 2) / (jost.derivative(k0) * jost.minus(k0)))
    radii = np.atleast_1d(np.asarray(r, dtype=float))
    phi, _ = jost.regular(complex(k0))(radii)
    return NormalizedState(factor=factor, phase=cmath.phase(factor), radii=radii, values=factor * phi)
