"""
Численный радиальный движок: регулярное и нерегулярное решения уравнения
u'' = (l(l+1)/r^2 + V(r) - k^2) u для потенциала с конечным радиусом R,
функция Йоста по вронскиану и производные по k через интеграл Коши.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import solve_ivp

from jost.errors import DerivativeError, DomainError, IntegrationError, RangeError
from jost.specfun import double_factorial_odd, outgoing_wave, riccati_pair, wronskian
from models.core import check_l, check_momentum

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-11
R_MIN_FRACTION = 1e-6
CAUCHY_POINTS = 16
CAUCHY_ACCEPT = 1e-6

IrregularProvider = Callable[[complex, np.ndarray], Tuple[np.ndarray, np.ndarray]]


class RadialGrid(BaseModel):
    """Узлы вывода и точки перезапуска интегратора"""
    model_config = ConfigDict(frozen=True)

    nodes: Tuple[float, ...] = Field(..., min_length=2)
    breakpoints: Tuple[float, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_nodes(self):
        if any(b >= c for b, c in zip(self.nodes, self.nodes[1:])):
            raise ValueError("Узлы сетки должны строго возрастать")
        if self.nodes[0] <= 0:
            raise ValueError("Первый узел должен быть > 0")
        return self

    @property
    def r_min(self) -> float:
        return self.nodes[0]

    @property
    def r_max(self) -> float:
        return self.nodes[-1]

    @classmethod
    def for_potential(cls, potential, n_nodes: int = 64, r_min: Optional[float] = None) -> "RadialGrid":
        """Равномерная сетка на [r_min, R] плюс все точки разрыва потенциала"""
        cutoff = potential.cutoff_radius
        r_min = R_MIN_FRACTION * cutoff if r_min is None else r_min
        breaks = sorted(b for b in potential.integration_breaks() if r_min < b <= cutoff)
        if not breaks or breaks[-1] != cutoff:
            breaks.append(cutoff)
        nodes = np.union1d(np.linspace(r_min, cutoff, n_nodes), breaks)
        return cls(nodes=tuple(float(x) for x in nodes), breakpoints=tuple(breaks))


class SolutionKind(str, Enum):
    REGULAR = "regular"
    IRREGULAR = "irregular"


@dataclass
class _Segment:
    lo: float
    hi: float
    dense: object
    scale: complex


@dataclass
class RadialSolution:
    kind: SolutionKind
    k: complex
    l: int
    nodes: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    cutoff: float
    segments: List[_Segment] = field(default_factory=list, repr=False)
    exterior: Optional[Callable[[float], Tuple[complex, complex]]] = field(default=None, repr=False)
    origin: Optional[Callable[[float], Tuple[complex, complex]]] = field(default=None, repr=False)

    def evaluate(self, r) -> Tuple[np.ndarray, np.ndarray]:
        """Значение и производная в произвольных точках через плотный вывод сегментов"""
        radii = np.atleast_1d(np.asarray(r, dtype=float))
        values = np.empty(radii.shape, dtype=complex)
        derivs = np.empty(radii.shape, dtype=complex)
        r_min = self.segments[0].lo

        for i, x in enumerate(radii):
            if x > self.cutoff:
                if self.exterior is None:
                    raise DomainError(f"Решение не продолжено за r = {self.cutoff}", {"r": float(x)})
                values[i], derivs[i] = self.exterior(float(x))
            elif x < r_min:
                if self.origin is None:
                    raise DomainError(f"Решение не определено при r < {r_min}", {"r": float(x)})
                values[i], derivs[i] = self.origin(float(x))
            else:
                segment = next(s for s in self.segments if s.lo <= x <= s.hi)
                y = segment.dense(x) * segment.scale
                values[i], derivs[i] = y[0], y[1]
        return values, derivs


def _segment_potential(potential, lo: float, hi: float) -> Callable[[float], float]:
    # значение изнутри сегмента, без скачка на левой границе
    inner = lo + 1e-9 * (hi - lo)
    return lambda r: potential.value(min(max(r, inner), hi))


def _rhs_factory(l: int, k: complex, v_func: Callable[[float], float]):
    centrifugal = l * (l + 1)
    k2 = k * k

    def rhs(r, y):
        return np.array([y[1], (centrifugal / (r * r) + v_func(r) - k2) * y[0]])

    return rhs


def _integrate_segments(potential, l: int, k: complex, bounds: Sequence[Tuple[float, float]],
                        y0: np.ndarray, nodes: np.ndarray, tol: float):
    """Последовательно проходит сегменты (в любом направлении), перезапуская интегратор на границах"""
    y = np.asarray(y0, dtype=complex)
    scale = 1.0 + 0j
    segments: List[_Segment] = []
    node_values = {}

    for start, stop in bounds:
        lo, hi = min(start, stop), max(start, stop)
        rhs = _rhs_factory(l, k, _segment_potential(potential, lo, hi))
        inside = nodes[(nodes >= lo) & (nodes <= hi)]
        t_eval = np.sort(inside) if stop > start else np.sort(inside)[::-1]
        sol = solve_ivp(rhs, (start, stop), y, method="DOP853", rtol=tol, atol=tol * 1e-6,
                        dense_output=True, t_eval=t_eval)
        if sol.status < 0:
            where = float(sol.t[-1]) if sol.t.size else start
            raise IntegrationError(
                f"Интегратор остановился около r = {where:.6g}: {sol.message}",
                {"r": where, "segment": [start, stop], "k": str(k)},
            )
        for t, col in zip(sol.t, sol.y.T):
            node_values[float(t)] = col * scale
        segments.append(_Segment(lo, hi, sol.sol, scale))

        y = sol.sol(stop)
        # линейное уравнение: нормируем, чтобы избежать переполнения
        norm = float(np.max(np.abs(y)))
        if not np.isfinite(norm):
            raise RangeError(f"Решение перестало быть конечным при r = {stop:.6g}", {"r": stop, "k": str(k)})
        if norm > 0:
            y = y / norm
            scale *= norm

    ordered = sorted(node_values)
    stacked = np.array([node_values[t] for t in ordered])
    if not np.all(np.isfinite(stacked)):
        raise RangeError("Решение вне диапазона double", {"k": str(k), "l": l})
    segments.sort(key=lambda s: s.lo)
    return np.array(ordered), stacked[:, 0], stacked[:, 1], segments, y * scale


def _frobenius(l: int, k: complex, v0: float, r: float) -> Tuple[complex, complex]:
    """Двучленный старт r^{l+1}/(2l+1)!! [1 + c r^2], c = (V(0) - k^2)/(2(2l+3))"""
    c = (v0 - k * k) / (2 * (2 * l + 3))
    norm = double_factorial_odd(l)
    value = r ** (l + 1) * (1 + c * r * r) / norm
    deriv = ((l + 1) * r ** l + c * (l + 3) * r ** (l + 2)) / norm
    return value, deriv


def _free_exterior(l: int, k: complex, r0: float, value: complex, deriv: complex):
    """Продолжение регулярного решения за R свободными решениями"""
    if k == 0:
        # r^{l+1} и r^{-l}, W = -(2l+1)
        u1, du1 = r0 ** (l + 1), (l + 1) * r0 ** l
        u2, du2 = r0 ** -l, -l * r0 ** (-l - 1)
        coeff_a = -wronskian(value, deriv, u2, du2) / (2 * l + 1)
        coeff_b = -wronskian(u1, du1, value, deriv) / (2 * l + 1)
        return lambda r: (coeff_a * r ** (l + 1) + coeff_b * r ** -l,
                          coeff_a * (l + 1) * r ** l - coeff_b * l * r ** (-l - 1))
    (u1, du1), (u2, du2) = riccati_pair(l, k, r0)
    coeff_a = k * wronskian(value, deriv, u2, du2)
    coeff_b = k * wronskian(u1, du1, value, deriv)

    def exterior(r):
        (v1, dv1), (v2, dv2) = riccati_pair(l, k, r)
        return coeff_a * v1 + coeff_b * v2, coeff_a * dv1 + coeff_b * dv2

    return exterior


def _with_exterior(radii: np.ndarray, values: np.ndarray, derivs: np.ndarray, nodes: np.ndarray,
                   cutoff: float, exterior: Callable[[float], Tuple[complex, complex]]):
    """Дописывает узлы сетки за R значениями внешнего решения"""
    outside = nodes[nodes > cutoff]
    if outside.size == 0:
        return radii, values, derivs
    pairs = np.array([exterior(float(r)) for r in outside], dtype=complex)
    return (np.concatenate([radii, outside]), np.concatenate([values, pairs[:, 0]]),
            np.concatenate([derivs, pairs[:, 1]]))


def integrate_regular(potential, l: int, k: complex, grid: Optional[RadialGrid] = None,
                      tol: float = DEFAULT_TOL) -> RadialSolution:
    """Регулярное решение phi_l(k, r): от r_min наружу до R"""
    l = check_l(l)
    k = check_momentum(k, allow_zero=True)
    grid = grid or RadialGrid.for_potential(potential, n_nodes=2)
    r_min = grid.r_min
    v0 = potential.value_at_origin()

    value, deriv = _frobenius(l, k, v0, r_min)
    if value == 0 or not np.isfinite(abs(deriv / value)):
        raise RangeError(f"Старт Фробениуса не представим в double при l = {l}", {"l": l, "r_min": r_min})
    start_scale = value
    y0 = np.array([1.0, deriv / value], dtype=complex)

    points = [r_min] + [b for b in grid.breakpoints if b > r_min]
    bounds = list(zip(points[:-1], points[1:]))
    nodes = np.asarray(grid.nodes, dtype=float)
    radii, values, derivs, segments, last = _integrate_segments(potential, l, k, bounds, y0, nodes, tol)
    for segment in segments:
        segment.scale *= start_scale
    values, derivs, last = values * start_scale, derivs * start_scale, last * start_scale
    logger.debug("Регулярное решение l=%d k=%s: %d сегментов", l, k, len(segments))

    cutoff = points[-1]
    exterior = _free_exterior(l, k, cutoff, last[0], last[1])
    radii, values, derivs = _with_exterior(radii, values, derivs, nodes, cutoff, exterior)
    return RadialSolution(
        kind=SolutionKind.REGULAR, k=k, l=l, nodes=radii, values=values, derivatives=derivs,
        cutoff=cutoff, segments=segments, exterior=exterior,
        origin=lambda r: _frobenius(l, k, v0, r),
    )


def integrate_irregular(potential, l: int, k: complex, grid: Optional[RadialGrid] = None,
                        tol: float = DEFAULT_TOL) -> RadialSolution:
    """Нерегулярное решение f_l(k, r): точный старт в R, интегрирование внутрь"""
    l = check_l(l)
    k = check_momentum(k)
    grid = grid or RadialGrid.for_potential(potential, n_nodes=2)
    cutoff = potential.cutoff_radius

    seed = np.array(outgoing_wave(l, k, cutoff), dtype=complex)
    points = [cutoff] + sorted((b for b in grid.breakpoints if grid.r_min < b < cutoff), reverse=True)
    points.append(grid.r_min)
    bounds = list(zip(points[:-1], points[1:]))
    nodes = np.asarray(grid.nodes, dtype=float)
    radii, values, derivs, segments, _ = _integrate_segments(potential, l, k, bounds, seed, nodes, tol)

    def exterior(r):
        return outgoing_wave(l, k, r)

    radii, values, derivs = _with_exterior(radii, values, derivs, nodes, cutoff, exterior)
    return RadialSolution(
        kind=SolutionKind.IRREGULAR, k=k, l=l, nodes=radii, values=values, derivatives=derivs,
        cutoff=cutoff, segments=segments, exterior=exterior,
    )


def regular_at_cutoff(potential, l: int, k: complex, tol: float = DEFAULT_TOL) -> Tuple[complex, complex]:
    solution = integrate_regular(potential, l, k, tol=tol)
    return solution.values[-1], solution.derivatives[-1]


def jost_function(potential, l: int, k: complex, tol: float = DEFAULT_TOL) -> complex:
    """f_l(k) = k^l W[f(k, .), phi(k, .)] в точке R"""
    l = check_l(l)
    k = check_momentum(k, allow_zero=(l == 0))
    cutoff = potential.cutoff_radius
    phi, dphi = regular_at_cutoff(potential, l, k, tol)
    wave, dwave = outgoing_wave(l, k, cutoff)
    return k ** l * wronskian(wave, dwave, phi, dphi)


@dataclass(frozen=True)
class CauchyDerivative:
    value: complex
    error: float


def _circle_estimate(func: Callable[[complex], complex], k: complex, h: float, points: int) -> complex:
    nodes = np.exp(2j * np.pi * np.arange(points) / points)
    samples = np.array([func(k + h * w) for w in nodes])
    return complex(np.mean(samples / (h * nodes)))


def cauchy_derivative(func: Callable[[complex], complex], k: complex, h: Optional[float] = None,
                      points: int = CAUCHY_POINTS, singular_at_origin: bool = False,
                      accept: float = CAUCHY_ACCEPT) -> CauchyDerivative:
    """
    f'(k) по формуле Коши на окружности радиуса h (M узлов трапеции).
    Контроль: вторая оценка на радиусе h/2, ошибка = |разность|.
    """
    k = complex(k)
    h = 1e-3 * max(1.0, abs(k)) if h is None else h
    if singular_at_origin:
        if k == 0:
            raise DomainError("Производная не определена в особой точке k = 0", {"k": "0"})
        h = min(h, abs(k) / 2)

    coarse = _circle_estimate(func, k, h, points)
    fine = _circle_estimate(func, k, h / 2, points)
    error = abs(fine - coarse)
    if not np.isfinite(error) or error > accept * (1.0 + abs(fine)):
        raise DerivativeError(
            f"Производная по k не сошлась: ошибка {error:.3e}",
            {"k": {"re": k.real, "im": k.imag}, "h": h, "error": float(error)},
        )
    return CauchyDerivative(value=fine, error=float(error))


def jost_derivative(potential, l: int, k: complex, tol: float = DEFAULT_TOL) -> CauchyDerivative:
    l = check_l(l)
    return cauchy_derivative(lambda x: jost_function(potential, l, x, tol), k, singular_at_origin=l > 0)


def numeric_irregular(potential, l: int, tol: float = DEFAULT_TOL) -> IrregularProvider:
    """Провайдер (k, r[]) -> (f, f') для численного нерегулярного решения"""
    def provider(k: complex, radii: np.ndarray):
        radii = np.asarray(radii, dtype=float)
        cutoff = potential.cutoff_radius
        inner = radii[radii <= cutoff]
        grid = None
        if inner.size:
            grid = RadialGrid.for_potential(potential, n_nodes=2, r_min=min(float(inner.min()), R_MIN_FRACTION * cutoff))
        return integrate_irregular(potential, l, k, grid, tol).evaluate(radii)

    return provider


def wronskian_identity_residual(irregular: IrregularProvider, k: complex, r_samples: Sequence[float],
                                h_k: float = 1e-2, h_r: Optional[float] = None) -> float:
    """
    max |d/dr W[df/dk, f] - 2k f^2| по точкам r_samples.
    Производные по k - окружность Коши радиуса h_k, по r - пятиточечная схема.
    """
    k = check_momentum(k)
    samples = np.asarray(r_samples, dtype=float)
    h_r = 1e-3 * float(samples.max()) if h_r is None else h_r
    offsets = np.array([-2, -1, 1, 2]) * h_r
    radii = np.concatenate([samples, (samples[:, None] + offsets[None, :]).ravel()])
    if np.any(radii <= 0):
        raise DomainError("Точки тождества должны лежать при r > 2 h_r", {"h_r": h_r})

    wave, dwave = irregular(k, radii)
    nodes = np.exp(2j * np.pi * np.arange(CAUCHY_POINTS) / CAUCHY_POINTS)
    dk_f = np.zeros(radii.shape, dtype=complex)
    dk_df = np.zeros(radii.shape, dtype=complex)
    for w in nodes:
        f_w, df_w = irregular(k + h_k * w, radii)
        dk_f += f_w / (h_k * w)
        dk_df += df_w / (h_k * w)
    dk_f /= CAUCHY_POINTS
    dk_df /= CAUCHY_POINTS

    cross = dk_f * dwave - dk_df * wave
    n = samples.size
    shifted = cross[n:].reshape(n, 4)
    d_cross = (-shifted[:, 3] + 8 * shifted[:, 2] - 8 * shifted[:, 1] + shifted[:, 0]) / (12 * h_r)
    residual = np.abs(d_cross - 2 * k * wave[:n] ** 2)
    return float(residual.max())
