"""
Поиск нулей функции Йоста в прямоугольнике плоскости k по принципу
аргумента, уточнение методом Ньютона и отслеживание траекторий нулей
при изменении параметра потенциала.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from jost.errors import (
    ClassificationError,
    ContourError,
    DegenerateZeroError,
    DerivativeError,
    JostError,
    MultipleZeroError,
    NewtonError,
)
from jost.evaluators import make_evaluator
from jost.pseudonorm import proportionality_constant, pseudonorm_formula
from models.core import PoleClass, classify
from models.models import ScanRegion

logger = logging.getLogger(__name__)

EDGE_START_POINTS = 16
MAX_EDGE_POINTS = 4096
MAX_DILATIONS = 3
NEWTON_MAX_ITER = 60
NEWTON_STEP_FLOOR = 1e-14
NEWTON_NOISE_STEP = 1e-8
MERGE_TOL = 1e-8
CELL_SLACK = 0.1

FLAG_MULTIPLE = "multiple-suspected"
FLAG_BOUNDARY = "boundary-uncertain"
FLAG_NEWTON = "newton-failed"
FLAG_RESIDUAL = "residual-above-tolerance"
FLAG_UNCLASSIFIED = "unclassified"
FLAG_THRESHOLD = "threshold"
FLAG_DEGENERATE = "degenerate"


@dataclass
class NewtonResult:
    k: complex
    iterations: int
    residual: float
    degraded: bool = False


@dataclass
class PoleRecord:
    k0: complex
    classification: Optional[PoleClass]
    residual: float
    jost_deriv: Optional[complex] = None
    pseudonorm: Optional[complex] = None
    norm_constant: Optional[complex] = None
    flags: List[str] = field(default_factory=list)

    @property
    def energy(self) -> complex:
        return self.k0 * self.k0


class _BoundaryHit(Exception):
    """Нуль функции на контуре или неразрешимый скачок фазы"""


def _edge_phase(value: Callable[[complex], complex], a: complex, b: complex, floor: float) -> float:
    """Приращение arg f вдоль отрезка [a, b]; шаги дробятся, пока |d arg| >= pi/2"""
    ts = list(np.linspace(0.0, 1.0, EDGE_START_POINTS + 1))
    fs = [value(a + (b - a) * t) for t in ts]
    if any(abs(f) < floor for f in fs):
        raise _BoundaryHit()

    total = 0.0
    i = 0
    while i < len(ts) - 1:
        step = math.atan2((fs[i + 1] / fs[i]).imag, (fs[i + 1] / fs[i]).real)
        if abs(step) >= math.pi / 2:
            if len(ts) >= MAX_EDGE_POINTS:
                raise _BoundaryHit()
            t_mid = 0.5 * (ts[i] + ts[i + 1])
            f_mid = value(a + (b - a) * t_mid)
            if abs(f_mid) < floor:
                raise _BoundaryHit()
            ts.insert(i + 1, t_mid)
            fs.insert(i + 1, f_mid)
            continue
        total += step
        i += 1
    return total


def _winding(jost, region: ScanRegion) -> int:
    corners = region.corners()
    # порог "нуля на контуре" относительно масштаба f в углах
    scale = max(abs(jost.value(c)) for c in corners)
    floor = 1e-10 * max(scale, 1e-300)
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        total += _edge_phase(jost.value, a, b, floor)
    turns = total / (2 * math.pi)
    count = int(round(turns))
    if abs(turns - count) > 0.1:
        raise _BoundaryHit()
    return count


def count_zeros_in(jost, region: ScanRegion) -> Tuple[int, ScanRegion, bool]:
    """Индекс контура с расширением области, если нуль лежит на границе"""
    current = region
    for attempt in range(MAX_DILATIONS + 1):
        try:
            count = _winding(jost, current)
            return count, current, attempt > 0
        except _BoundaryHit:
            logger.debug("Нуль у границы %s, расширение #%d", current, attempt + 1)
            current = current.dilated(region.boundary_margin)
    raise ContourError(
        "Не удалось посчитать индекс контура: нуль на границе после расширений",
        {"region": region.model_dump(), "dilations": MAX_DILATIONS},
    )


def count_zeros(jost, region: ScanRegion) -> int:
    """Число нулей f внутри прямоугольника (с учетом кратности)"""
    count, _, _ = count_zeros_in(jost, region)
    return count


def newton_refine(jost, k_start: complex, tol: float = 1e-12, max_iter: int = NEWTON_MAX_ITER) -> NewtonResult:
    """k <- k - f/f'; остановка по |f| < tol(1+|k|), шагу < 1e-14(1+|k|) или на уровне шума f"""
    k = complex(k_start)
    steps: List[float] = []
    previous = math.inf
    for iteration in range(max_iter + 1):
        value = jost.value(k)
        residual = abs(value)
        if residual < tol * (1.0 + abs(k)):
            return NewtonResult(k, iteration, residual, _degraded(steps, k))
        # шум численного движка: шаг мал, а невязка больше не падает
        if steps and steps[-1] < NEWTON_NOISE_STEP * (1.0 + abs(k)) and residual >= previous:
            return NewtonResult(k, iteration, residual, _degraded(steps, k))
        previous = residual
        if iteration == max_iter:
            break
        derivative = jost.derivative(k)
        if derivative == 0 or not np.isfinite(abs(derivative)):
            raise NewtonError(f"Нулевая производная в k = {k}", {"k": str(k), "iterations": iteration})
        step = value / derivative
        k -= step
        steps.append(abs(step))
        logger.debug("Ньютон: итерация %d, k = %s, |f| = %.3e", iteration + 1, k, residual)
        if not np.isfinite(abs(k)):
            raise NewtonError("Итерации Ньютона ушли на бесконечность", {"k_start": str(k_start)})
        if abs(step) < NEWTON_STEP_FLOOR * (1.0 + abs(k)):
            return NewtonResult(k, iteration + 1, abs(jost.value(k)), _degraded(steps, k))
    raise NewtonError(
        f"Ньютон не сошелся за {max_iter} итераций",
        {"k_start": str(k_start), "k": str(k), "residual": residual},
    )


def _degraded(steps: List[float], k: complex) -> bool:
    # квадратичная сходимость: отношение шагов стремится к нулю; у кратного нуля - к константе
    scale = 1.0 + abs(k)
    for s1, s2 in zip(steps, steps[1:]):
        if 1e-10 * scale < s2 and s1 < 1e-4 * scale and s2 > 0.3 * s1:
            return True
    return False


@dataclass
class _Candidate:
    k: complex
    flags: List[str]


def _refine_cell(jost, cell: ScanRegion, flags: List[str]) -> _Candidate:
    accept = cell.dilated(CELL_SLACK)
    starts = [cell.center] + [q.center for q in cell.quadrants()]
    for start in starts:
        try:
            result = newton_refine(jost, start, cell.newton_tol)
        except (NewtonError, DerivativeError) as e:
            logger.debug("Ньютон из %s: %s", start, e)
            continue
        if accept.contains(result.k):
            extra = [FLAG_MULTIPLE] if result.degraded else []
            return _Candidate(result.k, flags + extra)
    logger.warning("Ньютон не нашел нуль в ячейке %s", cell)
    return _Candidate(cell.center, flags + [FLAG_NEWTON])


def _subdivide(jost, cell: ScanRegion, count: int, depth: int, flags: List[str], out: List[_Candidate]) -> None:
    if count <= 0:
        return
    if count == 1:
        out.append(_refine_cell(jost, cell, flags))
        return
    if depth >= cell.max_depth:
        logger.warning("Глубина %d исчерпана: %d нулей в %s", depth, count, cell)
        candidate = _refine_cell(jost, cell, flags + [FLAG_MULTIPLE])
        out.append(candidate)
        return

    found = 0
    for quadrant in cell.quadrants():
        sub_count, used, dilated = count_zeros_in(jost, quadrant)
        found += sub_count
        _subdivide(jost, used, sub_count, depth + 1, flags + ([FLAG_BOUNDARY] if dilated else []), out)
    if found != count:
        logger.debug("Сумма по квадрантам %d != %d для %s", found, count, cell)


def _merge(candidates: Iterable[_Candidate]) -> List[_Candidate]:
    merged: List[_Candidate] = []
    for candidate in candidates:
        twin = next(
            (m for m in merged if abs(m.k - candidate.k) < MERGE_TOL * (1.0 + abs(candidate.k))),
            None,
        )
        if twin is None:
            merged.append(_Candidate(candidate.k, list(candidate.flags)))
        else:
            twin.flags.extend(f for f in candidate.flags if f not in twin.flags)
    return merged


def describe_zero(jost, k0: complex, region: ScanRegion, flags: Optional[List[str]] = None) -> PoleRecord:
    """Классификация, невязка, псевдонорма и константа нормировки в найденном нуле"""
    flags = list(dict.fromkeys(flags or []))
    residual = abs(jost.value(k0))
    if residual >= region.newton_tol * (1.0 + abs(k0)) and FLAG_NEWTON not in flags:
        flags.append(FLAG_RESIDUAL)

    try:
        classification: Optional[PoleClass] = classify(k0, region.class_tol)
    except ClassificationError:
        classification = None
        flags.append(FLAG_UNCLASSIFIED)

    record = PoleRecord(k0=k0, classification=classification, residual=residual, flags=flags)
    if abs(k0) < region.class_tol or FLAG_NEWTON in flags:
        if FLAG_NEWTON not in flags:
            flags.append(FLAG_THRESHOLD)
        return record

    try:
        record.jost_deriv = jost.derivative(k0)
        record.pseudonorm = pseudonorm_formula(jost, k0)
    except MultipleZeroError:
        flags.append(FLAG_MULTIPLE)
    except JostError as e:
        logger.warning("Псевдонорма в k0 = %s не посчитана: %s", k0, e.message)
    try:
        record.norm_constant = proportionality_constant(jost, k0)
    except DegenerateZeroError:
        flags.append(FLAG_DEGENERATE)
    record.flags = list(dict.fromkeys(flags))
    return record


def scan_poles(jost, region: ScanRegion) -> Tuple[int, List[PoleRecord]]:
    """
    Индекс контура области и все нули f в ней: рекурсивное деление
    на квадранты и Ньютон в ячейках с одним нулем
    """
    total, used, dilated = count_zeros_in(jost, region)
    logger.info("Индекс контура %s: %d", region, total)
    candidates: List[_Candidate] = []
    _subdivide(jost, used, total, 0, [FLAG_BOUNDARY] if dilated else [], candidates)

    records = [describe_zero(jost, c.k, region, c.flags) for c in _merge(candidates)]
    records.sort(key=lambda rec: (rec.k0.real, rec.k0.imag))
    for record in records:
        if record.flags:
            logger.warning("Нуль k0 = %s помечен: %s", record.k0, ", ".join(record.flags))
    return total, records


def find_poles(jost, region: ScanRegion) -> List[PoleRecord]:
    """Все нули f в области, упорядоченные по (Re k0, Im k0)"""
    _, records = scan_poles(jost, region)
    return records


@dataclass
class TrajectoryPoint:
    parameter: float
    k0: complex
    classification: Optional[PoleClass]
    pseudonorm: Optional[complex]
    branch: int


@dataclass
class Branch:
    branch: int
    start: float
    end: float
    k: complex
    last_step: float = 0.0
    reason: Optional[str] = None


@dataclass
class Trajectory:
    points: List[TrajectoryPoint]
    branches: List[Branch]


def _point(jost, parameter: float, k0: complex, region: ScanRegion, branch: int) -> TrajectoryPoint:
    try:
        classification: Optional[PoleClass] = classify(k0, region.class_tol)
    except ClassificationError:
        classification = None
    try:
        norm: Optional[complex] = pseudonorm_formula(jost, k0)
    except JostError:
        norm = None
    return TrajectoryPoint(parameter, k0, classification, norm, branch)


def trajectory(family: Callable[[float], object], parameters: List[float], l: int, region: ScanRegion,
               engine: str = "auto", tol: float = 1e-11) -> Trajectory:
    """
    Траектории нулей при изменении параметра: нули в первой точке ищутся
    find_poles, дальше каждая ветвь продолжается Ньютоном от предыдущего k0.
    Скачок больше max(4|последний шаг|, 0.05(1+|k|)) открывает новую ветвь.
    """
    if not parameters:
        return Trajectory(points=[], branches=[])

    first = parameters[0]
    jost = make_evaluator(family(first), l, engine, tol)
    branches: List[Branch] = []
    points: List[TrajectoryPoint] = []
    for record in find_poles(jost, region):
        if FLAG_NEWTON in record.flags:
            continue
        branch = Branch(branch=len(branches), start=first, end=first, k=record.k0)
        branches.append(branch)
        points.append(_point(jost, first, record.k0, region, branch.branch))

    for parameter in parameters[1:]:
        jost = make_evaluator(family(parameter), l, engine, tol)
        for branch in [b for b in branches if b.reason is None]:
            try:
                result = newton_refine(jost, branch.k, region.newton_tol)
            except (NewtonError, DerivativeError) as e:
                branch.reason = f"newton-failed at {parameter:.6g}"
                logger.warning("Ветвь %d оборвана при параметре %g: %s", branch.branch, parameter, e.message)
                continue

            jump = abs(result.k - branch.k)
            limit = max(4 * branch.last_step, 0.05 * (1.0 + abs(branch.k)))
            target = branch
            if jump > limit:
                branch.reason = f"jump at {parameter:.6g}"
                logger.warning("Скачок нуля %.3g > %.3g при параметре %g: новая ветвь", jump, limit, parameter)
                target = Branch(branch=len(branches), start=parameter, end=parameter, k=result.k)
                branches.append(target)
            else:
                target.last_step = jump

            twin = next(
                (b for b in branches
                 if b is not target and b.reason is None and b.end == parameter
                 and abs(b.k - result.k) < MERGE_TOL * (1.0 + abs(result.k))),
                None,
            )
            if twin is not None:
                target.reason = f"merged with {twin.branch} at {parameter:.6g}"
                continue
            target.k = result.k
            target.end = parameter
            points.append(_point(jost, parameter, result.k, region, target.branch))

    for branch in branches:
        if branch.reason is None:
            branch.reason = "completed"
    return Trajectory(points=points, branches=branches)
