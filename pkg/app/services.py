import logging
import math
from typing import Callable, List, Optional

import numpy as np
from pydantic import ValidationError

from jost.errors import DomainError, JostError, PreconditionError, RangeError
from jost.evaluators import make_evaluator
from jost.poles import newton_refine, scan_poles, trajectory
from jost.pseudonorm import proportionality_constant, pseudonorm_formula, pseudonorm_oracle
from models.core import (
    PiecewiseConstant,
    Sampled,
    SquareWell,
    classify,
    energy,
)
from models.models import (
    BranchOut,
    ComplexValue,
    EpsilonRow,
    JostGridReport,
    JostGridRow,
    PoleRecordOut,
    PoleReport,
    PseudonormReport,
    RunConfig,
    ScanRegion,
    TrajectoryReport,
    TrajectoryRow,
)

logger = logging.getLogger(__name__)


def _require_region(config: RunConfig) -> ScanRegion:
    if config.region is None:
        raise PreconditionError("Не задана область поиска (--re, --im)", {"field": "region"})
    return config.region


def _class_name(k0: complex, tol: float) -> Optional[str]:
    try:
        return classify(k0, tol).value
    except JostError:
        return None


class PoleService:
    @staticmethod
    def find(config: RunConfig) -> PoleReport:
        """Все нули функции Йоста в области с классификацией и псевдонормами"""
        region = _require_region(config)
        jost = make_evaluator(config.potential, config.l, config.engine, config.tol)

        winding, records = scan_poles(jost, region)
        poles = [
            PoleRecordOut(
                k0=ComplexValue.of(record.k0),
                E=ComplexValue.of(energy(record.k0)),
                classification=record.classification.value if record.classification else None,
                residual=record.residual,
                pseudonorm=ComplexValue.maybe(record.pseudonorm),
                norm_constant=ComplexValue.maybe(record.norm_constant),
                flags=record.flags,
            )
            for record in records
        ]
        logger.info("Найдено нулей: %d (индекс контура %d)", len(poles), winding)
        return PoleReport(
            potential=config.potential.model_dump(by_alias=True),
            l=config.l,
            engine=jost.engine,
            region=region,
            winding_number=winding,
            poles=poles,
        )

    @staticmethod
    def is_flagged(report: PoleReport) -> bool:
        return any(pole.flags for pole in report.poles)


class PseudonormService:
    @staticmethod
    def compute(config: RunConfig) -> PseudonormReport:
        """Ньютон от k0, затем псевдонорма по формуле и независимой квадратурой"""
        if config.k0 is None:
            raise PreconditionError("Не задано начальное приближение --k0", {"field": "k0"})
        region = config.region or ScanRegion(re_min=-1, re_max=1, im_min=-1, im_max=1)
        jost = make_evaluator(config.potential, config.l, config.engine, config.tol)

        start = config.k0.to_complex()
        refined = newton_refine(jost, start, region.newton_tol)
        k0 = refined.k
        formula = pseudonorm_formula(jost, k0)
        oracle, oracle_error, method, regularized = pseudonorm_oracle(jost, k0, config.schedule)
        discrepancy = abs(formula - oracle) / max(abs(formula), 1e-300)

        table = None
        if config.trace and regularized is not None:
            table = [EpsilonRow(eps=eps, value=ComplexValue.of(v)) for eps, v in regularized.table()]

        logger.info("Псевдонорма k0=%s: формула %s, %s %s", k0, formula, method, oracle)
        return PseudonormReport(
            potential=config.potential.model_dump(by_alias=True),
            l=config.l,
            engine=jost.engine,
            k0_start=ComplexValue.of(start),
            k0=ComplexValue.of(k0),
            classification=_class_name(k0, region.class_tol),
            newton_iterations=refined.iterations,
            formula=ComplexValue.of(formula),
            oracle=ComplexValue.of(oracle),
            oracle_method=method,
            oracle_error=oracle_error,
            discrepancy=discrepancy,
            norm_constant=ComplexValue.of(proportionality_constant(jost, k0)),
            table=table,
        )


class GridService:
    @staticmethod
    def evaluate(config: RunConfig) -> JostGridReport:
        """|f| и arg f на прямоугольной сетке; Re k меняется быстрее"""
        region = _require_region(config)
        jost = make_evaluator(config.potential, config.l, config.engine, config.tol)
        nx, ny = config.resolution

        rows: List[JostGridRow] = []
        for im in np.linspace(region.im_min, region.im_max, ny):
            for re in np.linspace(region.re_min, region.re_max, nx):
                k = complex(float(re), float(im))
                try:
                    value = jost.value(k)
                    abs_f, arg_f = abs(value), math.atan2(value.imag, value.real)
                except (DomainError, RangeError):
                    abs_f, arg_f = math.nan, math.nan
                rows.append(JostGridRow(re_k=float(re), im_k=float(im), abs_f=abs_f, arg_f=arg_f))
        return JostGridReport(
            potential=config.potential.model_dump(by_alias=True),
            l=config.l,
            engine=jost.engine,
            resolution=(nx, ny),
            rows=rows,
        )


def potential_family(potential, parameter: str) -> Callable[[float], object]:
    """Семейство потенциалов по параметру развертки"""
    if parameter in ("V0", "a") and not isinstance(potential, SquareWell):
        raise PreconditionError(
            f"Параметр {parameter} определен только для прямоугольной ямы",
            {"parameter": parameter, "potential": potential.type},
        )
    if parameter == "V0":
        return lambda p: SquareWell(depth=p, radius=potential.radius)
    if parameter == "a":
        return lambda p: SquareWell(depth=potential.depth, radius=p)

    if isinstance(potential, SquareWell):
        return lambda p: SquareWell(depth=potential.depth * p, radius=potential.radius)
    if isinstance(potential, PiecewiseConstant):
        return lambda p: PiecewiseConstant(
            breakpoints=potential.breakpoints, values=[v * p for v in potential.values], cutoff=potential.cutoff
        )
    if isinstance(potential, Sampled):
        return lambda p: Sampled(grid=potential.grid, values=[v * p for v in potential.values], cutoff=potential.cutoff)
    raise PreconditionError(f"Неизвестный тип потенциала: {potential.type}", {"potential": potential.type})


class TrajectoryService:
    @staticmethod
    def run(config: RunConfig) -> TrajectoryReport:
        """Траектории нулей при развертке параметра"""
        region = _require_region(config)
        if config.sweep is None:
            raise PreconditionError("Не задана развертка --sweep", {"field": "sweep"})
        family = potential_family(config.potential, config.sweep.parameter)
        parameters = config.sweep.values()
        try:
            members = {p: family(p) for p in parameters}
        except ValidationError as e:
            raise PreconditionError(
                f"Развертка выходит за допустимые потенциалы: {e.errors()[0]['msg']}",
                {"parameter": config.sweep.parameter},
            )
        result = trajectory(members.__getitem__, parameters, config.l, region, config.engine, config.tol)

        rows = [
            TrajectoryRow(
                parameter=point.parameter,
                k0=ComplexValue.of(point.k0),
                classification=point.classification.value if point.classification else None,
                pseudonorm=ComplexValue.maybe(point.pseudonorm),
                branch=point.branch,
            )
            for point in result.points
        ]
        branches = [BranchOut(branch=b.branch, start=b.start, end=b.end, reason=b.reason) for b in result.branches]
        return TrajectoryReport(
            potential=config.potential.model_dump(by_alias=True),
            l=config.l,
            engine=make_evaluator(config.potential, config.l, config.engine, config.tol).engine,
            sweep=config.sweep,
            rows=rows,
            branches=branches,
        )


pole_service = PoleService()
pseudonorm_service = PseudonormService()
grid_service = GridService()
trajectory_service = TrajectoryService()
