"""
Командная строка: poles, pseudonorm, jost-grid, trajectory, serve.

Коды выхода: 0 - успех, 1 - ошибка конфигурации, 2 - есть помеченные нули,
3 - ошибка вычисления (диагностика JSON в stderr).
"""

import argparse
import csv
import io
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import TypeAdapter, ValidationError

from app.services import grid_service, pole_service, pseudonorm_service, trajectory_service
from jost.errors import JostError
from models.core import UNITS_LINE, PotentialSpec
from models.models import (
    ComplexValue,
    JostGridReport,
    PoleReport,
    PseudonormReport,
    RunConfig,
    TrajectoryReport,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FLAGGED = 2
EXIT_COMPUTE = 3

# путь в RunConfig -> флаг командной строки
FLAG_NAMES = {
    "re_min": "--re", "re_max": "--re", "im_min": "--im", "im_max": "--im",
    "max_depth": "--max-depth", "newton_tol": "--newton-tol", "boundary_margin": "--boundary-margin",
    "class_tol": "--class-tol", "engine": "--engine", "tol": "--tol", "eps0": "--eps0",
    "ratio": "--ratio", "count": "--count", "output_format": "--format", "k0": "--k0",
    "sweep": "--sweep", "resolution": "--resolution", "l": "--l",
    "depth": "--well", "radius": "--radius", "V0": "--well", "a": "--radius",
    "potential": "--potential-file",
}


class ConfigError(Exception):
    """Неверные аргументы командной строки"""

    def __init__(self, message: str, flag: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.flag = flag

    def to_dict(self) -> Dict[str, Any]:
        return {"error": "ConfigError", "detail": self.message, "payload": {"flag": self.flag}}


# флаги, значения которых могут начинаться с минуса
VALUE_FLAGS = ("--re", "--im", "--k0", "--sweep")
_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def join_negative_values(argv: Sequence[str]) -> List[str]:
    """['--re', '-6:6'] -> ['--re=-6:6']: argparse иначе считает '-6:6' флагом"""
    joined: List[str] = []
    items = list(argv)
    i = 0
    while i < len(items):
        item = items[i]
        if item in VALUE_FLAGS and i + 1 < len(items) and _NEGATIVE_VALUE.match(items[i + 1]):
            joined.append(f"{item}={items[i + 1]}")
            i += 2
            continue
        joined.append(item)
        i += 1
    return joined


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _flag_for(error: ValidationError) -> Optional[str]:
    for item in error.errors():
        for part in reversed(item["loc"]):
            if part in FLAG_NAMES:
                return FLAG_NAMES[part]
    return None


def parse_range(text: str, flag: str) -> Tuple[float, float]:
    """'lo:hi' -> (lo, hi)"""
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"Ожидается диапазон lo:hi, получено '{text}'", flag)
    if not lo < hi:
        raise ConfigError(f"Пустой диапазон '{text}': нужно lo < hi", flag)
    return lo, hi


def parse_complex(text: str, flag: str = "--k0") -> complex:
    """'0.1-0.6j' или 're,im'"""
    try:
        if "," in text:
            real, imag = (float(x) for x in text.split(","))
            return complex(real, imag)
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"Не удалось разобрать комплексное число '{text}'", flag)


def parse_sweep(text: str) -> Dict[str, Any]:
    """'V0=lo:hi:steps'"""
    try:
        name, spec = text.split("=")
        lo, hi, steps = spec.split(":")
        return {"parameter": name, "lo": float(lo), "hi": float(hi), "steps": int(steps)}
    except ValueError:
        raise ConfigError(f"Ожидается PARAM=lo:hi:steps, получено '{text}'", "--sweep")


def parse_resolution(text: str) -> Tuple[int, int]:
    try:
        nx, ny = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"Ожидается NxM, получено '{text}'", "--resolution")
    return nx, ny


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    potential = common.add_argument_group("потенциал")
    potential.add_argument("--well", type=float, help="Глубина прямоугольной ямы V0")
    potential.add_argument("--radius", type=float, default=1.0, help="Радиус ямы a")
    potential.add_argument("--potential-file", help="JSON с описанием потенциала")
    common.add_argument("--l", type=int, default=0, help="Орбитальный момент")
    common.add_argument("--re", help="Диапазон Re k, lo:hi")
    common.add_argument("--im", help="Диапазон Im k, lo:hi")
    common.add_argument("--max-depth", type=int, default=8)
    common.add_argument("--newton-tol", type=float, default=1e-12)
    common.add_argument("--boundary-margin", type=float, default=1e-3)
    common.add_argument("--class-tol", type=float, default=1e-8)
    common.add_argument("--engine", default="auto", help="auto | analytic | numeric")
    common.add_argument("--tol", type=float, default=1e-11, help="Допуск ОДУ")
    common.add_argument("--format", dest="output_format", default="json", help="json | csv")
    common.add_argument("--output", help="Файл вывода (по умолчанию stdout)")
    common.add_argument("-v", "--verbose", action="store_true", help="Отладочный лог в stderr")

    parser = _Parser(prog="jost", description="Нули функции Йоста и псевдонормы (" + UNITS_LINE + ")")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("poles", parents=[common], help="Все нули в области")

    pseudonorm = commands.add_parser("pseudonorm", parents=[common], help="Псевдонорма у заданного k0")
    pseudonorm.add_argument("--k0", required=True, help="Начальное приближение, например 0-0.6j")
    pseudonorm.add_argument("--eps0", type=float)
    pseudonorm.add_argument("--ratio", type=float, default=0.5)
    pseudonorm.add_argument("--count", type=int, default=8)
    pseudonorm.add_argument("--trace", action="store_true", help="Таблица N_eps")

    grid = commands.add_parser("jost-grid", parents=[common], help="|f| и arg f на сетке")
    grid.add_argument("--resolution", default="100x100", help="NxM, не больше 400x400")

    sweep = commands.add_parser("trajectory", parents=[common], help="Траектории нулей")
    sweep.add_argument("--sweep", required=True, help="PARAM=lo:hi:steps, PARAM = V0 | a | scale")

    serve = commands.add_parser("serve", help="HTTP сервер")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    return parser


def _load_potential(args) -> Dict[str, Any]:
    if args.potential_file:
        try:
            text = Path(args.potential_file).read_text()
        except OSError as e:
            raise ConfigError(f"Не удалось прочитать {args.potential_file}: {e}", "--potential-file")
        try:
            return TypeAdapter(PotentialSpec).validate_json(text).model_dump()
        except ValidationError as e:
            raise ConfigError(f"Неверный файл потенциала: {e.errors()[0]['msg']}", "--potential-file")
    if args.well is None:
        raise ConfigError("Нужен --well V0 или --potential-file", "--well")
    return {"type": "square_well", "depth": args.well, "radius": args.radius}


def build_config(args) -> RunConfig:
    """Собирает RunConfig из аргументов; ошибки валидации указывают на флаг"""
    data: Dict[str, Any] = {
        "potential": _load_potential(args),
        "l": args.l,
        "engine": args.engine,
        "tol": args.tol,
        "output_format": args.output_format,
    }

    re_range = parse_range(args.re, "--re") if args.re else None
    im_range = parse_range(args.im, "--im") if args.im else None
    if (re_range is None) != (im_range is None):
        raise ConfigError("--re и --im задаются вместе", "--re" if re_range is None else "--im")
    if re_range is None and args.command == "pseudonorm":
        re_range, im_range = (-1.0, 1.0), (-1.0, 1.0)
    if re_range is not None:
        data["region"] = {
            "re_min": re_range[0], "re_max": re_range[1],
            "im_min": im_range[0], "im_max": im_range[1],
            "max_depth": args.max_depth, "newton_tol": args.newton_tol,
            "boundary_margin": args.boundary_margin, "class_tol": args.class_tol,
        }

    if args.command == "pseudonorm":
        data["k0"] = ComplexValue.of(parse_complex(args.k0)).model_dump()
        data["trace"] = args.trace
        data["schedule"] = {"eps0": args.eps0, "ratio": args.ratio, "count": args.count}
    elif args.command == "jost-grid":
        data["resolution"] = parse_resolution(args.resolution)
    elif args.command == "trajectory":
        data["sweep"] = parse_sweep(args.sweep)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}", _flag_for(e))


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _split(value: Optional[ComplexValue]) -> List[str]:
    return ["", ""] if value is None else [_fmt(value.re), _fmt(value.im)]


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    buffer.write(f"# {UNITS_LINE}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def poles_csv(report: PoleReport) -> str:
    rows = [
        _split(p.k0) + _split(p.E) + [p.classification or "", _fmt(p.residual)]
        + _split(p.pseudonorm) + _split(p.norm_constant) + [";".join(p.flags)]
        for p in report.poles
    ]
    header = ["re_k0", "im_k0", "re_E", "im_E", "class", "residual", "re_N", "im_N", "re_C", "im_C", "flags"]
    return _csv(header, rows)


def pseudonorm_csv(report: PseudonormReport) -> str:
    header = ["re_k0", "im_k0", "class", "iterations", "re_formula", "im_formula",
              "re_oracle", "im_oracle", "oracle_method", "discrepancy"]
    row = (_split(report.k0) + [report.classification or "", str(report.newton_iterations)]
           + _split(report.formula) + _split(report.oracle) + [report.oracle_method, _fmt(report.discrepancy)])
    text = _csv(header, [row])
    if report.table:
        writer_rows = [[_fmt(r.eps)] + _split(r.value) for r in report.table]
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["eps", "re_N", "im_N"])
        writer.writerows(writer_rows)
        text += "\n" + buffer.getvalue()
    return text


def grid_csv(report: JostGridReport) -> str:
    rows = [[_fmt(r.re_k), _fmt(r.im_k), _fmt(r.abs_f), _fmt(r.arg_f)] for r in report.rows]
    return _csv(["re_k", "im_k", "abs_f", "arg_f"], rows)


def trajectory_csv(report: TrajectoryReport) -> str:
    rows = [
        [_fmt(r.parameter)] + _split(r.k0) + [r.classification or ""] + _split(r.pseudonorm) + [str(r.branch)]
        for r in report.rows
    ]
    return _csv(["parameter", "re_k0", "im_k0", "class", "re_N", "im_N", "branch"], rows)


CSV_WRITERS = {
    "poles": poles_csv,
    "pseudonorm": pseudonorm_csv,
    "jost-grid": grid_csv,
    "trajectory": trajectory_csv,
}

RUNNERS = {
    "poles": pole_service.find,
    "pseudonorm": pseudonorm_service.compute,
    "jost-grid": grid_service.evaluate,
    "trajectory": trajectory_service.run,
}


def render(command: str, report, output_format: str) -> str:
    if output_format == "csv":
        return CSV_WRITERS[command](report)
    return report.model_dump_json(by_alias=True, indent=2) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(payload: Dict[str, Any], code: int) -> int:
    sys.stderr.write(json.dumps(payload, ensure_ascii=False, sort_keys=True, default=str) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(join_negative_values(sys.argv[1:] if argv is None else argv))
    except ConfigError as e:
        return _fail(e.to_dict(), EXIT_CONFIG)

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    if args.command == "serve":
        from main import serve
        serve(host=args.host, port=args.port)
        return EXIT_OK

    try:
        config = build_config(args)
    except ConfigError as e:
        return _fail(e.to_dict(), EXIT_CONFIG)

    try:
        report = RUNNERS[args.command](config)
    except JostError as e:
        return _fail(e.to_dict(), EXIT_COMPUTE)

    _emit(render(args.command, report, config.output_format), args.output)
    if args.command == "poles" and pole_service.is_flagged(report):
        return EXIT_FLAGGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
