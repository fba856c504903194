"""
Тесты командной строки: коды выхода, JSON и CSV вывод, диагностика ошибок
"""

import json

import pytest

from app.cli import EXIT_COMPUTE, EXIT_CONFIG, EXIT_FLAGGED, EXIT_OK, main
from app.services import potential_family
from jost.errors import PreconditionError
from models.core import UNITS_LINE, PiecewiseConstant, Sampled, SquareWell


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _diagnostic(err: str) -> dict:
    return json.loads(err.strip().splitlines()[-1])


class TestPolesCommand:
    """jost poles"""

    def test_01_bound_state_json(self, capsys, bound_k0):
        """
        Тест 1: V0 = 4, одно связанное состояние в малой области
        """
        code, out, _ = _run(capsys, "poles", "--well", "4", "--re=-0.5:0.5", "--im=-1:-0.2")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["units"] == UNITS_LINE
        assert report["engine"] == "analytic"
        assert report["winding_number"] == 1
        assert len(report["poles"]) == 1
        pole = report["poles"][0]
        assert pole["class"] == "bound"
        assert abs(complex(pole["k0"]["re"], pole["k0"]["im"]) - bound_k0) < 1e-9
        assert pole["pseudonorm"]["re"] > 0
        assert pole["flags"] == []
        print(f"\n  k0 = {pole['k0']}, N = {pole['pseudonorm']}")

    def test_02_csv(self, capsys):
        """
        Тест 2: CSV начинается со строки единиц и заголовка
        """
        code, out, _ = _run(capsys, "poles", "--well", "4", "--re=-6:6", "--im=-2:3", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == f"# {UNITS_LINE}"
        assert lines[1] == "re_k0,im_k0,re_E,im_E,class,residual,re_N,im_N,re_C,im_C,flags"
        classes = {line.split(",")[4] for line in lines[2:]}
        assert {"bound", "resonant"} <= classes

    def test_03_deterministic(self, capsys):
        """
        Тест 3: два одинаковых запуска дают одинаковый вывод
        """
        argv = ["poles", "--well", "4", "--re=-6:6", "--im=-2:3"]
        _, first, _ = _run(capsys, *argv)
        _, second, _ = _run(capsys, *argv)
        assert first == second

    def test_04_flagged_exit_code(self, capsys, bound_k0):
        """
        Тест 4: нуль на границе области - код выхода 2
        """
        code, out, _ = _run(capsys, "poles", "--well", "4", "--re=-0.5:0.5", f"--im={bound_k0.imag!r}:0.5")
        assert code == EXIT_FLAGGED
        report = json.loads(out)
        assert "boundary-uncertain" in report["poles"][0]["flags"]

    def test_05_output_file(self, capsys, tmp_path):
        """
        Тест 5: --output пишет отчет в файл, stdout пуст
        """
        target = tmp_path / "poles.json"
        code, out, _ = _run(capsys, "poles", "--well", "2", "--re=-0.5:0.5", "--im=-1:1", "--output", str(target))
        assert code == EXIT_OK
        assert out == ""
        report = json.loads(target.read_text())
        assert [p["class"] for p in report["poles"]] == ["virtual"]

    def test_06_potential_file(self, capsys, tmp_path):
        """
        Тест 6: кусочно-постоянный потенциал из файла считается численно
        """
        spec = tmp_path / "well.json"
        spec.write_text(json.dumps({"type": "piecewise_constant", "breakpoints": [], "values": [-4.0], "cutoff": 1.0}))
        code, out, _ = _run(capsys, "poles", "--potential-file", str(spec), "--re=-0.5:0.5", "--im=-1:-0.2",
                            "--newton-tol", "1e-8")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["engine"] == "numeric"
        assert len(report["poles"]) == 1

    def test_07_negative_range_as_separate_token(self, capsys, bound_k0):
        """
        Тест 7: '--re -6:6' отдельным словом разбирается как диапазон
        """
        argv = ["poles", "--well", "4", "--radius", "1", "--l", "0", "--re", "-6:6", "--im", "-2:3",
                "--format", "json"]
        code, out, _ = _run(capsys, *argv)
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["region"]["re_min"] == -6.0 and report["region"]["im_min"] == -2.0
        bound = [p for p in report["poles"] if p["class"] == "bound"]
        assert len(bound) == 1
        assert abs(complex(bound[0]["k0"]["re"], bound[0]["k0"]["im"]) - bound_k0) < 1e-9
        _, joined, _ = _run(capsys, "poles", "--well", "4", "--re=-6:6", "--im=-2:3")
        assert joined == out

    def test_08_square_well_report_keys(self, capsys):
        """
        Тест 8: яма в отчете записана как {type, V0, a}
        """
        code, out, _ = _run(capsys, "poles", "--well", "4", "--radius", "1.5", "--re=-0.5:0.5", "--im=-1:-0.2")
        assert code in (EXIT_OK, EXIT_FLAGGED)
        assert json.loads(out)["potential"] == {"type": "square_well", "V0": 4.0, "a": 1.5}


class TestConfigErrors:
    """Ошибки конфигурации: код 1 и флаг в диагностике"""

    @pytest.mark.parametrize("argv, flag", [
        (["poles", "--re=-1:1", "--im=-1:1"], "--well"),
        (["poles", "--well", "4", "--re=-1:1"], "--im"),
        (["poles", "--well", "4", "--re=1:-1", "--im=-1:1"], "--re"),
        (["poles", "--well", "4", "--re", "-1:-3", "--im", "-1:1"], "--re"),
        (["poles", "--well", "4", "--re=a:b", "--im=-1:1"], "--re"),
        (["poles", "--well", "4", "--re=-1:1", "--im=-1:1", "--engine", "spectral"], "--engine"),
        (["pseudonorm", "--well", "4", "--k0", "bad"], "--k0"),
        (["trajectory", "--well", "4", "--re=-1:1", "--im=-1:1", "--sweep", "V0=2:4"], "--sweep"),
        (["jost-grid", "--well", "4", "--re=-1:1", "--im=-1:1", "--resolution", "10"], "--resolution"),
    ])
    def test_01_flag_reported(self, capsys, argv, flag):
        """
        Тест 1: неверный аргумент указывается в payload.flag
        """
        code, out, err = _run(capsys, *argv)
        assert code == EXIT_CONFIG
        assert out == ""
        diagnostic = _diagnostic(err)
        assert diagnostic["error"] == "ConfigError"
        assert diagnostic["payload"]["flag"] == flag

    def test_02_unknown_command(self, capsys):
        """
        Тест 2: неизвестная подкоманда
        """
        code, _, err = _run(capsys, "spectrum", "--well", "4")
        assert code == EXIT_CONFIG
        assert _diagnostic(err)["error"] == "ConfigError"

    def test_03_missing_potential_file(self, capsys, tmp_path):
        """
        Тест 3: отсутствующий файл потенциала
        """
        code, _, err = _run(capsys, "poles", "--potential-file", str(tmp_path / "none.json"), "--re=-1:1", "--im=-1:1")
        assert code == EXIT_CONFIG
        assert _diagnostic(err)["payload"]["flag"] == "--potential-file"


class TestComputeErrors:
    """Ошибки вычисления: код 3 и JSON в stderr"""

    def test_01_analytic_engine_on_sampled(self, capsys, tmp_path):
        """
        Тест 1: аналитический движок для потенциала на сетке
        """
        spec = tmp_path / "sampled.json"
        spec.write_text(json.dumps({"type": "sampled", "grid": [0.0, 0.5, 1.0], "values": [-1.0, -0.5, 0.0], "cutoff": 1.0}))
        code, out, err = _run(capsys, "poles", "--potential-file", str(spec), "--re=-1:1", "--im=-1:1",
                              "--engine", "analytic")
        assert code == EXIT_COMPUTE
        assert out == ""
        assert _diagnostic(err)["error"] == "PreconditionError"

    def test_02_missing_region(self, capsys):
        """
        Тест 2: poles без области поиска
        """
        code, _, err = _run(capsys, "poles", "--well", "4")
        assert code == EXIT_COMPUTE
        assert _diagnostic(err)["payload"]["field"] == "region"


class TestPseudonormCommand:
    """jost pseudonorm"""

    def test_01_bound_state_trace(self, capsys, bound_k0):
        """
        Тест 1: Ньютон от 0-0.6i, формула против регулятора, таблица N_eps
        """
        code, out, _ = _run(capsys, "pseudonorm", "--well", "4", "--k0", "0-0.6j", "--trace")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["classification"] == "bound"
        assert abs(complex(report["k0"]["re"], report["k0"]["im"]) - bound_k0) < 1e-10
        assert report["oracle_method"] == "gaussian"
        assert report["discrepancy"] < 1e-6
        assert len(report["table"]) == 8
        print(f"\n  N = {report['formula']}, расхождение {report['discrepancy']:.1e}")

    def test_02_virtual_state_csv(self, capsys):
        """
        Тест 2: виртуальное состояние через продолженный хвост, формат CSV
        """
        code, out, _ = _run(capsys, "pseudonorm", "--well", "2", "--k0", "0,0.3", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == f"# {UNITS_LINE}"
        assert lines[1].startswith("re_k0,im_k0,class,iterations")
        row = lines[2].split(",")
        assert row[2] == "virtual"
        assert row[8] == "continued_tail"
        assert float(row[4]) < 0

    def test_03_custom_schedule(self, capsys):
        """
        Тест 3: параметры регулятора передаются в отчет
        """
        code, out, _ = _run(capsys, "pseudonorm", "--well", "4", "--k0=-0.6j", "--trace",
                            "--eps0", "0.2", "--count", "5")
        assert code == EXIT_OK
        table = json.loads(out)["table"]
        assert len(table) == 5
        assert table[0]["eps"] == pytest.approx(0.2)

    def test_04_pole_report_round_trip(self, capsys):
        """
        Тест 4: k0 из JSON отчета poles, переданный в --k0, дает ту же псевдонорму
        """
        code, out, _ = _run(capsys, "poles", "--well", "4", "--re", "-6:6", "--im", "-2:3")
        assert code == EXIT_OK
        poles = json.loads(out)["poles"]
        chosen = [p for p in poles if p["class"] == "bound"]
        chosen += [p for p in poles if p["class"] == "resonant" and p["k0"]["re"] > 0][:1]
        assert len(chosen) == 2
        for pole in chosen:
            k0 = complex(pole["k0"]["re"], pole["k0"]["im"])
            code, out, _ = _run(capsys, "pseudonorm", "--well", "4", "--k0", f"{k0.real!r},{k0.imag!r}")
            assert code == EXIT_OK
            report = json.loads(out)
            assert abs(complex(report["k0"]["re"], report["k0"]["im"]) - k0) < 1e-10 * abs(k0)
            expected = complex(pole["pseudonorm"]["re"], pole["pseudonorm"]["im"])
            formula = complex(report["formula"]["re"], report["formula"]["im"])
            assert abs(formula - expected) < 1e-10 * abs(expected)


class TestGridAndTrajectory:
    """jost jost-grid и jost trajectory"""

    def test_01_grid_order(self, capsys):
        """
        Тест 1: 5x4 точек, Re k меняется быстрее
        """
        code, out, _ = _run(capsys, "jost-grid", "--well", "4", "--re=-1:1", "--im=-1:1", "--resolution", "5x4")
        assert code == EXIT_OK
        report = json.loads(out)
        rows = report["rows"]
        assert report["resolution"] == [5, 4]
        assert len(rows) == 20
        assert rows[0]["re_k"] == -1.0 and rows[0]["im_k"] == -1.0
        assert rows[1]["im_k"] == rows[0]["im_k"] and rows[1]["re_k"] > rows[0]["re_k"]
        assert rows[-1]["re_k"] == 1.0 and rows[-1]["im_k"] == 1.0

    def test_02_grid_cap(self, capsys):
        """
        Тест 2: разрешение ограничено 400 по каждой оси
        """
        code, out, _ = _run(capsys, "jost-grid", "--well", "4", "--re=-1:1", "--im=-1:1",
                            "--resolution", "500x2", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[1] == "re_k,im_k,abs_f,arg_f"
        assert len(lines) == 2 + 400 * 2

    def test_03_trajectory_csv(self, capsys):
        """
        Тест 3: V0 = 2..4 с шагом 0.05 - одна ветвь, класс меняется с virtual на bound
        """
        code, out, _ = _run(capsys, "trajectory", "--well", "2", "--re=-0.5:0.5", "--im=-1:1",
                            "--sweep", "V0=2:4:41", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[1] == "parameter,re_k0,im_k0,class,re_N,im_N,branch"
        rows = [line.split(",") for line in lines[2:]]
        assert len(rows) == 41
        assert rows[0][3] == "virtual" and rows[-1][3] == "bound"
        assert {row[6] for row in rows} == {"0"}

    def test_04_trajectory_json_branches(self, capsys):
        """
        Тест 4: JSON отчет содержит ветви и причину завершения
        """
        code, out, _ = _run(capsys, "trajectory", "--well", "2", "--re=-0.5:0.5", "--im=-1:1",
                            "--sweep", "V0=2:4:41")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["sweep"]["parameter"] == "V0"
        assert [b["reason"] for b in report["branches"]] == ["completed"]


class TestPotentialFamily:
    """Семейства потенциалов для развертки"""

    def test_01_square_well_parameters(self, well_4):
        """
        Тест 1: V0, a и scale для прямоугольной ямы
        """
        assert potential_family(well_4, "V0")(3.0) == SquareWell(depth=3.0, radius=1.0)
        assert potential_family(well_4, "a")(2.0) == SquareWell(depth=4.0, radius=2.0)
        assert potential_family(well_4, "scale")(0.5) == SquareWell(depth=2.0, radius=1.0)

    def test_02_scale_other_potentials(self, smooth_potential):
        """
        Тест 2: scale умножает значения потенциала
        """
        piecewise = PiecewiseConstant(breakpoints=[0.5], values=[-2.0, -1.0], cutoff=1.0)
        assert potential_family(piecewise, "scale")(2.0).values == [-4.0, -2.0]
        scaled = potential_family(smooth_potential, "scale")(0.5)
        assert isinstance(scaled, Sampled)
        assert scaled.values[0] == pytest.approx(0.5 * smooth_potential.values[0])

    def test_03_square_well_only(self, smooth_potential):
        """
        Тест 3: V0 и a не определены для потенциала на сетке
        """
        with pytest.raises(PreconditionError):
            potential_family(smooth_potential, "V0")

    def test_04_sweep_outside_admissible(self, capsys):
        """
        Тест 4: развертка через отрицательную глубину - ошибка вычисления
        """
        code, _, err = _run(capsys, "trajectory", "--well", "2", "--re=-0.5:0.5", "--im=-1:1", "--sweep", "V0=-1:1:3")
        assert code == EXIT_COMPUTE
        diagnostic = _diagnostic(err)
        assert diagnostic["error"] == "PreconditionError"
        assert diagnostic["payload"]["parameter"] == "V0"
