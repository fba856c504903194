"""
Тесты псевдонормы: формула через df/dk и f(-k0) против квадратур
"""

import cmath

import pytest

from jost.errors import DomainError, PreconditionError, RegularizationError
from jost.evaluators import AnalyticJost, NumericJost, make_evaluator
from jost.poles import find_poles
from jost.pseudonorm import (
    continued_tail,
    direct_norm,
    normalized_state,
    proportionality_constant,
    pseudonorm_continued_tail,
    pseudonorm_formula,
    pseudonorm_oracle,
    pseudonorm_regularized,
)
from jost.square_well import pseudonorm_sw_l0
from models.core import SquareWell
from models.models import RegulatorSchedule, ScanRegion


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / abs(b)


class TestPseudonormFormula:
    """N = df/dk(k0) f(-k0) / (4i k0^{2l+2})"""

    def test_01_bound_state(self, analytic_4, well_4, bound_k0):
        """
        Тест 1: связанное состояние совпадает с замкнутой формой ямы
        """
        value = pseudonorm_formula(analytic_4, bound_k0)
        assert _relative(value, pseudonorm_sw_l0(bound_k0, well_4)) < 1e-9
        print(f"\n  N(bound) = {value}")

    def test_02_virtual_state(self, analytic_2, well_2, virtual_k0):
        """
        Тест 2: виртуальное состояние
        """
        value = pseudonorm_formula(analytic_2, virtual_k0)
        assert _relative(value, pseudonorm_sw_l0(virtual_k0, well_2)) < 1e-9
        assert value.real < 0

    def test_03_resonance_pair(self, analytic_4, well_4, resonance_k0):
        """
        Тест 3: резонанс и зеркальный партнер дают сопряженные псевдонормы
        """
        value = pseudonorm_formula(analytic_4, resonance_k0)
        mirrored = pseudonorm_formula(analytic_4, -resonance_k0.conjugate())
        assert _relative(value, pseudonorm_sw_l0(resonance_k0, well_4)) < 1e-9
        assert _relative(mirrored, value.conjugate()) < 1e-9

    def test_04_numeric_engine(self, numeric_4, bound_k0, well_4):
        """
        Тест 4: численный движок дает ту же псевдонорму
        """
        value = pseudonorm_formula(numeric_4, bound_k0)
        assert _relative(value, pseudonorm_sw_l0(bound_k0, well_4)) < 1e-6

    def test_05_requires_zero(self, analytic_4):
        """
        Тест 5: точка, не являющаяся нулем, и порог k0 = 0
        """
        with pytest.raises(PreconditionError):
            pseudonorm_formula(analytic_4, 1.0 + 1.0j)
        with pytest.raises(DomainError):
            pseudonorm_formula(analytic_4, 0)


class TestProportionality:
    """f(k0, r) = C(k0) phi(k0, r) в нуле"""

    @pytest.mark.parametrize("state", ["bound", "resonance"])
    def test_01_constant(self, analytic_4, bound_k0, resonance_k0, state):
        """
        Тест 1: C = -2i k0^{l+1} / f(-k0) в точках r = 0.3, 0.7, 1.5
        """
        k0 = bound_k0 if state == "bound" else resonance_k0
        constant = proportionality_constant(analytic_4, k0)
        radii = [0.3, 0.7, 1.5]
        f, _ = analytic_4.irregular(k0, radii)
        phi, _ = analytic_4.regular(k0)(radii)
        for f_r, phi_r in zip(f, phi):
            assert abs(f_r - constant * phi_r) < 1e-8 * max(1.0, abs(f_r))

    def test_02_numeric_constant(self, numeric_4, bound_k0):
        """
        Тест 2: численные решения пропорциональны с той же константой
        """
        constant = proportionality_constant(numeric_4, bound_k0)
        radii = [0.3, 0.7, 1.5]
        f, _ = numeric_4.irregular(bound_k0, radii)
        phi, _ = numeric_4.regular(bound_k0)(radii)
        for f_r, phi_r in zip(f, phi):
            assert abs(f_r - constant * phi_r) < 1e-7 * max(1.0, abs(f_r))


class TestQuadratureOracles:
    """Независимые способы посчитать интеграл от phi^2"""

    def test_01_direct_norm(self, analytic_4, bound_k0):
        """
        Тест 1: обычный интеграл связанного состояния равен формуле
        """
        direct = direct_norm(analytic_4, bound_k0)
        assert _relative(direct, pseudonorm_formula(analytic_4, bound_k0)) < 1e-8
        print(f"\n  int phi^2 dr = {direct}")

    def test_02_direct_norm_rejects_unbound(self, analytic_2, virtual_k0):
        """
        Тест 2: прямой интеграл виртуального состояния расходится
        """
        with pytest.raises(PreconditionError):
            direct_norm(analytic_2, virtual_k0)

    def test_03_regularized_bound(self, analytic_4, bound_k0):
        """
        Тест 3: гауссов регулятор для связанного состояния
        """
        result = pseudonorm_regularized(analytic_4, bound_k0)
        assert _relative(result.value, pseudonorm_formula(analytic_4, bound_k0)) < 1e-6
        assert len(result.table()) == 8

    def test_04_regularized_resonance(self, analytic_4, resonance_k0):
        """
        Тест 4: экстраполяция eps -> 0 воспроизводит формулу для резонанса
        """
        formula = pseudonorm_formula(analytic_4, resonance_k0)
        result = pseudonorm_regularized(analytic_4, resonance_k0)
        assert _relative(result.value, formula) < 1e-4
        mirrored = pseudonorm_regularized(analytic_4, -resonance_k0.conjugate())
        assert _relative(mirrored.value, formula.conjugate()) < 1e-4
        print(f"\n  формула {formula}, регулятор {result.value} (ошибка {result.error:.1e})")

    def test_05_regularized_rejects_virtual(self, analytic_2, virtual_k0):
        """
        Тест 5: при Im k0 > 0 и Re k0^2 <= 0 последовательность расходится
        """
        with pytest.raises(RegularizationError):
            pseudonorm_regularized(analytic_2, virtual_k0)

    @pytest.mark.parametrize("state", ["bound", "virtual", "resonance"])
    def test_06_continued_tail(self, analytic_4, analytic_2, bound_k0, virtual_k0, resonance_k0, state):
        """
        Тест 6: продолженный хвост через интегральные экспоненты для всех классов
        """
        jost, k0 = {
            "bound": (analytic_4, bound_k0),
            "virtual": (analytic_2, virtual_k0),
            "resonance": (analytic_4, resonance_k0),
        }[state]
        value = pseudonorm_continued_tail(jost, k0)
        assert _relative(value, pseudonorm_formula(jost, k0)) < 1e-8

    def test_07_oracle_dispatch(self, analytic_2, analytic_4, virtual_k0, resonance_k0):
        """
        Тест 7: оракул выбирает метод по положению нуля
        """
        _, _, method, _ = pseudonorm_oracle(analytic_2, virtual_k0)
        assert method == "continued_tail"
        value, error, method, regularized = pseudonorm_oracle(analytic_4, resonance_k0)
        assert method == "gaussian"
        assert regularized is not None and error == regularized.error

    def test_08_custom_schedule(self, analytic_4, bound_k0):
        """
        Тест 8: пользовательская последовательность eps
        """
        schedule = RegulatorSchedule(eps0=0.2, ratio=0.5, count=6)
        result = pseudonorm_regularized(analytic_4, bound_k0, schedule)
        assert result.epsilons[0] == pytest.approx(0.2)
        assert len(result.values) == 6
        assert _relative(result.value, pseudonorm_formula(analytic_4, bound_k0)) < 1e-4

    def test_09_continued_tail_closed_form(self):
        """
        Тест 9: при l = 0 хвост равен e^{-2ikR}/(2ik), при l = 1 он конечен
        """
        k, cutoff = 2.0 + 0.5j, 1.0
        expected = cmath.exp(-2j * k * cutoff) / (2j * k)
        assert abs(continued_tail(0, k, cutoff, 1.0) - expected) < 1e-14
        assert cmath.isfinite(continued_tail(1, k, cutoff, 1.0))


class TestHigherWave:
    """l = 1: связанное состояние глубокой ямы"""

    def test_01_p_wave_bound_state(self):
        """
        Тест 1: формула, прямой интеграл и регулятор согласованы при l = 1
        """
        jost = make_evaluator(SquareWell(depth=12.0, radius=1.0), 1)
        region = ScanRegion(re_min=-0.5, re_max=0.5, im_min=-3.0, im_max=-0.05)
        records = find_poles(jost, region)
        assert len(records) == 1
        k0 = records[0].k0
        formula = pseudonorm_formula(jost, k0)
        assert _relative(direct_norm(jost, k0), formula) < 1e-7
        assert _relative(pseudonorm_regularized(jost, k0).value, formula) < 1e-5
        assert abs(formula.imag) < 1e-8 * abs(formula)
        print(f"\n  l=1: k0 = {k0}, N = {formula}")


class TestNormalizedState:
    """psi = [N]^{-1/2} phi"""

    def test_01_unit_norm(self, analytic_4, resonance_k0):
        """
        Тест 1: factor^2 N = 1 и значения psi = factor phi
        """
        state = normalized_state(analytic_4, resonance_k0, [0.2, 0.8])
        formula = pseudonorm_formula(analytic_4, resonance_k0)
        assert abs(state.factor ** 2 * formula - 1.0) < 1e-10
        phi, _ = analytic_4.regular(resonance_k0)(state.radii)
        assert abs(state.values[1] - state.factor * phi[1]) < 1e-14

    def test_02_regularized_unit_norm(self, analytic_4, resonance_k0):
        """
        Тест 2: регуляризованный интеграл от psi^2 стремится к 1
        """
        state = normalized_state(analytic_4, resonance_k0, [0.5])
        regularized = pseudonorm_regularized(analytic_4, resonance_k0)
        assert abs(state.factor ** 2 * regularized.value - 1.0) < 1e-4

    def test_03_bound_state_real(self, analytic_4, bound_k0):
        """
        Тест 3: для связанного состояния множитель вещественен с точностью до фазы
        """
        state = normalized_state(analytic_4, bound_k0, [0.5])
        assert abs((state.factor ** 2).imag) < 1e-10
        assert abs(state.factor ** 2 * pseudonorm_formula(analytic_4, bound_k0) - 1.0) < 1e-10

    def test_04_denominator_uses_mirror_point(self, analytic_4, bound_k0):
        """
        Тест 4: множитель строится по f(-k0), и прямой интеграл psi^2 равен 1
        """
        state = normalized_state(analytic_4, bound_k0, [0.5])
        expected = 4j * bound_k0 ** 2 / (analytic_4.derivative(bound_k0) * analytic_4.minus(bound_k0))
        assert abs(state.factor ** 2 - expected) < 1e-12 * abs(expected)
        assert abs(state.factor ** 2 * direct_norm(analytic_4, bound_k0) - 1.0) < 1e-7


class TestEngines:
    """Согласие аналитического и численного движков"""

    def test_01_virtual_numeric(self, well_2, virtual_k0):
        """
        Тест 1: виртуальное состояние, численный движок
        """
        analytic = pseudonorm_formula(AnalyticJost(0, well_2), virtual_k0)
        numeric = pseudonorm_formula(NumericJost(well_2, 0), virtual_k0)
        assert _relative(numeric, analytic) < 1e-6
