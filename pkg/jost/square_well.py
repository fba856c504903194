"""
Точные формулы для прямоугольной ямы V = -V0 (r <= a).

Внутри ямы q^2 = k^2 + V0, q - главная ветвь корня: все формулы четны по q.
Модуль служит эталоном для численного движка и поиска полюсов.
"""

import cmath
from typing import Tuple

from jost.errors import DomainError, PreconditionError
from jost.specfun import (
    outgoing_wave,
    reduced_j,
    spherical_h_minus,
    spherical_h_minus_prime,
    riccati_pair,
    wronskian,
)
from models.core import SquareWell, check_l, check_momentum

ZERO_TOLERANCE = 1e-8


def interior_momentum(k: complex, depth: float) -> complex:
    """q = sqrt(k^2 + V0), главная ветвь"""
    return cmath.sqrt(complex(k) ** 2 + depth)


def _sin_over_q(q: complex, a: float) -> complex:
    # sin(qa)/q без деления на ноль
    x = q * a
    if abs(x) < 1e-4:
        x2 = x * x
        return a * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
    return cmath.sin(x) / q


def _regular_inside(l: int, q: complex, r: float) -> Tuple[complex, complex]:
    # phi = r J_l, phi' = (l+1) J_l - q^2 r J_{l+1}, J_l = q^{-l} j_l(qr)
    big_j = reduced_j(l, q, r)
    big_j_next = reduced_j(l + 1, q, r)
    return r * big_j, (l + 1) * big_j - q * q * r * big_j_next


def regular_solution_sw(l: int, k: complex, well: SquareWell, r: float) -> Tuple[complex, complex]:
    """Регулярное решение phi_l(k, r) и d phi_l / dr"""
    l = check_l(l)
    k = check_momentum(k, allow_zero=True)
    if r < 0:
        raise DomainError(f"r должно быть >= 0, получено {r}", {"r": r})

    a = well.radius
    q = interior_momentum(k, well.depth)
    if r <= a:
        return _regular_inside(l, q, r)

    phi_a, dphi_a = _regular_inside(l, q, a)
    if k == 0:
        if l > 0:
            raise DomainError("Внешнее регулярное решение при k = 0 определено только для l = 0", {"l": l})
        # phi'' = 0 вне ямы
        return phi_a + dphi_a * (r - a), dphi_a

    (u1, du1), (u2, du2) = riccati_pair(l, k, a)
    # W[r j(kr), r n(kr)] = 1/k
    coeff_a = k * wronskian(phi_a, dphi_a, u2, du2)
    coeff_b = k * wronskian(u1, du1, phi_a, dphi_a)

    (v1, dv1), (v2, dv2) = riccati_pair(l, k, r)
    return coeff_a * v1 + coeff_b * v2, coeff_a * dv1 + coeff_b * dv2


def irregular_solution_sw(l: int, k: complex, well: SquareWell, r: float) -> Tuple[complex, complex]:
    """Нерегулярное решение f_l(k, r) и d f_l / dr; вне ямы -ikr h_l^-(kr)"""
    l = check_l(l)
    k = check_momentum(k)
    if r <= 0:
        raise DomainError(f"Нерегулярное решение требует r > 0, получено {r}", {"r": r})

    a = well.radius
    if r >= a:
        return outgoing_wave(l, k, r)

    q = interior_momentum(k, well.depth)
    if q == 0:
        raise DomainError("Внутреннее нерегулярное решение не определено при q = 0", {"k": str(k)})

    wave_a, dwave_a = outgoing_wave(l, k, a)
    (u1, du1), (u2, du2) = riccati_pair(l, q, a)
    coeff_c = q * wronskian(wave_a, dwave_a, u2, du2)
    coeff_d = q * wronskian(u1, du1, wave_a, dwave_a)

    (v1, dv1), (v2, dv2) = riccati_pair(l, q, r)
    return coeff_c * v1 + coeff_d * v2, coeff_c * dv1 + coeff_d * dv2


def jost_sw(l: int, k: complex, well: SquareWell) -> complex:
    """
    f_l(k) = (k/q)^l i k a^2 [k j_l(qa) h_l^-'(ka) - q j_l'(qa) h_l^-(ka)]

    Записано через четные по q комбинации q^{-l} j_l и q^{1-l} j_l'.
    """
    l = check_l(l)
    k = check_momentum(k, allow_zero=(l == 0))
    if k == 0:
        return jost_sw_l0(k, well)

    a = well.radius
    q = interior_momentum(k, well.depth)
    big_j = reduced_j(l, q, a)
    # q^{1-l} j_l'(qa) = (l/a) J_l - q^2 J_{l+1}
    big_j_prime = (l / a) * big_j - q * q * reduced_j(l + 1, q, a)
    z = k * a
    bracket = k * big_j * spherical_h_minus_prime(l, z) - big_j_prime * spherical_h_minus(l, z)
    return 1j * k ** (l + 1) * a * a * bracket


def jost_sw_l0(k: complex, well: SquareWell) -> complex:
    """f_0(k) = e^{-ika} (ik sin(qa)/q + cos qa)"""
    k = check_momentum(k, allow_zero=True)
    a = well.radius
    q = interior_momentum(k, well.depth)
    return cmath.exp(-1j * k * a) * (1j * k * _sin_over_q(q, a) + cmath.cos(q * a))


def jost_sw_l0_dk(k: complex, well: SquareWell) -> complex:
    """d f_0 / dk в произвольной точке k"""
    k = check_momentum(k, allow_zero=True)
    a = well.radius
    q = interior_momentum(k, well.depth)
    sin_q = _sin_over_q(q, a)
    cos_q = cmath.cos(q * a)

    x = q * a
    if abs(x) < 1e-3:
        # (a cos qa - sin(qa)/q) / q^2
        ratio = a ** 3 * (-1.0 / 3.0 + x * x / 30.0)
    else:
        ratio = (a * cos_q - sin_q) / (q * q)

    inner = 1j * k * sin_q + cos_q
    d_inner = 1j * sin_q + 1j * k * k * ratio - a * k * sin_q
    carrier = cmath.exp(-1j * k * a)
    return carrier * (d_inner - 1j * a * inner)


def _require_zero(k0: complex, well: SquareWell) -> complex:
    k0 = check_momentum(k0, allow_zero=True)
    residual = abs(jost_sw_l0(k0, well))
    if residual >= ZERO_TOLERANCE * (1.0 + abs(k0)):
        raise PreconditionError(
            f"k0 = {k0} не является нулем f_0: |f_0(k0)| = {residual:.3e}",
            {"k0": {"re": k0.real, "im": k0.imag}, "residual": residual},
        )
    return k0


def jost_sw_l0_minus(k0: complex, well: SquareWell) -> complex:
    """f_0(-k0) = -(2ik0/q0) e^{ik0 a} sin q0 a в нуле k0"""
    k0 = _require_zero(k0, well)
    a = well.radius
    q0 = interior_momentum(k0, well.depth)
    return -2j * k0 * _sin_over_q(q0, a) * cmath.exp(1j * k0 * a)


def jost_sw_l0_deriv_at_zero(k0: complex, well: SquareWell) -> complex:
    """df_0/dk(k0) = i ((q0^2 - k0^2)/q0^3) (1 + ik0 a) e^{-ik0 a} sin q0 a"""
    k0 = _require_zero(k0, well)
    a = well.radius
    q0 = interior_momentum(k0, well.depth)
    if q0 == 0:
        raise DomainError("Формула производной не определена при q0 = 0", {"k0": str(k0)})
    return 1j * well.depth * (1 + 1j * k0 * a) * cmath.exp(-1j * k0 * a) * _sin_over_q(q0, a) / (q0 * q0)


def pseudonorm_sw_l0(k0: complex, well: SquareWell) -> complex:
    """int phi_0^2 dr = ((1 + ik0 a)/(2ik0)) ((q0^2 - k0^2)/q0^4) sin^2 q0 a"""
    k0 = _require_zero(k0, well)
    if k0 == 0:
        raise DomainError("Пороговое состояние k0 = 0 не рассматривается", {"k0": "0"})
    a = well.radius
    q0 = interior_momentum(k0, well.depth)
    if q0 == 0:
        raise DomainError("Псевдонорма не определена при q0 = 0", {"k0": str(k0)})
    sin_q = _sin_over_q(q0, a)
    return (1 + 1j * k0 * a) / (2j * k0) * well.depth * sin_q * sin_q / (q0 * q0)


def _axis_norm(k0: complex, well: SquareWell) -> float:
    # на мнимой оси все множители вещественны
    a = well.radius
    q0 = interior_momentum(k0, well.depth)
    sin_q = _sin_over_q(q0, a)
    value = (1 + 1j * k0 * a) / (2j * k0) * well.depth * sin_q * sin_q / (q0 * q0)
    return value.real


def bound_norm_sw_l0(kappa0: float, well: SquareWell) -> float:
    """Связанное состояние k0 = -i kappa0: (1 + kappa0 a)/(2 kappa0) (q0^2 + kappa0^2)/q0^4 sin^2 q0 a"""
    if kappa0 <= 0:
        raise DomainError("kappa0 должно быть > 0", {"kappa0": kappa0})
    return _axis_norm(_require_zero(-1j * kappa0, well), well)


def virtual_norm_sw_l0(kappa0: float, well: SquareWell) -> float:
    """Виртуальное состояние k0 = +i kappa0: (kappa0 a - 1)/(2 kappa0) (q0^2 + kappa0^2)/q0^4 sin^2 q0 a"""
    if kappa0 <= 0:
        raise DomainError("kappa0 должно быть > 0", {"kappa0": kappa0})
    return _axis_norm(_require_zero(1j * kappa0, well), well)
