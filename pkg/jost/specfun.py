"""
Сферические функции Бесселя, Неймана и Ганкеля комплексного аргумента
и вронскиан.

h_l^- = j_l - i n_l. Около нуля (|z| < 0.5) j_l считается степенным
рядом, дальше - замкнутые формы и рекуррентные соотношения.
"""

import cmath
from math import factorial
from typing import List, Tuple

import numpy as np
from scipy.special import factorial2

from jost.errors import DomainError, RangeError

SERIES_RADIUS = 0.5
SERIES_CUTOFF = 1e-18
# exp(709) - предел double
EXP_LIMIT = 700.0
_RESCALE = 1e250


def double_factorial_odd(l: int) -> int:
    """(2l+1)!! как точное целое"""
    if l < 0:
        raise DomainError(f"l должно быть >= 0, получено {l}", {"l": l})
    return int(factorial2(2 * l + 1, exact=True))


def _check_range(z: complex) -> None:
    if abs(z.imag) > EXP_LIMIT:
        raise RangeError(
            f"|Im z| = {abs(z.imag):.1f} вне диапазона double",
            {"z": {"re": z.real, "im": z.imag}},
        )


def _even_series(l: int, z2: complex) -> complex:
    """sum_s (-z^2/2)^s / (s! (2l+2s+1)!!) как функция z^2"""
    term = 1.0 / double_factorial_odd(l) + 0j
    total = term
    x = -complex(z2) / 2.0
    s = 0
    while term != 0:
        s += 1
        term *= x / (s * (2 * l + 2 * s + 1))
        total += term
        if abs(term) < SERIES_CUTOFF * abs(total) or s > 500:
            break
    return total


def j_series(l: int, z: complex) -> complex:
    """j_l(z) = z^l sum_s (-z^2/2)^s / (s! (2l+2s+1)!!)"""
    z = complex(z)
    return z ** l * _even_series(l, z * z)


def reduced_j(l: int, q: complex, r: float) -> complex:
    """q^{-l} j_l(qr) - четная по q, конечна при q = 0"""
    q = complex(q)
    z = q * r
    if abs(z) < SERIES_RADIUS:
        return r ** l * _even_series(l, z * z)
    return spherical_j(l, z) / q ** l


def _j0(z: complex) -> complex:
    return cmath.sin(z) / z


def _j1(z: complex) -> complex:
    return cmath.sin(z) / (z * z) - cmath.cos(z) / z


def _upward(f0: complex, f1: complex, l: int, z: complex, start: int = 1) -> complex:
    """f_{m+1} = (2m+1)/z f_m - f_{m-1}, начиная с f_{start-1}, f_start"""
    prev, cur = f0, f1
    for m in range(start, l):
        prev, cur = cur, (2 * m + 1) / z * cur - prev
    return cur


def j_recurrence(l: int, z: complex) -> complex:
    """j_l(z) без ряда: замкнутые формы, восходящая рекурсия или схема Миллера"""
    z = complex(z)
    if z == 0:
        raise DomainError("Рекуррентная схема не определена при z = 0", {"l": l})
    _check_range(z)
    if l == 0:
        return _j0(z)
    if l == 1:
        return _j1(z)
    if abs(z) > l:
        return _upward(_j0(z), _j1(z), l, z)
    return _miller(l, z)


def _miller(l: int, z: complex) -> complex:
    # нисходящая рекурсия от L >> l, нормировка по j0 или j1
    top = l + int(abs(z)) + 30
    f_next, f = 0j, 1e-30 + 0j
    value_l = 0j
    for m in range(top, 0, -1):
        f_prev = (2 * m + 1) / z * f - f_next
        f_next, f = f, f_prev
        if m - 1 == l:
            value_l = f
        if abs(f) > _RESCALE:
            f /= _RESCALE
            f_next /= _RESCALE
            value_l /= _RESCALE
    j0, j1 = _j0(z), _j1(z)
    if abs(j0) >= abs(j1):
        scale = j0 / f
    else:
        scale = j1 / f_next
    return value_l * scale


def spherical_j(l: int, z: complex) -> complex:
    """Сферическая функция Бесселя j_l(z)"""
    z = complex(z)
    if abs(z) < SERIES_RADIUS:
        return j_series(l, z)
    return j_recurrence(l, z)


def spherical_n(l: int, z: complex) -> complex:
    """Сферическая функция Неймана n_l(z); особенность в нуле"""
    z = complex(z)
    if z == 0:
        raise DomainError("n_l(z) не определена при z = 0", {"l": l})
    _check_range(z)
    s, c = cmath.sin(z), cmath.cos(z)
    n0 = -c / z
    if l == 0:
        return n0
    n1 = -c / (z * z) - s / z
    if l == 1:
        return n1
    n2 = (-3.0 / z ** 3 + 1.0 / z) * c - 3.0 / (z * z) * s
    if l == 2:
        return n2
    return _upward(n1, n2, l, z, start=2)


def spherical_h_minus(l: int, z: complex) -> complex:
    """h_l^-(z) = j_l(z) - i n_l(z)"""
    return spherical_j(l, z) - 1j * spherical_n(l, z)


def _derivative(func, l: int, z: complex) -> complex:
    # f_l' = (l f_{l-1} - (l+1) f_{l+1}) / (2l+1)
    if l == 0:
        return -func(1, z)
    return (l * func(l - 1, z) - (l + 1) * func(l + 1, z)) / (2 * l + 1)


def spherical_j_prime(l: int, z: complex) -> complex:
    return _derivative(spherical_j, l, complex(z))


def spherical_n_prime(l: int, z: complex) -> complex:
    return _derivative(spherical_n, l, complex(z))


def spherical_h_minus_prime(l: int, z: complex) -> complex:
    return _derivative(spherical_h_minus, l, complex(z))


def wronskian(u: complex, du: complex, v: complex, dv: complex) -> complex:
    """W[u, v] = u v' - u' v"""
    return u * dv - du * v


def outgoing_wave(l: int, k: complex, r: complex) -> Tuple[complex, complex]:
    """
    Внешнее нерегулярное решение F(k, r) = -ikr h_l^-(kr) и dF/dr.
    При l = 0 это e^{-ikr}, поэтому k = 0 допустим.
    """
    k, r = complex(k), complex(r)
    z = k * r
    _check_range(z)
    if l == 0:
        wave = cmath.exp(-1j * z)
        return wave, -1j * k * wave
    if z == 0:
        raise DomainError("F_l(k, r) не определена при kr = 0 для l >= 1", {"l": l})
    h = spherical_h_minus(l, z)
    dh = spherical_h_minus_prime(l, z)
    return -1j * z * h, -1j * k * (h + z * dh)


def hankel_minus_coefficients(l: int) -> List[int]:
    """c_m = (l+m)! / (m! (l-m)!) конечного разложения h_l^-"""
    return [factorial(l + m) // (factorial(m) * factorial(l - m)) for m in range(l + 1)]


def outgoing_wave_series(l: int, k: complex, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Векторная форма F(k, r) = i^l e^{-ikr} sum_m c_m w^m, w = -i/(2kr).
    Используется для квадратур по хвосту, в том числе при комплексном r.
    """
    r = np.asarray(r, dtype=complex)
    k = complex(k)
    if k == 0:
        raise DomainError("Разложение F_l требует k != 0", {"l": l})
    w = -1j / (2.0 * k * r)
    poly = np.zeros_like(r)
    dpoly = np.zeros_like(r)
    for m, c in enumerate(hankel_minus_coefficients(l)):
        poly = poly + c * w ** m
        dpoly = dpoly - c * m * w ** m / r
    carrier = (1j ** l) * np.exp(-1j * k * r)
    return carrier * poly, carrier * (dpoly - 1j * k * poly)


def riccati_pair(l: int, x: complex, r: float) -> Tuple[Tuple[complex, complex], Tuple[complex, complex]]:
    """
    Свободные решения r j_l(xr) и r n_l(xr) вместе с производными по r.
    W[r j_l(xr), r n_l(xr)] = 1/x.
    """
    z = complex(x) * r
    j, dj = spherical_j(l, z), spherical_j_prime(l, z)
    n, dn = spherical_n(l, z), spherical_n_prime(l, z)
    return (r * j, j + z * dj), (r * n, n + z * dn)
