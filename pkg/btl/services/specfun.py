"""
Modified Bessel functions I_alpha, K_alpha for integer and half-integer
orders, plus Gamma at integers and half-integers.

Orders are carried as ``BesselOrder(twice_order)`` so integer and
half-integer orders compare exactly. Every function accepts either a
``BesselOrder`` or a plain float order.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)

# I_alpha switches from the ascending series to the large-argument expansion here
SERIES_CUTOFF = 15.0
# K_0 / K_1 use the log-term series up to here, the integral representation beyond
K_SERIES_CUTOFF = 2.0

# exp(z) is finite below this
EXP_LIMIT = 709.0
EULER_GAMMA = 0.57721566490153286
_SERIES_EPS = 1e-17
_MAX_TERMS = 500
_K_QUADRATURE_NODES = 256


class BesselDomainError(ValueError):
    """Argument or order outside the supported domain."""


@dataclass(frozen=True)
class BesselOrder:
    """Order alpha stored as the integer 2*alpha."""

    twice_order: int

    def __post_init__(self):
        if isinstance(self.twice_order, bool) or not isinstance(self.twice_order, (int, np.integer)):
            raise BesselDomainError(f"twice_order must be an integer, got {self.twice_order!r}")
        if self.twice_order < -2:
            raise BesselDomainError(
                f"Order {self.twice_order / 2} is below -1; only reflection to I_1 / K_alpha is supported"
            )

    @classmethod
    def of(cls, alpha: float) -> "BesselOrder":
        twice = 2.0 * float(alpha)
        rounded = round(twice)
        if abs(twice - rounded) > 1e-12:
            raise BesselDomainError(f"Order {alpha} is neither an integer nor a half-integer")
        return cls(int(rounded))

    @property
    def alpha(self) -> float:
        return self.twice_order / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice_order % 2 == 0

    def shifted(self, steps: int) -> "BesselOrder":
        return BesselOrder(self.twice_order + 2 * steps)


OrderLike = Union[BesselOrder, float, int]


def _as_order(order: OrderLike) -> BesselOrder:
    if isinstance(order, BesselOrder):
        return order
    return BesselOrder.of(order)


def _check_argument(z: float) -> float:
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise BesselDomainError(f"Bessel argument must be positive and finite, got {z}")
    return z


def gamma_half_integer(twice_x: int) -> float:
    """Gamma(twice_x / 2) for positive integers and half-integers."""
    if twice_x < 1:
        raise BesselDomainError(f"Gamma is only evaluated at positive (half-)integers, got {twice_x / 2}")
    if twice_x % 2 == 0:
        value, current = 1.0, 2
    else:
        value, current = math.sqrt(math.pi), 1
    while current < twice_x:
        value *= current / 2.0
        current += 2
    return value


def _bessel_i_series(twice: int, z: float) -> float:
    nu = twice / 2.0
    half = 0.5 * z
    q = half * half
    term = half ** nu / gamma_half_integer(twice + 2)
    total = term
    for k in range(1, _MAX_TERMS):
        term *= q / (k * (k + nu))
        total += term
        if term < _SERIES_EPS * total:
            break
    return total


def _asymptotic_sum(nu: float, z: float, sign: float) -> float:
    """sum_k sign^k a_k(nu) / z^k, truncated at its smallest term."""
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(1, 80):
        odd_sq = (2 * k - 1) ** 2
        new_term = term * sign * (mu - odd_sq) / (8.0 * k * z)
        if odd_sq > mu and abs(new_term) >= abs(term):
            break
        term = new_term
        total += term
        if abs(term) <= _SERIES_EPS * abs(total):
            break
    return total


def _reflect_i(order: BesselOrder) -> int:
    # I_{-1} = I_1; I_{-1/2} is a genuine function handled by the series
    return 2 if order.twice_order == -2 else order.twice_order


def bessel_ie(order: OrderLike, z: float) -> float:
    """Exponentially scaled I_alpha(z) * exp(-z)."""
    order = _as_order(order)
    z = _check_argument(z)
    twice = _reflect_i(order)
    if z <= SERIES_CUTOFF:
        return _bessel_i_series(twice, z) * math.exp(-z)
    return _asymptotic_sum(twice / 2.0, z, -1.0) / math.sqrt(2.0 * math.pi * z)


def bessel_i(order: OrderLike, z: float) -> float:
    """Modified Bessel function of the first kind I_alpha(z), z > 0."""
    order = _as_order(order)
    z = _check_argument(z)
    twice = _reflect_i(order)
    if z <= SERIES_CUTOFF:
        return _bessel_i_series(twice, z)
    if z > EXP_LIMIT:
        raise BesselDomainError(f"I_{order.alpha}({z}) overflows a double; use bessel_ie")
    return math.exp(z) * _asymptotic_sum(twice / 2.0, z, -1.0) / math.sqrt(2.0 * math.pi * z)


def bessel_i_ratio(order: OrderLike, z: float) -> float:
    """I_{alpha+1}(z) / I_alpha(z) without overflow for large z."""
    order = _as_order(order)
    return bessel_ie(order.shifted(1), z) / bessel_ie(order, z)


def bessel_i_miller(n: int, z: float) -> float:
    """
    Integer-order I_n(z) by Miller's backward recurrence.

    The recurrence I_{k-1} = I_{k+1} + (2k/z) I_k is run downward from an
    arbitrary start and normalised with exp(z) = I_0 + 2 sum_{k>=1} I_k, so
    no value from the power series enters.
    """
    n = abs(int(n))
    z = _check_argument(z)
    if z > 600.0:
        raise BesselDomainError(f"Miller normalisation overflows for z = {z}")
    start = 2 * (max(n, int(math.ceil(z))) + 30)
    values = np.zeros(start + 2)
    values[start] = 1.0
    for j in range(start, 0, -1):
        values[j - 1] = values[j + 1] + (2.0 * j / z) * values[j]
        if values[j - 1] > 1e250:
            values[j - 1:] *= 1e-250
    norm = values[0] + 2.0 * np.sum(values[1:start + 1])
    return float(values[n] * math.exp(z) / norm)


def _bessel_k01_series(z: float) -> tuple[float, float]:
    q = 0.25 * z * z
    log_half = math.log(0.5 * z)

    # K_0 = -(ln(z/2) + gamma) I_0 + sum_{k>=1} H_k q^k / (k!)^2
    term = 1.0
    harmonic = 0.0
    tail0 = 0.0
    for k in range(1, _MAX_TERMS):
        term *= q / (k * k)
        harmonic += 1.0 / k
        tail0 += harmonic * term
        if term * harmonic < _SERIES_EPS * abs(tail0):
            break
    k0 = -(log_half + EULER_GAMMA) * _bessel_i_series(0, z) + tail0

    # K_1 = 1/z + ln(z/2) I_1 - (z/4) sum_k (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
    coeff = 1.0
    h_k = 0.0
    tail1 = (-2.0 * EULER_GAMMA + 1.0) * coeff
    for k in range(1, _MAX_TERMS):
        coeff *= q / (k * (k + 1))
        h_k += 1.0 / k
        contribution = (-2.0 * EULER_GAMMA + 2.0 * h_k + 1.0 / (k + 1)) * coeff
        tail1 += contribution
        if abs(contribution) < _SERIES_EPS * abs(tail1):
            break
    k1 = 1.0 / z + log_half * _bessel_i_series(2, z) - 0.25 * z * tail1
    return k0, k1


def _bessel_k_integral(nu: float, z: float, scaled: bool = False) -> float:
    # K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt; trapezoid is spectrally accurate here
    t_max = math.acosh(1.0 + 50.0 / z) + abs(nu) / z
    t = np.linspace(0.0, t_max, _K_QUADRATURE_NODES + 1)
    h = t[1] - t[0]
    integrand = np.exp(-z * (np.cosh(t) - 1.0)) * np.cosh(nu * t)
    integral = h * (0.5 * integrand[0] + np.sum(integrand[1:]))
    return float(integral) if scaled else float(integral * math.exp(-z))


def _bessel_k01(z: float, scaled: bool = False) -> tuple[float, float]:
    if z <= K_SERIES_CUTOFF:
        k0, k1 = _bessel_k01_series(z)
        if scaled:
            return k0 * math.exp(z), k1 * math.exp(z)
        return k0, k1
    return _bessel_k_integral(0.0, z, scaled), _bessel_k_integral(1.0, z, scaled)


def bessel_k(order: OrderLike, z: float) -> float:
    """Modified Bessel function of the second kind K_alpha(z), z > 0."""
    return _bessel_k(order, z, scaled=False)


def bessel_ke(order: OrderLike, z: float) -> float:
    """Exponentially scaled K_alpha(z) * exp(z)."""
    return _bessel_k(order, z, scaled=True)


def _bessel_k(order: OrderLike, z: float, scaled: bool) -> float:
    order = _as_order(order)
    z = _check_argument(z)
    twice = abs(order.twice_order)

    if twice % 2 == 1:
        # K_{1/2} closed form, K_{-1/2} = K_{1/2}, then upward recurrence
        k_half = math.sqrt(math.pi / (2.0 * z)) * (1.0 if scaled else math.exp(-z))
        previous, current = k_half, k_half
        nu = 0.5
        while 2 * nu < twice:
            previous, current = current, previous + (2.0 * nu / z) * current
            nu += 1.0
        return current

    n = twice // 2
    k0, k1 = _bessel_k01(z, scaled)
    if n == 0:
        return k0
    previous, current = k0, k1
    for m in range(1, n):
        previous, current = current, previous + (2.0 * m / z) * current
    return current


def bessel_i_derivative_identity_check(order: OrderLike, z: float, step: float = 1e-5) -> float:
    """
    |d/drho (rho^-alpha I_alpha(rho)) - rho^-alpha I_{alpha+1}(rho)| at rho = z,
    with the derivative taken by central differences.
    """
    order = _as_order(order)
    z = _check_argument(z)
    if z <= step:
        raise BesselDomainError(f"z = {z} is too close to 0 for a central difference with step {step}")
    alpha = order.alpha

    def scaled(rho: float) -> float:
        return rho ** (-alpha) * bessel_i(order, rho)

    finite_difference = (scaled(z + step) - scaled(z - step)) / (2.0 * step)
    identity = z ** (-alpha) * bessel_i(order.shifted(1), z)
    return abs(finite_difference - identity)
