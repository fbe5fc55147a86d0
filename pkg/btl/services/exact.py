"""
Closed-form boundary torsion functions and rigidities for balls, spherical
shells and boxes in any dimension N >= 2, plus the one-dimensional slab
profile.
"""

import logging
import math
from typing import List, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict, Field, model_validator

from btl.services.specfun import (
    BesselOrder,
    bessel_i,
    bessel_ie,
    bessel_i_ratio,
    bessel_k,
    bessel_ke,
    gamma_half_integer,
)

logger = logging.getLogger(__name__)

QUADRATURE_POINTS = 64
STEKLOV_MODES = 5


class ClosedFormDomainError(ValueError):
    """Evaluation point or parameters outside the closed-form domain."""


class BallSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: int = Field(default=2, ge=2)
    radius: float = Field(gt=0.0)
    delta: float = Field(gt=0.0)


class ShellSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: int = Field(default=2, ge=2)
    inner_radius: float = Field(gt=0.0)
    outer_radius: float = Field(gt=0.0)
    delta: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check_radii(self) -> "ShellSpec":
        if self.inner_radius >= self.outer_radius:
            raise ValueError(f"inner_radius {self.inner_radius} must be below outer_radius {self.outer_radius}")
        return self


class BoxSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    half_lengths: List[float] = Field(min_length=2)
    delta: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check_lengths(self) -> "BoxSpec":
        if any(length <= 0.0 for length in self.half_lengths):
            raise ValueError(f"half_lengths must be positive, got {self.half_lengths}")
        return self

    @property
    def dimension(self) -> int:
        return len(self.half_lengths)


ClosedFormSpec = Union[BallSpec, ShellSpec, BoxSpec]


def unit_ball_volume(dimension: int) -> float:
    """omega_N = pi^(N/2) / Gamma(N/2 + 1)."""
    return math.pi ** (dimension / 2.0) / gamma_half_integer(dimension + 2)


def sphere_area(dimension: int) -> float:
    return dimension * unit_ball_volume(dimension)


def _gauss_on(low: float, high: float) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(QUADRATURE_POINTS)
    half = 0.5 * (high - low)
    return low + half * (nodes + 1.0), half * weights


def _layered_gauss(low: float, high: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre with panels doubling away from both ends, starting at ``width``."""
    length = high - low
    if width >= 0.25 * length:
        return _gauss_on(low, high)
    offsets = [0.0]
    step = width
    while step < 0.5 * length:
        offsets.append(step)
        step *= 2.0
    breaks = np.unique(np.concatenate([low + np.array(offsets), high - np.array(offsets), [0.5 * (low + high)]]))
    panels = [_gauss_on(a, b) for a, b in zip(breaks[:-1], breaks[1:])]
    return np.concatenate([p[0] for p in panels]), np.concatenate([p[1] for p in panels])


# Balls

def ball_perimeter(spec: BallSpec) -> float:
    return sphere_area(spec.dimension) * spec.radius ** (spec.dimension - 1)


def ball_volume(spec: BallSpec) -> float:
    return unit_ball_volume(spec.dimension) * spec.radius ** spec.dimension


def ball_torsion_function(spec: BallSpec, rho: float) -> float:
    """U(rho) = rho^(1-N/2) I_{N/2-1}(delta rho) / (delta R^(1-N/2) I_{N/2}(delta R))."""
    radius, delta = spec.radius, spec.delta
    if rho < 0.0 or rho > radius * (1.0 + 1e-12):
        raise ClosedFormDomainError(f"rho = {rho} is outside [0, {radius}]")
    twice = spec.dimension - 2
    a = twice / 2.0
    upper = BesselOrder(twice + 2)

    if rho == 0.0:
        # rho^-a I_a(delta rho) -> (delta/2)^a / Gamma(a + 1)
        core = (0.5 * delta) ** a / gamma_half_integer(twice + 2)
        return core * math.exp(-delta * radius) / (delta * radius ** (-a) * bessel_ie(upper, delta * radius))

    rho = min(rho, radius)
    ratio = bessel_ie(BesselOrder(twice), delta * rho) / bessel_ie(upper, delta * radius)
    return (rho / radius) ** (-a) * ratio * math.exp(delta * (rho - radius)) / delta


def ball_ratio_profile(spec: BallSpec, rho: float) -> float:
    """U'(rho) / rho, using d/drho (rho^-a I_a(delta rho)) = delta rho^-a I_{a+1}(delta rho)."""
    if rho <= 0.0 or rho > spec.radius * (1.0 + 1e-12):
        raise ClosedFormDomainError(f"rho = {rho} is outside (0, {spec.radius}]")
    twice = spec.dimension - 2
    a = twice / 2.0
    upper = BesselOrder(twice + 2)
    delta, radius = spec.delta, spec.radius
    ratio = bessel_ie(upper, delta * rho) / bessel_ie(upper, delta * radius)
    return rho ** (-a - 1.0) * radius ** a * ratio * math.exp(delta * (rho - radius))


def ball_rigidity(spec: BallSpec) -> float:
    """T(B_R; delta) = R^(N-1) N omega_N I_{N/2-1}(delta R) / (delta I_{N/2}(delta R))."""
    twice = spec.dimension - 2
    ratio = bessel_i_ratio(BesselOrder(twice), spec.delta * spec.radius)
    return ball_perimeter(spec) / (spec.delta * ratio)


def ball_steklov_sigma1(spec: BallSpec) -> float:
    """
    First modified Steklov eigenvalue of the ball.

    The degree-m mode rho^-a I_{a+m}(delta rho) Y_m has quotient
    delta I_{a+m+1}(delta R)/I_{a+m}(delta R) + m/R; the minimum is taken
    over m = 0..4.
    """
    twice = spec.dimension - 2
    candidates = [
        spec.delta * bessel_i_ratio(BesselOrder(twice + 2 * m), spec.delta * spec.radius) + m / spec.radius
        for m in range(STEKLOV_MODES)
    ]
    return min(candidates)


# Shells

def shell_perimeter(spec: ShellSpec) -> float:
    n = spec.dimension
    return sphere_area(n) * (spec.inner_radius ** (n - 1) + spec.outer_radius ** (n - 1))


def shell_volume(spec: ShellSpec) -> float:
    n = spec.dimension
    return unit_ball_volume(n) * (spec.outer_radius ** n - spec.inner_radius ** n)


def shell_coefficients(spec: ShellSpec) -> tuple[float, float]:
    """
    (C, D) of V(rho) = rho^-a (C e^{delta (rho - R)} Ie_a(delta rho) + D e^{-delta (rho - r)} Ke_a(delta rho)),
    a = N/2 - 1, from the Neumann data V'(r) = -1, V'(R) = +1. Ie and Ke are the
    exponentially scaled I_a and K_a, so both exponential factors stay below one.
    """
    twice = spec.dimension - 2
    a = twice / 2.0
    upper = BesselOrder(twice + 2)
    delta, r, big_r = spec.delta, spec.inner_radius, spec.outer_radius

    def row(rho: float) -> list[float]:
        weight = delta * rho ** (-a)
        grow = math.exp(delta * (rho - big_r))
        decay = math.exp(-delta * (rho - r))
        return [weight * grow * bessel_ie(upper, delta * rho), -weight * decay * bessel_ke(upper, delta * rho)]

    matrix = np.array([row(r), row(big_r)])
    c, d = np.linalg.solve(matrix, np.array([-1.0, 1.0]))
    return float(c), float(d)


def shell_torsion_function(spec: ShellSpec, rho: float) -> float:
    if rho < spec.inner_radius * (1.0 - 1e-12) or rho > spec.outer_radius * (1.0 + 1e-12):
        raise ClosedFormDomainError(f"rho = {rho} is outside [{spec.inner_radius}, {spec.outer_radius}]")
    rho = min(max(rho, spec.inner_radius), spec.outer_radius)
    twice = spec.dimension - 2
    a = twice / 2.0
    order = BesselOrder(twice)
    c, d = shell_coefficients(spec)
    delta = spec.delta
    z = delta * rho
    grow = math.exp(delta * (rho - spec.outer_radius))
    decay = math.exp(-delta * (rho - spec.inner_radius))
    return rho ** (-a) * (c * grow * bessel_ie(order, z) + d * decay * bessel_ke(order, z))


def shell_rigidity(spec: ShellSpec) -> float:
    """N omega_N (r^(N-1) V(r) + R^(N-1) V(R))."""
    n = spec.dimension
    r, big_r = spec.inner_radius, spec.outer_radius
    return sphere_area(n) * (
        r ** (n - 1) * shell_torsion_function(spec, r) + big_r ** (n - 1) * shell_torsion_function(spec, big_r)
    )


def shell_display_rigidity(spec: ShellSpec) -> float:
    """
    The printed two-term expression for the shell rigidity, evaluated verbatim,
    including its unscaled Bessel arguments. Only used to report how far it
    sits from shell_rigidity.
    """
    n = spec.dimension
    r, big_r, delta = spec.inner_radius, spec.outer_radius, spec.delta
    half = BesselOrder(n)
    low = BesselOrder(2 - n)
    power = 1.0 - n / 2.0
    pr, pR = r ** power, big_r ** power

    k_sum = pr * bessel_k(half, delta * r) + pR * bessel_k(half, delta * big_r)
    i_sum = pr * bessel_i(half, delta * r) + pR * bessel_i(half, delta * big_r)
    i_low = pR * bessel_i(low, delta * big_r) + pr * bessel_i(low, delta * r)
    k_low = pR * bessel_k(low, delta * big_r) + pr * bessel_k(low, delta * r)
    wronskian = bessel_i(half, big_r) * bessel_k(half, r) - bessel_i(half, r) * bessel_k(half, big_r)
    scale = delta * pr * pR
    return k_sum * i_low / (scale * wronskian) + i_sum * k_low / (scale * -wronskian)


def shell_display_discrepancy(spec: ShellSpec) -> float:
    exact_value = shell_rigidity(spec)
    return abs(shell_display_rigidity(spec) - exact_value) / exact_value


# Boxes

def _face_measures(spec: BoxSpec) -> np.ndarray:
    sides = 2.0 * np.asarray(spec.half_lengths)
    return np.array([2.0 * np.prod(np.delete(sides, k)) for k in range(spec.dimension)])


def _edge_measure(spec: BoxSpec, k: int, i: int) -> float:
    sides = 2.0 * np.asarray(spec.half_lengths)
    return 4.0 * float(np.prod(np.delete(sides, [k, i])))


def box_perimeter(spec: BoxSpec) -> float:
    return float(np.sum(_face_measures(spec)))


def box_volume(spec: BoxSpec) -> float:
    return float(np.prod(2.0 * np.asarray(spec.half_lengths)))


def _cosh_over_sinh(delta: float, x, length) -> np.ndarray:
    """cosh(delta x) / sinh(delta l) for |x| <= l, written with decaying exponentials only."""
    x = np.abs(np.asarray(x, dtype=float))
    length = np.asarray(length, dtype=float)
    return (np.exp(delta * (x - length)) + np.exp(-delta * (x + length))) / -np.expm1(-2.0 * delta * length)


def box_torsion_function(spec: BoxSpec, x) -> float | np.ndarray:
    """sum_i cosh(delta x_i) / (delta sinh(delta l_i)); x may be one point or an (k, N) array."""
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    lengths = np.asarray(spec.half_lengths)
    if points.shape[1] != spec.dimension:
        raise ClosedFormDomainError(f"Points must have {spec.dimension} coordinates")
    if np.any(np.abs(points) > lengths * (1.0 + 1e-12)):
        raise ClosedFormDomainError("Point lies outside the box")
    values = np.sum(_cosh_over_sinh(spec.delta, points, lengths), axis=1) / spec.delta
    return float(values[0]) if single else values


def box_rigidity(spec: BoxSpec) -> float:
    delta = spec.delta
    faces = _face_measures(spec)
    total = 0.0
    for k, length in enumerate(spec.half_lengths):
        total += faces[k] / (delta * math.tanh(delta * length))
        total += sum(_edge_measure(spec, k, i) for i in range(spec.dimension) if i != k) / delta ** 2
    return total


# Slab

def slab_alpha(delta: float) -> float:
    """alpha(delta) = 1 / (delta tanh delta)."""
    if delta <= 0.0:
        raise ClosedFormDomainError(f"delta must be positive, got {delta}")
    return 1.0 / (delta * math.tanh(delta))


def slab_profile(delta: float, t) -> float | np.ndarray:
    """u_I(t) = (cosh(delta t) / tanh(delta) - sinh(delta t)) / delta = cosh(delta (1 - t)) / (delta sinh(delta)) on [0, 1]."""
    if delta <= 0.0:
        raise ClosedFormDomainError(f"delta must be positive, got {delta}")
    t = np.asarray(t, dtype=float)
    values = _cosh_over_sinh(delta, 1.0 - t, 1.0) / delta
    return float(values) if values.ndim == 0 else values


# Dispatch over the three families

def perimeter(spec: ClosedFormSpec) -> float:
    if isinstance(spec, BallSpec):
        return ball_perimeter(spec)
    if isinstance(spec, ShellSpec):
        return shell_perimeter(spec)
    return box_perimeter(spec)


def volume(spec: ClosedFormSpec) -> float:
    if isinstance(spec, BallSpec):
        return ball_volume(spec)
    if isinstance(spec, ShellSpec):
        return shell_volume(spec)
    return box_volume(spec)


def rigidity(spec: ClosedFormSpec) -> float:
    if isinstance(spec, BallSpec):
        return ball_rigidity(spec)
    if isinstance(spec, ShellSpec):
        return shell_rigidity(spec)
    return box_rigidity(spec)


def with_delta(spec: ClosedFormSpec, delta: float) -> ClosedFormSpec:
    return spec.model_copy(update={"delta": delta})


def scaled(spec: ClosedFormSpec, factor: float) -> ClosedFormSpec:
    """Closed-form family member for t*Omega at delta/t."""
    delta = spec.delta / factor
    if isinstance(spec, BallSpec):
        return spec.model_copy(update={"radius": spec.radius * factor, "delta": delta})
    if isinstance(spec, ShellSpec):
        return spec.model_copy(update={
            "inner_radius": spec.inner_radius * factor,
            "outer_radius": spec.outer_radius * factor,
            "delta": delta,
        })
    return spec.model_copy(update={"half_lengths": [length * factor for length in spec.half_lengths], "delta": delta})


def l1_norm(spec: ClosedFormSpec) -> float:
    """Integral of the torsion function over the domain by Gauss-Legendre quadrature."""
    if isinstance(spec, BallSpec):
        nodes, weights = _layered_gauss(0.0, spec.radius, 1.0 / spec.delta)
        values = np.array([ball_torsion_function(spec, rho) for rho in nodes])
        return sphere_area(spec.dimension) * float(np.sum(weights * values * nodes ** (spec.dimension - 1)))
    if isinstance(spec, ShellSpec):
        nodes, weights = _layered_gauss(spec.inner_radius, spec.outer_radius, 1.0 / spec.delta)
        values = np.array([shell_torsion_function(spec, rho) for rho in nodes])
        return sphere_area(spec.dimension) * float(np.sum(weights * values * nodes ** (spec.dimension - 1)))

    sides = 2.0 * np.asarray(spec.half_lengths)
    total = 0.0
    for i, length in enumerate(spec.half_lengths):
        nodes, weights = _layered_gauss(-length, length, 1.0 / spec.delta)
        axis_integral = float(np.sum(weights * _cosh_over_sinh(spec.delta, nodes, length))) / spec.delta
        total += axis_integral * float(np.prod(np.delete(sides, i)))
    return total


def l1_identity_defect(spec: ClosedFormSpec) -> float:
    """|delta^2 int u - |boundary|| / |boundary|."""
    boundary = perimeter(spec)
    return abs(spec.delta ** 2 * l1_norm(spec) - boundary) / boundary
