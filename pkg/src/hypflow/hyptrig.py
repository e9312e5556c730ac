"""Curvature-scaled hyperbolic trigonometry and radius/volume inversions.

Everything here is parametrized by the ambient sectional curvature
``lam < 0`` through :class:`LambdaParams`.  With ``k = sqrt(|lam|)``, the
curvature-scaled analogues of the hyperbolic functions are

    gsinh(t) = sinh(k t) / k
    gcosh(t) = gsinh'(t) = cosh(k t)
    gtanh(t) = gsinh(t) / gcosh(t)
    gcoth(t) = gcosh(t) / gsinh(t)

They satisfy the quadratic rule ``gcosh^2 + lam * gsinh^2 = 1`` and the
double-curvature rules (subscript: functions taken at curvature 4*lam)

    gcosh_[4 lam](t) = gcosh(t)^2 - lam * gsinh(t)^2
    gsinh_[4 lam](t) = gsinh(t) * gcosh(t)

and reduce to sinh/cosh/tanh/coth at lam = -1.  A geodesic sphere of
radius r in the ambient space has mean curvature n * gcoth(r) (sum of
principal curvatures, outward normal), which decreases to k as r grows.

The module also provides the geodesic-ball volume in closed form and two
inverse maps used by the radius bounds for h-convex domains:

* :func:`ball_radius_for_volume` -- radius of the geodesic ball of a
  prescribed volume (so an h-convex domain of volume V has inradius at
  most ``ball_radius_for_volume(V)``);
* :func:`inradius_floor` -- inverse of ``r -> r + circumradius_gap(r)``,
  mapping an upper bound on the farthest boundary distance back to the
  smallest compatible inradius.

All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailure, PoleError


@dataclass(frozen=True)
class LambdaParams:
    """Ambient curvature lam < 0 with its cached square root sqrt(|lam|)."""

    lam: float
    sqrt_abs_lam: float = 0.0

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam) or lam >= 0.0:
            raise DomainError(f"ambient curvature must be finite and negative, got {lam}")
        object.__setattr__(self, "lam", lam)
        k = float(self.sqrt_abs_lam)
        if k == 0.0:
            k = math.sqrt(-lam)
        elif abs(k * k + lam) > 4.0 * math.ulp(-lam):
            raise DomainError(f"sqrt_abs_lam={k} inconsistent with lam={lam}")
        object.__setattr__(self, "sqrt_abs_lam", k)


TrigValues = namedtuple("TrigValues", ["s", "c", "ta", "co"])


def gsinh(t, params: LambdaParams):
    """sinh(k t)/k, the curvature-scaled sine (geodesic-sphere radius factor)."""
    k = params.sqrt_abs_lam
    return np.sinh(k * t) / k


def gcosh(t, params: LambdaParams):
    """cosh(k t), the derivative of gsinh."""
    return np.cosh(params.sqrt_abs_lam * t)


def gtanh(t, params: LambdaParams):
    """gsinh/gcosh = tanh(k t)/k."""
    k = params.sqrt_abs_lam
    return np.tanh(k * t) / k


def gcoth(t, params: LambdaParams):
    """gcosh/gsinh = k/tanh(k t); has a pole at t = 0."""
    if np.any(np.equal(t, 0.0)):
        raise PoleError("gcoth has a pole at t = 0")
    k = params.sqrt_abs_lam
    return k / np.tanh(k * t)


def lambda_trig(t, params: LambdaParams) -> TrigValues:
    """All four curvature-scaled functions at once.

    Because the cotangent component has a pole at t = 0, the combined
    evaluation rejects t = 0 (use the individual functions there).
    """
    return TrigValues(gsinh(t, params), gcosh(t, params), gtanh(t, params), gcoth(t, params))


def unit_sphere_volume(n: int) -> float:
    """n-dimensional measure of the unit sphere S^n in R^(n+1)."""
    if n < 0:
        raise DomainError(f"sphere dimension must be nonnegative, got {n}")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def gsinh_power_integral(t, n: int, params: LambdaParams):
    """Integral of gsinh(r)^n for r from 0 to t, in closed form.

    Uses the recurrence n*|lam|*I_n = gsinh^(n-1)*gcosh - (n-1)*I_(n-2)
    with I_0 = t and I_1 = (gcosh - 1)/|lam|.
    """
    if n < 0:
        raise DomainError(f"power must be nonnegative, got {n}")
    t = np.asarray(t, dtype=float)
    if n == 0:
        return t + 0.0
    k2 = -params.lam
    s = gsinh(t, params)
    c = gcosh(t, params)
    prev = t + 0.0
    cur = (c - 1.0) / k2
    for j in range(2, n + 1):
        prev, cur = cur, (s ** (j - 1) * c - (j - 1) * prev) / (j * k2)
    return cur


def ball_volume(r, n: int, params: LambdaParams):
    """Volume of the geodesic ball of radius r around a point."""
    return unit_sphere_volume(n) * gsinh_power_integral(r, n, params)


def ball_radius_for_volume(volume: float, n: int, params: LambdaParams) -> float:
    """Radius of the geodesic ball with the given volume.

    Closed form for n = 1; for n >= 2 a bracketed bisection on the
    strictly increasing ball-volume function, polished by Newton.
    """
    volume = float(volume)
    if not (math.isfinite(volume) and volume > 0.0):
        raise DomainError(f"ball volume must be positive and finite, got {volume}")
    k2 = -params.lam
    if n == 1:
        return math.acosh(1.0 + volume * k2 / (2.0 * math.pi)) / params.sqrt_abs_lam

    hi = 1.0
    for _ in range(400):
        if ball_volume(hi, n, params) >= volume:
            break
        hi *= 2.0
    else:
        raise NumericalFailure(f"could not bracket radius for volume {volume}")
    lo = 0.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if ball_volume(mid, n, params) < volume:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    vsn = unit_sphere_volume(n)
    for _ in range(4):
        slope = vsn * float(gsinh(x, params)) ** n
        x -= (float(ball_volume(x, n, params)) - volume) / slope
    return x


def circumradius_gap(r, params: LambdaParams):
    """Additive gap bounding how far the boundary of an h-convex domain
    with inradius r can lie from the inball center:

        gap(r) = sqrt(|lam|) * log((1 + sqrt(gtanh(r/2)))^2 / (1 + gtanh(r/2)))

    The gap vanishes at r = 0 and stays below sqrt(|lam|) * log(2).
    """
    ta = gtanh(np.asarray(r, dtype=float) / 2.0, params)
    return params.sqrt_abs_lam * np.log((1.0 + np.sqrt(ta)) ** 2 / (1.0 + ta))


def circumradius_bound(r, params: LambdaParams):
    """r + circumradius_gap(r): farthest-boundary-distance bound for an
    h-convex domain of inradius r.  Strictly increasing and >= r."""
    return np.asarray(r, dtype=float) + circumradius_gap(r, params)


def inradius_floor(s: float, params: LambdaParams) -> float:
    """Inverse of :func:`circumradius_bound`: the unique x >= 0 with
    x + circumradius_gap(x) = s.  Satisfies inradius_floor(s) <= s."""
    s = float(s)
    if s < 0.0 or not math.isfinite(s):
        raise DomainError(f"bound must be nonnegative and finite, got {s}")
    if s == 0.0:
        return 0.0
    lo, hi = 0.0, s
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(circumradius_bound(mid, params)) < s:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, s):
            break
    return 0.5 * (lo + hi)
