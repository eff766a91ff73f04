"""Pair energies, Riesz energies and majorization lower bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import configurations as cf
from .configurations import DistanceFunctional, SphericalConfiguration
from .errors import DomainError, MajorsphereError, ParameterRangeError, SingularityError
from .majorization import (
    MajorizationOrder,
    SequenceLike,
    compare,
    extremal_sequence,
)


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = False
    hi_open: bool = False

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        lo_ok = x > self.lo if self.lo_open else x >= self.lo
        hi_ok = x < self.hi if self.hi_open else x <= self.hi
        return lo_ok & hi_ok

    def __str__(self):
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


REALS = Interval()
POSITIVE = Interval(0.0, math.inf, lo_open=True)


class MetadataWarning(UserWarning):
    """Declared convexity or monotonicity is contradicted on the sample grid."""


@dataclass(frozen=True)
class PotentialFunction:
    """A real function of one variable plus caller-declared shape metadata.

    The flags are what the majorization theorems need; they are spot-checked
    by :meth:`check_metadata`, never proven.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: Interval = REALS
    is_decreasing: bool = False
    is_convex: bool = False
    is_strictly_convex: bool = False
    description: str = ""

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.asarray(self.evaluator(x_arr), dtype=float)
        if out.shape != x_arr.shape:
            out = np.broadcast_to(out, x_arr.shape).copy()
        return float(out) if out.ndim == 0 else out

    def contains(self, x):
        return self.domain.contains(x)

    def __str__(self):
        return self.description or "f"

    def sample_grid(self, points: int = 100) -> np.ndarray:
        d = self.domain
        lo = d.lo if math.isfinite(d.lo) else (d.hi - 10.0 if math.isfinite(d.hi) else -5.0)
        hi = d.hi if math.isfinite(d.hi) else lo + 10.0
        inset = 1e-3 * (hi - lo)
        if d.lo_open or not math.isfinite(d.lo):
            lo += inset
        if d.hi_open or not math.isfinite(d.hi):
            hi -= inset
        return np.linspace(lo, hi, points)

    def check_metadata(self, points: int = 100) -> list:
        """Return (and warn about) declared properties that fail on a grid."""
        x = self.sample_grid(points)
        y = self(x)
        scale = max(1.0, float(np.max(np.abs(y))))
        problems = []
        if self.is_convex and np.min(np.diff(y, 2)) < -1e-9 * scale:
            problems.append(f"{self}: declared convex but a second difference is negative")
        if self.is_decreasing and np.max(np.diff(y)) > 1e-9 * scale:
            problems.append(f"{self}: declared decreasing but a first difference is positive")
        for p in problems:
            warnings.warn(p, MetadataWarning, stacklevel=2)
        return problems


def inverse_power(t: float) -> PotentialFunction:
    """``x ** -t`` on ``x > 0``."""
    if t <= 0:
        raise ParameterRangeError("inverse_power needs t > 0")
    return PotentialFunction(
        lambda x: x ** (-t), POSITIVE, True, True, True, f"x^-{t:g}"
    )


def neg_log() -> PotentialFunction:
    return PotentialFunction(lambda x: -np.log(x), POSITIVE, True, True, True, "-log x")


def exp_decay(c: float) -> PotentialFunction:
    """``exp(-c x)``; convex decreasing for ``c > 0``."""
    if c <= 0:
        raise ParameterRangeError("exp_decay needs c > 0")
    return PotentialFunction(lambda x: np.exp(-c * x), REALS, True, True, True, f"exp(-{c:g}x)")


def constant(c: float) -> PotentialFunction:
    return PotentialFunction(lambda x: np.full(np.shape(x), float(c)), REALS, True, True, False, f"{c:g}")


def linear_decreasing() -> PotentialFunction:
    return PotentialFunction(lambda x: -np.asarray(x), REALS, True, True, False, "-x")


def riesz_kernel(t: float) -> PotentialFunction:
    """Riesz kernel of the Euclidean distance: ``r**-t``, or ``-log r`` at ``t == 0``."""
    if t < 0:
        raise ParameterRangeError("Riesz exponent must be >= 0")
    if t == 0:
        return PotentialFunction(lambda r: -np.log(r), POSITIVE, True, True, True, "riesz t=0 (-log r)")
    return PotentialFunction(lambda r: r ** (-t), POSITIVE, True, True, True, f"riesz t={t:g}")


def riesz_kernel_squared(t: float) -> PotentialFunction:
    """Riesz kernel written in the squared distance ``q = r**2``."""
    if t < 0:
        raise ParameterRangeError("Riesz exponent must be >= 0")
    if t == 0:
        return PotentialFunction(lambda q: -0.5 * np.log(q), POSITIVE, True, True, True, "riesz t=0 in r^2")
    return PotentialFunction(lambda q: q ** (-t / 2), POSITIVE, True, True, True, f"riesz t={t:g} in r^2")


def polynomial_potential(poly) -> PotentialFunction:
    """Wrap a polynomial in ``t = cos(phi)`` (see :mod:`majorsphere.harmonic`)."""
    return PotentialFunction(poly, Interval(-1.0, 1.0), description=f"poly {poly}")


def parse_potential(text: str) -> PotentialFunction:
    """``inv:<t>``, ``neglog``, ``exp:<c>``, ``riesz:<t>``, ``riesz2:<t>``, ``const:<c>``, ``neg``."""
    key = text.strip().lower()
    name, _, arg = key.partition(":")
    try:
        if name == "inv":
            return inverse_power(float(arg))
        if name == "neglog":
            return neg_log()
        if name == "exp":
            return exp_decay(float(arg))
        if name == "riesz":
            return riesz_kernel(float(arg))
        if name == "riesz2":
            return riesz_kernel_squared(float(arg))
        if name == "const":
            return constant(float(arg))
        if name == "neg":
            return linear_decreasing()
    except ValueError:
        pass
    raise MajorsphereError(
        f"unknown potential {text!r}; use inv:<t>, neglog, exp:<c>, riesz:<t>, riesz2:<t>, const:<c> or neg"
    )


def _check_domain(values: np.ndarray, f: PotentialFunction, what):
    inside = f.contains(values)
    if not np.all(inside):
        k = int(np.nonzero(~inside)[0][0])
        raise DomainError(f"{what(k)}: value {values[k]!r} lies outside the domain {f.domain} of {f}")


def pair_energy(X: SphericalConfiguration, rho: DistanceFunctional, f: PotentialFunction) -> float:
    """``sum_{i<j} f(rho(x_i, x_j))`` with correctly rounded summation."""
    values = cf.distance_profile(X, rho).values
    i, j = cf.pair_indices(X.m)
    _check_domain(values, f, lambda k: f"pair ({int(i[k])}, {int(j[k])})")
    return math.fsum(np.atleast_1d(f(values)).tolist())


def riesz_energy(X: SphericalConfiguration, t: float) -> float:
    """Riesz ``t``-energy; the logarithmic energy ``sum log(1/r)`` at ``t == 0``."""
    if t < 0:
        raise ParameterRangeError("Riesz exponent must be >= 0")
    if X.m < 2:
        return 0.0
    r, _, (i, j) = cf.pair_distances(X)
    zero = np.nonzero(r == 0)[0]
    if zero.size:
        k = int(zero[0])
        raise SingularityError(f"points {int(i[k])} and {int(j[k])} coincide", (int(i[k]), int(j[k])))
    terms = -np.log(r) if t == 0 else r ** (-t)
    return math.fsum(terms.tolist())


def lower_bound_from_constraints(T: SequenceLike, f: PotentialFunction) -> float:
    """``sum f(y_k(T))``: a lower bound on ``E_f`` whenever prefix sums obey ``T``."""
    y = extremal_sequence(T).values
    _check_domain(y, f, lambda k: f"y_{k + 1}(T)")
    return math.fsum(np.atleast_1d(f(y)).tolist())


def simplex_energy_bound(m: int, f: PotentialFunction) -> float:
    """``C(m, 2) f(2m / (m - 1))`` for ``f`` of the squared distance.

    Lower bound for ``sum_{i<j} f(|p_i - p_j|^2)`` over any ``m`` unit
    vectors, because the squared distances sum to at most ``m^2``.
    """
    if m < 2:
        raise ParameterRangeError("simplex bound needs m >= 2")
    a_m = 2.0 * m / (m - 1)
    _check_domain(np.array([a_m]), f, lambda k: "a_m")
    return math.comb(m, 2) * float(f(a_m))


@dataclass(frozen=True)
class CircleReport:
    dominated_by_polygon: MajorizationOrder
    polygon_profile_sum: float
    profile_sum: float


def circle_profile_bound(X: SphericalConfiguration, tol: float = 1e-9) -> CircleReport:
    """Compare the regular ``m``-gon's angular profile against ``X`` on ``S^1``."""
    if X.dimension != 2:
        raise MajorsphereError(f"circle bound needs points in R^2, got n={X.dimension}")
    phi = DistanceFunctional.angular()
    reg = cf.distance_profile(cf.polygon(X.m), phi)
    prof = cf.distance_profile(X, phi)
    order = compare(reg, prof, tol)
    return CircleReport(order, float(reg.prefix_sums()[-1]), float(prof.prefix_sums()[-1]))
