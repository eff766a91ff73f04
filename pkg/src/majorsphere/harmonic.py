"""Gegenbauer analysis of spherical configurations.

Gegenbauer polynomials ``G_k^{(n)}`` are normalized so that ``G_k(1) = 1``
and generated by the three-term recurrence

    G_k = ((2k + n - 4) t G_{k-1} - (k - 1) G_{k-2}) / (k + n - 3).

They give configuration moments, the Delsarte bound and the checks for
tau-designs, designs of harmonic index K and f-designs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Optional, Sequence

import numpy as np

from . import configurations as cf
from .configurations import SphericalConfiguration
from .errors import DimensionError, HypothesisError, MajorsphereError
from .majorization import MajorizationOrder, compare

MAX_DEGREE = 64
MOMENT_TOL = 1e-8
ROOT_GRID = 4096


def _is_exact(c) -> bool:
    return isinstance(c, Rational) and not isinstance(c, bool)


class PolynomialInT:
    """Real polynomial in ``t = cos(phi)`` stored by monomial coefficients, low to high.

    Coefficients given as ``int`` or ``Fraction`` are kept exact.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable):
        coeffs = []
        for c in coefficients:
            if _is_exact(c):
                coeffs.append(Fraction(c))
            else:
                c = float(c)
                if not math.isfinite(c):
                    raise MajorsphereError("polynomial coefficients must be finite")
                coeffs.append(c)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [Fraction(0)]
        self.coefficients = tuple(coeffs)

    @classmethod
    def parse(cls, text: str) -> "PolynomialInT":
        """``-0.25,0,1`` means ``t^2 - 1/4``; ``1/4`` style fractions stay exact."""
        out = []
        for tok in text.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                if "/" in tok or ("." not in tok and "e" not in tok.lower()):
                    out.append(Fraction(tok))
                else:
                    out.append(float(tok))
            except (ValueError, ZeroDivisionError):
                raise MajorsphereError(f"cannot parse polynomial coefficient {tok!r}") from None
        if not out:
            raise MajorsphereError("empty polynomial")
        return cls(out)

    @classmethod
    def from_roots(cls, roots: Iterable, leading=1) -> "PolynomialInT":
        p = cls([leading])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coefficients)

    def float_coefficients(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients])

    def __call__(self, t):
        """Horner evaluation in floating point; scalars in, floats out."""
        c = self.float_coefficients()
        t_arr = np.asarray(t, dtype=float)
        acc = np.zeros_like(t_arr) + c[-1]
        for a in c[-2::-1]:
            acc = acc * t_arr + a
        return float(acc) if acc.ndim == 0 else acc

    def exact_value(self, t) -> Fraction:
        acc = Fraction(0)
        for a in reversed(self.coefficients):
            acc = acc * t + a
        return acc

    def derivative(self) -> "PolynomialInT":
        if self.degree == 0:
            return PolynomialInT([0])
        return PolynomialInT([k * c for k, c in enumerate(self.coefficients)][1:])

    def __mul__(self, other):
        if not isinstance(other, PolynomialInT):
            other = PolynomialInT([other])
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return PolynomialInT(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolynomialInT):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"PolynomialInT({[_fmt(c) for c in self.coefficients]})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0 and self.degree > 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            terms.append(f"{_fmt(c)}{'*' if mono else ''}{mono}")
        return " + ".join(terms) if terms else "0"


def _fmt(c):
    if isinstance(c, Fraction):
        return str(c)
    return f"{c:.15g}"


# --- Gegenbauer polynomials -------------------------------------------------


def _check_dim(n):
    if int(n) != n or n < 2:
        raise MajorsphereError(f"Gegenbauer dimension must be an integer >= 2, got {n!r}")


def gegenbauer_eval(n: int, k: int, t):
    """``G_k^{(n)}(t)`` by the three-term recurrence (vectorized in ``t``)."""
    _check_dim(n)
    if k < 0:
        raise MajorsphereError("degree k must be >= 0")
    t = np.asarray(t, dtype=float)
    prev, cur = np.ones_like(t), t.copy()
    if k == 0:
        out = prev
    else:
        for j in range(2, k + 1):
            prev, cur = cur, ((2 * j + n - 4) * t * cur - (j - 1) * prev) / (j + n - 3)
        out = cur
    return float(out) if out.ndim == 0 else out


def gegenbauer_table(n: int, kmax: int, t) -> np.ndarray:
    """Stack of ``G_0 .. G_kmax`` evaluated at ``t``; shape ``(kmax + 1,) + t.shape``."""
    _check_dim(n)
    t = np.asarray(t, dtype=float)
    out = np.empty((kmax + 1,) + t.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = t
    for j in range(2, kmax + 1):
        out[j] = ((2 * j + n - 4) * t * out[j - 1] - (j - 1) * out[j - 2]) / (j + n - 3)
    return out


@lru_cache(maxsize=None)
def gegenbauer_monomial(n: int, k: int) -> tuple:
    """Exact monomial coefficients (low to high) of ``G_k^{(n)}``."""
    _check_dim(n)
    if k == 0:
        return (Fraction(1),)
    if k == 1:
        return (Fraction(0), Fraction(1))
    g1 = gegenbauer_monomial(n, k - 1)
    g2 = gegenbauer_monomial(n, k - 2)
    out = [Fraction(0)] * (k + 1)
    a = Fraction(2 * k + n - 4, k + n - 3)
    b = Fraction(k - 1, k + n - 3)
    for i, c in enumerate(g1):
        out[i + 1] += a * c
    for i, c in enumerate(g2):
        out[i] -= b * c
    return tuple(out)


@dataclass(frozen=True)
class GegenbauerExpansion:
    """``f = sum_k f_k G_k^{(n)}``."""

    dimension: int
    coefficients: tuple

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coefficients)

    def __getitem__(self, k):
        return self.coefficients[k] if k < len(self.coefficients) else 0

    def __call__(self, t):
        c = np.array([float(x) for x in self.coefficients])
        table = gegenbauer_table(self.dimension, self.degree, t)
        out = np.tensordot(c, table, axes=1)
        return float(out) if np.ndim(out) == 0 else out

    def to_polynomial(self) -> PolynomialInT:
        return from_gegenbauer(self)


def to_gegenbauer(p: PolynomialInT, n: int, max_degree: int = MAX_DEGREE) -> GegenbauerExpansion:
    """Change of basis from monomials to ``G_k^{(n)}`` by back-substitution.

    The work is done in exact rational arithmetic (floats enter as their
    exact binary value); coefficients come back as ``Fraction`` when the
    input was exact and as floats otherwise.
    """
    if not isinstance(p, PolynomialInT):
        p = PolynomialInT(p)
    _check_dim(n)
    if p.degree > max_degree:
        raise MajorsphereError(f"degree {p.degree} exceeds the maximum {max_degree}")
    rem = [Fraction(c) for c in p.coefficients]
    f = [Fraction(0)] * (p.degree + 1)
    for k in range(p.degree, -1, -1):
        g = gegenbauer_monomial(n, k)
        fk = rem[k] / g[k]
        f[k] = fk
        if fk:
            for i, c in enumerate(g):
                rem[i] -= fk * c
    coeffs = tuple(f) if p.exact else tuple(float(x) for x in f)
    return GegenbauerExpansion(int(n), coeffs)


def from_gegenbauer(e: GegenbauerExpansion) -> PolynomialInT:
    exact = e.exact
    acc = [Fraction(0)] * (e.degree + 1)
    for k, fk in enumerate(e.coefficients):
        fk = Fraction(fk)
        for i, c in enumerate(gegenbauer_monomial(e.dimension, k)):
            acc[i] += fk * c
    return PolynomialInT(acc if exact else [float(x) for x in acc])


# --- moments ------------------------------------------------------------------


@dataclass(frozen=True)
class MomentVector:
    """``M_0 .. M_kmax``; ``M_k = sum_{i,j} G_k(<p_i, p_j>)`` including ``i == j``."""

    values: tuple
    m: int
    dimension: int

    def __getitem__(self, k):
        return self.values[k]

    @property
    def kmax(self) -> int:
        return len(self.values) - 1

    def scaled(self, k) -> float:
        return self.values[k] / (self.m * self.m)


def moments(P: SphericalConfiguration, kmax: int) -> MomentVector:
    n = P.dimension
    if n < 2:
        raise MajorsphereError("moments need dimension n >= 2")
    if kmax < 0:
        raise MajorsphereError("kmax must be >= 0")
    g = np.clip(P.gram(), -1.0, 1.0)
    np.fill_diagonal(g, 1.0)
    table = gegenbauer_table(n, kmax, g)
    vals = [P.m * P.m] + [math.fsum(table[k].ravel().tolist()) for k in range(1, kmax + 1)]
    return MomentVector(tuple(vals), P.m, n)


def pair_sum(P: SphericalConfiguration, f) -> float:
    """``S_f(P) = sum_{i,j} f(<p_i, p_j>)`` over all ordered pairs, diagonal included."""
    g = np.clip(P.gram(), -1.0, 1.0)
    np.fill_diagonal(g, 1.0)
    return math.fsum(np.asarray(f(g)).ravel().tolist())


# --- roots ----------------------------------------------------------------------


def _bisect(p, a, b, fa):
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        fm = p(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _sign_change_roots(p, lo, hi, grid):
    x = np.linspace(lo, hi, grid + 1)
    y = p(x)
    roots = [float(x[i]) for i in np.nonzero(y == 0)[0]]
    for i in np.nonzero(y[:-1] * y[1:] < 0)[0]:
        roots.append(_bisect(p, float(x[i]), float(x[i + 1]), float(y[i])))
    return roots


def _root_tol(p: PolynomialInT, tol: float) -> float:
    return tol * max(1.0, float(np.sum(np.abs(p.float_coefficients()))))


def real_roots(
    p: PolynomialInT,
    lo: float = -1.0,
    hi: float = 1.0,
    candidates: Sequence[float] = (),
    tol: float = 1e-9,
    grid: int = ROOT_GRID,
    include_hi: bool = False,
) -> list:
    """Real roots of ``p`` in ``[lo, hi)`` without a companion matrix.

    Sign changes on a uniform grid are refined by bisection.  Roots of even
    multiplicity show no sign change, so the roots of ``p'`` are searched the
    same way and kept when ``|p|`` is negligible there; ``candidates`` (for
    example clustered inner products) are kept on the same test.
    """
    if p.degree == 0:
        return []
    thr = _root_tol(p, tol)
    found = _sign_change_roots(p, lo, hi, grid)
    if p.degree >= 2:
        for r in real_roots(p.derivative(), lo, hi, (), tol, grid, True):
            if abs(p(r)) <= thr:
                found.append(r)
    for c in candidates:
        if lo <= c <= hi and abs(p(c)) <= thr:
            found.append(float(c))
    found.sort()
    out = []
    for r in found:
        if not include_hi and r >= hi - 1e-12:
            continue
        if out and abs(r - out[-1]) <= 1e-7:
            continue
        out.append(r)
    return out


# --- Delsarte bound ---------------------------------------------------------------


@dataclass(frozen=True)
class DelsarteReport:
    bound: Optional[float]
    hypotheses_ok: bool
    f0: float
    f_at_1: float
    coefficients: tuple
    diagnostics: tuple = ()


def delsarte_bound(
    f: PolynomialInT,
    n: int,
    T: Optional[Sequence[float]] = None,
    interval: Optional[tuple] = None,
    tol: float = 1e-9,
) -> DelsarteReport:
    """Cardinality bound ``m <= f(1) / f_0`` for codes with inner products in ``T``.

    ``T`` is either a finite set of inner products or, through ``interval``,
    a closed interval sampled on a grid together with its endpoints and the
    roots of ``f`` inside it.  The bound is withheld when a Gegenbauer
    coefficient is negative or ``f > 0`` somewhere on the allowed set.
    """
    if (T is None) == (interval is None):
        raise MajorsphereError("give exactly one of T (finite set) or interval")
    e = to_gegenbauer(f, n)
    f0 = float(e[0])
    if f0 <= 0:
        raise HypothesisError(f"f_0 = {f0:.15g} <= 0: the Delsarte bound is undefined")
    ctol = tol * max(1.0, max(abs(float(c)) for c in e.coefficients))
    diag = []
    for k, c in enumerate(e.coefficients):
        if float(c) < -ctol:
            diag.append(f"f_{k} = {float(c):.15g} < 0")
    if interval is not None:
        lo, hi = float(interval[0]), float(interval[1])
        pts = np.concatenate([np.linspace(lo, hi, ROOT_GRID + 1), real_roots(f, lo, hi, include_hi=True)])
    else:
        pts = np.asarray(list(T), dtype=float)
    vals = np.atleast_1d(f(pts))
    ftol = _root_tol(f, tol)
    for x, v in zip(pts, vals):
        if v > ftol:
            diag.append(f"f({x:.15g}) = {v:.15g} > 0 on the allowed set")
            break
    f1 = float(f(1.0))
    ok = not diag
    return DelsarteReport(f1 / f0 if ok else None, ok, f0, f1, tuple(e.coefficients), tuple(diag))


# --- design certificates -------------------------------------------------------------


class DesignKind(enum.Enum):
    F_DESIGN = "F_DESIGN"
    TAU_DESIGN = "TAU_DESIGN"
    HARMONIC_INDEX = "HARMONIC_INDEX"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DesignCertificate:
    kind: DesignKind
    passed: bool
    condition_1_residuals: dict
    condition_2_violations: tuple = ()
    consistency: Optional[dict] = None
    coefficients: tuple = ()
    inner_products: tuple = ()
    zeros: tuple = ()
    notes: tuple = field(default=())


def _coincident(P: SphericalConfiguration, tol=1e-9) -> bool:
    g = P.gram()
    i, j = cf.pair_indices(P.m)
    return bool(np.any(g[i, j] >= 1 - tol))


def certify_f_design(
    P: SphericalConfiguration,
    f: PolynomialInT,
    tol: float = 1e-9,
    mtol: float = MOMENT_TOL,
    ctol: float = cf.CLUSTER_TOL,
) -> DesignCertificate:
    """Check both f-design conditions and the identity ``f(1) = m f_0``.

    Condition 1: ``M_k(P) = 0`` (to ``mtol * m^2``) wherever ``f_k != 0``, k > 0.
    Condition 2: every distinct inner product of ``P`` is a zero of ``f``.
    Configurations with coincident points are rejected.
    """
    if not isinstance(f, PolynomialInT):
        f = PolynomialInT(f)
    m, n = P.m, P.dimension
    e = to_gegenbauer(f, n)
    big = max(abs(float(c)) for c in e.coefficients) or 1.0
    mv = moments(P, e.degree)
    residuals = {}
    passed = True
    for k in range(1, e.degree + 1):
        fk = float(e[k])
        if abs(fk) <= 1e-12 * big:
            continue
        residuals[k] = abs(fk * mv[k])
        if abs(mv[k]) > mtol * m * m:
            passed = False
    notes = []
    violations = []
    spec = cf.gram_spectrum(P, ctol) if m >= 2 else None
    D = spec.values if spec else ()
    if m >= 2 and _coincident(P):
        passed = False
        notes.append("coincident points: inner product 1 is outside [-1, 1)")
    ftol = _root_tol(f, tol)
    for d in D:
        v = float(f(d))
        if abs(v) > ftol:
            violations.append((d, v))
    if violations:
        passed = False
    f1 = float(f(1.0))
    mf0 = m * float(e[0])
    consistency = {
        "f_at_1": f1,
        "m_f0": mf0,
        "ok": abs(f1 - mf0) <= 1e-9 * max(1.0, abs(f1), abs(mf0)),
    }
    zeros = tuple(real_roots(f, candidates=D, tol=tol))
    return DesignCertificate(
        DesignKind.F_DESIGN, passed, residuals, tuple(violations), consistency,
        tuple(e.coefficients), tuple(D), zeros, tuple(notes),
    )


def _moment_certificate(P, ks, kind, mtol):
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise MajorsphereError("moment indices must be >= 1")
    mv = moments(P, ks[-1])
    res = {k: abs(mv[k]) / (P.m * P.m) for k in ks}
    return DesignCertificate(kind, all(v <= mtol for v in res.values()), res)


def certify_tau_design(P: SphericalConfiguration, tau: int, mtol: float = MOMENT_TOL) -> DesignCertificate:
    """``M_k(P) = 0`` for ``k = 1..tau``; residuals are ``|M_k| / m^2``."""
    if tau < 1:
        raise MajorsphereError("tau must be >= 1")
    return _moment_certificate(P, range(1, tau + 1), DesignKind.TAU_DESIGN, mtol)


def harmonic_index_check(P: SphericalConfiguration, K: Iterable[int], mtol: float = MOMENT_TOL) -> DesignCertificate:
    """Design of harmonic index ``K``: ``M_k(P) = 0`` for every ``k`` in ``K``."""
    return _moment_certificate(P, K, DesignKind.HARMONIC_INDEX, mtol)


# --- two-distance sets ---------------------------------------------------------------


@dataclass(frozen=True)
class TwoDistanceReport:
    m: int
    n: int
    inner_products: tuple
    is_two_distance: bool
    a: Optional[float] = None
    b: Optional[float] = None
    a_plus_b: Optional[float] = None
    a_plus_b_sign: Optional[int] = None
    is_equiangular: bool = False
    relative_bound: Optional[float] = None
    absolute_bound: Optional[int] = None
    meets_absolute: bool = False


def two_distance_analysis(P: SphericalConfiguration, cluster_tol: float = cf.CLUSTER_TOL, tol: float = 1e-9) -> TwoDistanceReport:
    """Two-distance structure and the relative/absolute cardinality bounds.

    ``a`` is the larger inner product.  The relative bound is reported for
    equiangular sets with ``n a^2 < 1``; the absolute bound ``n(n+1)/2``
    applies when ``a + b >= 0``.
    """
    m, n = P.m, P.dimension
    D = cf.gram_spectrum(P, cluster_tol).values if m >= 2 else ()
    if len(D) != 2:
        return TwoDistanceReport(m, n, tuple(D), False)
    a, b = D
    s = a + b
    sign = 0 if abs(s) <= tol else (1 if s > 0 else -1)
    equi = sign == 0
    rel = None
    if equi and n * a * a < 1:
        rel = n * (1 - a * a) / (1 - n * a * a)
    absolute = n * (n + 1) // 2 if sign >= 0 else None
    meets = absolute is not None and m == absolute
    return TwoDistanceReport(m, n, tuple(D), True, a, b, s, sign, equi, rel, absolute, meets)


# --- annihilators and the M-set gap ---------------------------------------------------


def _snap(x: float, tol: float = 1e-12):
    q = Fraction(x).limit_denominator(1000)
    return q if abs(float(q) - x) <= tol else x


def build_annihilator(
    P: SphericalConfiguration, g: Optional[PolynomialInT] = None, cluster_tol: float = cf.CLUSTER_TOL
) -> PolynomialInT:
    """``g(t) * prod_{x in D(P)} (t - x)``.

    Inner products within 1e-12 of a fraction with denominator at most 1000
    are replaced by that fraction so that exact designs give exact products.
    """
    if g is None:
        g = PolynomialInT([1])
    D = cf.gram_spectrum(P, cluster_tol).values if P.m >= 2 else ()
    return g * PolynomialInT.from_roots(_snap(d) for d in D)


@dataclass(frozen=True)
class GapReport:
    G_f_of_Y: float
    G_f_formula: float
    S_f_of_Y: float
    order: MajorizationOrder
    dominated: bool
    within_tol: bool


def fdesign_mset_gap(
    P: SphericalConfiguration,
    f: PolynomialInT,
    Y: SphericalConfiguration,
    tol: float = 1e-9,
    certificate: Optional[DesignCertificate] = None,
) -> GapReport:
    """Gap ``G_f(Y) = sum_{i<j} -f(<y_i, y_j>)`` against an f-design ``P``.

    With all Gegenbauer coefficients of ``f`` non-negative the gap is at most
    zero, so ``P``'s all-zero profile under ``rho = -f(x . y)`` dominates ``Y``'s.
    """
    if not isinstance(f, PolynomialInT):
        f = PolynomialInT(f)
    if Y.m != P.m or Y.dimension != P.dimension:
        raise DimensionError(f"Y must match P: got (m={Y.m}, n={Y.dimension}) vs (m={P.m}, n={P.dimension})")
    cert = certificate or certify_f_design(P, f)
    if not cert.passed:
        raise HypothesisError("P is not an f-design for this f")
    big = max(abs(float(c)) for c in cert.coefficients) or 1.0
    neg = [k for k, c in enumerate(cert.coefficients) if float(c) < -1e-12 * big]
    if neg:
        raise HypothesisError(f"negative Gegenbauer coefficient(s) at k = {neg}; the gap bound needs f_k >= 0")
    m = Y.m
    gy = np.clip(Y.gram(), -1.0, 1.0)
    i, j = cf.pair_indices(m)
    rho = -np.atleast_1d(f(gy[i, j]))
    G = math.fsum(rho.tolist())
    S = pair_sum(Y, f)
    formula = (m * float(f(1.0)) - S) / 2
    if rho.size:
        order = compare(np.zeros(rho.size), rho)
    else:
        order = MajorizationOrder.EQUAL
    dominated = order in (MajorizationOrder.DOMINATES, MajorizationOrder.EQUAL)
    return GapReport(G, formula, S, order, dominated, G <= tol)
