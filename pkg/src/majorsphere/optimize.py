"""Riesz energy minimization, M-set falsification search and the
three-point root problem on the circle."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import configurations as cf
from .configurations import DistanceFunctional, SphericalConfiguration
from .energy import riesz_energy
from .errors import MajorsphereError, ParameterRangeError
from .majorization import REL_TOL, MajorizationOrder, compare

COLLAPSE_TOL = 1e-12
THREADS_ENV = "MAJORSPHERE_THREADS"


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 10
    max_iterations: int = 20000
    gradient_tolerance: float = 1e-9
    initial_step: float = 0.1
    shrink: float = 0.5
    grow: float = 2.0
    sufficient_decrease: float = 1e-4
    rng_seed: int = 0
    workers: Optional[int] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise MajorsphereError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise MajorsphereError("max_iterations must be >= 1")
        if self.gradient_tolerance <= 0 or self.initial_step <= 0:
            raise MajorsphereError("tolerances and step sizes must be positive")
        if not 0 < self.shrink < 1 or not 0 < self.sufficient_decrease < 1:
            raise MajorsphereError("shrink and sufficient_decrease must lie in (0, 1)")

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        try:
            return max(1, int(os.environ.get(THREADS_ENV, "1")))
        except ValueError:
            return 1

    def stream(self, index: int) -> np.random.Generator:
        """Independent generator for restart/trial ``index``; fixed by the seed."""
        ss = np.random.SeedSequence(entropy=self.rng_seed & (2**64 - 1), spawn_key=(index,))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class MinimizationResult:
    configuration: SphericalConfiguration
    energy: float
    converged: bool
    final_gradient_norm: float
    restart_index: int
    iterations: int = 0
    restart_energies: tuple = ()


@dataclass(frozen=True)
class DescentTrace:
    points: np.ndarray
    energy: float
    converged: bool
    gradient_norm: float
    iterations: int
    history: tuple = field(default=(), repr=False)


def random_points(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """Uniform points on ``S^{n-1}`` from normalized Gaussian vectors."""
    P = rng.standard_normal((m, n))
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def energy_and_gradient(P: np.ndarray, t: float):
    """Riesz energy of rows of ``P`` and its ambient gradient."""
    diff = P[:, None, :] - P[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    m = P.shape[0]
    np.fill_diagonal(d2, 1.0)
    off = ~np.eye(m, dtype=bool)
    if t == 0:
        energy = -0.25 * np.sum(np.log(d2[off]))
        w = 1.0 / d2
    else:
        dt = d2 ** (-t / 2)
        energy = 0.5 * np.sum(dt[off])
        w = t * dt / d2
    np.fill_diagonal(w, 0.0)
    grad = -np.einsum("ij,ijk->ik", w, diff)
    return float(energy), grad


def project_tangent(P: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Remove from each row of ``G`` its component along the matching point."""
    return G - np.sum(G * P, axis=1, keepdims=True) * P


def _min_sq_distance(P: np.ndarray) -> float:
    diff = P[:, None, :] - P[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return float(d2.min())


def descend(P0: np.ndarray, t: float, cfg: OptimizerConfig, record: bool = False) -> DescentTrace:
    """Projected gradient descent with Armijo backtracking and renormalization.

    Each line search starts from a Barzilai-Borwein estimate of the step and
    backtracks by ``cfg.shrink`` until the sufficient-decrease test passes.
    Steps that collapse a pair below 1e-12 are rejected.  Once energy
    differences drop under rounding level a step is also accepted when it
    keeps the energy within 1e-13 relative and shrinks the gradient.
    """
    P = P0 / np.linalg.norm(P0, axis=1, keepdims=True)
    E, G = energy_and_gradient(P, t)
    pg = project_tangent(P, G)
    gn = float(np.linalg.norm(pg))
    step = cfg.initial_step
    history = [E] if record else []
    it = 0
    converged = gn < cfg.gradient_tolerance
    while not converged and it < cfg.max_iterations:
        it += 1
        accepted = False
        while step > 1e-300:
            Q = P - step * pg
            Q /= np.linalg.norm(Q, axis=1, keepdims=True)
            if _min_sq_distance(Q) < COLLAPSE_TOL**2:
                step *= cfg.shrink
                continue
            En, Gn = energy_and_gradient(Q, t)
            pgn = project_tangent(Q, Gn)
            gnn = float(np.linalg.norm(pgn))
            if En <= E - cfg.sufficient_decrease * step * gn * gn:
                accepted = True
            elif En - E <= 1e-13 * abs(E) and gnn < gn:
                accepted = True
            if accepted:
                # Barzilai-Borwein guess for the next trial step
                ds = (Q - P).ravel()
                dy = (pgn - pg).ravel()
                sy = float(ds @ dy)
                bb = float(ds @ ds) / sy if sy > 0 else step * cfg.grow
                step = min(max(bb, 1e-12), step * 1e6)
                P, E, pg, gn = Q, En, pgn, gnn
                break
            step *= cfg.shrink
        if record:
            history.append(E)
        if not accepted:
            break
        converged = gn < cfg.gradient_tolerance
    return DescentTrace(P, E, converged, gn, it, tuple(history))


def minimize_riesz(n: int, m: int, t: float, cfg: OptimizerConfig = OptimizerConfig()) -> MinimizationResult:
    """Best of ``cfg.restarts`` local minima of the Riesz ``t``-energy on ``S^{n-1}``.

    Each restart draws its start from its own seeded stream, so the result
    does not depend on how restarts are scheduled across workers.
    """
    if n < 2 or m < 2:
        raise ParameterRangeError("minimize_riesz needs n >= 2 and m >= 2")
    if t < 0:
        raise ParameterRangeError("Riesz exponent must be >= 0")

    def run(idx):
        return descend(random_points(cfg.stream(idx), m, n), t, cfg)

    workers = cfg.resolved_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(run, range(cfg.restarts)))
    else:
        traces = [run(i) for i in range(cfg.restarts)]

    energies = tuple(tr.energy for tr in traces)
    best = min(range(len(traces)), key=lambda i: (energies[i], i))
    tr = traces[best]
    X = SphericalConfiguration(tr.points, normalize=True)
    return MinimizationResult(
        configuration=X,
        energy=riesz_energy(X, t),
        converged=tr.converged,
        final_gradient_norm=tr.gradient_norm,
        restart_index=best,
        iterations=tr.iterations,
        restart_energies=energies,
    )


# --- falsification ----------------------------------------------------------


@dataclass(frozen=True)
class FalsificationResult:
    found: bool
    witness: Optional[SphericalConfiguration]
    witness_order: Optional[MajorizationOrder]
    trials_used: int
    best_margin: float = -math.inf


def _batch_prefix(Y: np.ndarray, rho: DistanceFunctional, iu) -> np.ndarray:
    d = Y[:, iu[0], :] - Y[:, iu[1], :]
    r2 = np.einsum("bpk,bpk->bp", d, d)
    vals = rho.from_distance(np.sqrt(r2), r2)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    return np.cumsum(np.sort(vals, axis=1), axis=1)


def _margin(prefix: np.ndarray, target: np.ndarray) -> np.ndarray:
    gap = prefix - target[None, :]
    gap = np.where(np.isnan(gap), -np.inf, gap)
    return gap.min(axis=1)


def mset_falsify(
    X: SphericalConfiguration,
    rho: DistanceFunctional,
    trials: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    refine_steps: int = 200,
    batch_size: int = 1000,
    tol: float = REL_TOL,
) -> FalsificationResult:
    """Search for a same-size configuration whose profile strictly dominates ``X``'s.

    Random starts are refined by hill-climbing the worst prefix-sum gap
    ``min_k [S_k(Y) - S_k(X)]`` with tangent moves of one point at a time,
    step sizes decaying geometrically from 1e-1 to 1e-4.  A candidate is only
    reported after :func:`majorsphere.majorization.compare` confirms strict
    domination, so a positive answer is always sound.
    """
    if trials < 1:
        raise MajorsphereError("trials must be >= 1")
    m, n = X.m, X.dimension
    if m < 2:
        raise MajorsphereError("falsification needs at least two points")
    target_seq = cf.distance_profile(X, rho)
    target = target_seq.prefix_sums()
    iu = cf.pair_indices(m)
    mags = 1e-1 * (1e-3) ** (np.arange(refine_steps) / max(refine_steps - 1, 1))
    best_margin = -math.inf

    for b, start in enumerate(range(0, trials, batch_size)):
        B = min(batch_size, trials - start)
        rng = cfg.stream(b)
        Y = rng.standard_normal((B, m, n))
        Y /= np.linalg.norm(Y, axis=2, keepdims=True)
        pre = _batch_prefix(Y, rho, iu)
        margin = _margin(pre, target)
        hit_step = np.full(B, -1)
        witnesses = {}

        def record(rows, step):
            for r in rows:
                if hit_step[r] < 0 and _confirm(Y[r], rho, target_seq, tol):
                    hit_step[r] = step
                    witnesses[int(r)] = Y[r].copy()

        record(np.nonzero(margin >= -_row_slack(pre, target, tol))[0], 0)
        rows = np.arange(B)
        for s, mag in enumerate(mags, start=1):
            active = rows[hit_step < 0]
            if active.size == 0:
                break
            k = rng.integers(0, m, size=active.size)
            u = rng.standard_normal((active.size, n))
            p = Y[active, k, :]
            u -= np.sum(u * p, axis=1, keepdims=True) * p
            un = np.linalg.norm(u, axis=1, keepdims=True)
            un[un == 0] = 1.0
            q = p + mag * u / un
            q /= np.linalg.norm(q, axis=1, keepdims=True)
            trial = Y[active].copy()
            trial[np.arange(active.size), k, :] = q
            tpre = _batch_prefix(trial, rho, iu)
            tmargin = _margin(tpre, target)
            better = tmargin > margin[active]
            upd = active[better]
            Y[upd] = trial[better]
            margin[upd] = tmargin[better]
            pre[upd] = tpre[better]
            cand = upd[margin[upd] >= -_row_slack(pre[upd], target, tol)]
            record(cand, s)

        best_margin = max(best_margin, float(margin.max()))
        found_rows = np.nonzero(hit_step >= 0)[0]
        if found_rows.size:
            r = int(found_rows[0])
            W = SphericalConfiguration(witnesses[r], normalize=True)
            order = compare(cf.distance_profile(W, rho), target_seq, tol)
            return FalsificationResult(True, W, order, start + r + 1, best_margin)
    return FalsificationResult(False, None, None, trials, best_margin)


def _row_slack(pre: np.ndarray, target: np.ndarray, tol: float) -> np.ndarray:
    scale = np.maximum(np.abs(pre).max(axis=1), np.abs(target).max())
    return np.maximum(tol * scale, 1e-12)


def _confirm(Y: np.ndarray, rho, target_seq, tol) -> bool:
    try:
        W = SphericalConfiguration(Y, normalize=True)
        prof = cf.distance_profile(W, rho)
    except MajorsphereError:
        return False
    return compare(prof, target_seq, tol) is MajorizationOrder.DOMINATES


# --- three points on the circle --------------------------------------------

S0 = math.log(9 / 4) / math.log(4 / 3)
S0_SNAP = 1e-4
BISECTION_INSET = 1e-9


def eq51_residual(t: float, s: float) -> float:
    """``(1-t)^z + 2^(z-1) (1-t^2)^z - (3/2)^(z+1)`` with ``z = s/2``."""
    z = s / 2.0
    return (1.0 - t) ** z + 2.0 ** (z - 1.0) * (1.0 - t * t) ** z - 1.5 ** (z + 1.0)


def solve_eq_5_1(s: float) -> float:
    """Second root ``t_s`` in ``(-1, -1/2)`` of the isosceles-triangle equation.

    ``t = -1/2`` is always a (double) root; the other root exists for
    ``s_0 <= s <= 4`` with ``s_0 = log_{4/3}(9/4)``.  The endpoints return
    ``-1`` and ``-1/2``.  Values of ``s`` within 1e-4 below ``s_0`` are
    treated as ``s_0`` so that a rounded ``s_0`` still hits the endpoint.
    """
    if not math.isfinite(s) or s < S0 - S0_SNAP or s > 4:
        raise ParameterRangeError(
            f"s={s!r} outside [s_0, 4] with s_0={S0:.6f}: for s <= s_0 only regular triangles "
            "are M-sets (no second root), for s >= 4 the root merges with t=-1/2"
        )
    if s <= S0:
        return -1.0
    if s == 4:
        return -0.5
    lo, hi = -1.0 + BISECTION_INSET, -0.5 - BISECTION_INSET
    if eq51_residual(lo, s) <= 0:
        lo = -1.0
    # g > 0 on [-1, t_s) and g < 0 on (t_s, -1/2); the sign at hi is not
    # evaluated since g vanishes to second order at -1/2
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = eq51_residual(mid, s)
        if g == 0 or hi - lo <= 4e-16:
            break
        if g > 0:
            lo = mid
        else:
            hi = mid
    return mid


@dataclass(frozen=True)
class TriangleClassification:
    case: int
    alpha_range: Optional[tuple]
    lower_open: bool = False
    t_s: Optional[float] = None

    def describe(self) -> str:
        if self.alpha_range is None:
            return "regular triangles only"
        lo, hi = self.alpha_range
        left = "(" if self.lower_open else "["
        return f"regular triangles and isosceles alpha, alpha, 2pi-2alpha with alpha in {left}{lo:.15g}, {hi:.15g}]"


def classify_triangle_msets(s: float) -> TriangleClassification:
    """Three-point M-sets on the circle for the functional ``r_s``, ``s > 0``."""
    if not s > 0:
        raise ParameterRangeError("classification needs s > 0")
    if s <= S0:
        return TriangleClassification(1, None)
    if s < 4:
        ts = solve_eq_5_1(s)
        return TriangleClassification(2, (math.acos(ts), math.pi), True, ts)
    return TriangleClassification(3, (2 * math.pi / 3, math.pi), False, -0.5)
