"""Weak majorization of real sequences.

``A`` majorizes ``B`` when every prefix sum of ``A`` sorted ascending is at
least the matching prefix sum of ``B`` sorted ascending.  For any convex
decreasing ``f`` this forces ``sum f(A) <= sum f(B)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .errors import DimensionError, DomainError, MajorsphereError

REL_TOL = 1e-9
ABS_FLOOR = 1e-12


class RealSequence:
    """Immutable finite sequence of reals with a cached ascending view."""

    __slots__ = ("_values", "_sorted", "_prefix")

    def __init__(self, values: Iterable[float]):
        arr = np.array(values, dtype=float).ravel()
        if arr.size < 1:
            raise MajorsphereError("a sequence needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise MajorsphereError("sequence values must be finite")
        arr.setflags(write=False)
        srt = np.sort(arr)
        srt.setflags(write=False)
        pre = np.cumsum(srt)
        pre.setflags(write=False)
        self._values = arr
        self._sorted = srt
        self._prefix = pre

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def length(self) -> int:
        return self._values.size

    def __len__(self):
        return self._values.size

    def __iter__(self):
        return iter(self._values.tolist())

    def __repr__(self):
        return f"RealSequence({self._values.tolist()!r})"

    def sorted_view(self) -> np.ndarray:
        return self._sorted

    def prefix_sums(self, k: int | None = None):
        """All ascending prefix sums, or the sum of the ``k`` smallest values."""
        if k is None:
            return self._prefix
        if not 1 <= k <= self.length:
            raise IndexError(f"k must be in 1..{self.length}, got {k}")
        return float(self._prefix[k - 1])


SequenceLike = Union[RealSequence, Iterable[float]]


def as_sequence(values: SequenceLike) -> RealSequence:
    if isinstance(values, RealSequence):
        return values
    return RealSequence(values)


class MajorizationOrder(enum.Enum):
    DOMINATES = "DOMINATES"
    DOMINATED = "DOMINATED"
    EQUAL = "EQUAL"
    INCOMPARABLE = "INCOMPARABLE"

    def __str__(self):
        return self.value


class ConstraintVector(RealSequence):
    """Non-decreasing bounds ``T_1 <= ... <= T_m`` on ascending prefix sums."""

    __slots__ = ()

    def __init__(self, values: Iterable[float], tol: float = REL_TOL):
        super().__init__(values)
        v = self.values
        slack = _slack(np.abs(v).max(), tol)
        bad = np.nonzero(np.diff(v) < -slack)[0]
        if bad.size:
            i = int(bad[0])
            raise MajorsphereError(
                f"constraint vector must be non-decreasing: T_{i + 1}={v[i]!r} > T_{i + 2}={v[i + 1]!r}"
            )

    def __repr__(self):
        return f"ConstraintVector({self.values.tolist()!r})"


def _slack(scale: float, tol: float) -> float:
    return max(tol * float(scale), ABS_FLOOR)


def _check_lengths(a: RealSequence, b: RealSequence):
    if a.length != b.length:
        raise DimensionError(f"sequence lengths differ: {a.length} vs {b.length}")


def compare(A: SequenceLike, B: SequenceLike, tol: float = REL_TOL) -> MajorizationOrder:
    """Order of ``A`` relative to ``B`` under weak majorization.

    Prefix sums are compared with slack ``tol * scale`` (absolute floor 1e-12),
    where ``scale`` is the largest absolute prefix sum of either sequence.
    Agreement of the sorted views is tested first so that identical profiles
    report EQUAL rather than DOMINATES.
    """
    if tol < 0:
        raise MajorsphereError("tol must be non-negative")
    a, b = as_sequence(A), as_sequence(B)
    _check_lengths(a, b)
    pa, pb = a.prefix_sums(), b.prefix_sums()
    slack = _slack(max(np.abs(pa).max(), np.abs(pb).max()), tol)
    if np.all(np.abs(a.sorted_view() - b.sorted_view()) <= slack):
        return MajorizationOrder.EQUAL
    ge = bool(np.all(pa >= pb - slack))
    le = bool(np.all(pa <= pb + slack))
    if ge and le:
        return MajorizationOrder.EQUAL
    if ge:
        return MajorizationOrder.DOMINATES
    if le:
        return MajorizationOrder.DOMINATED
    return MajorizationOrder.INCOMPARABLE


def extremal_sequence(T: SequenceLike) -> RealSequence:
    """The unique maximum ``Y(T)`` of all sequences whose prefix sums obey ``T``.

    ``y_i = min_{k >= i} (T_k - y_1 - ... - y_{i-1}) / (k - i + 1)`` and the
    last entry closes the total at ``T_m``.  Ties in the minimum are harmless:
    only the minimal value enters the recursion, never the index attaining it.
    """
    t = T if isinstance(T, ConstraintVector) else ConstraintVector(as_sequence(T).values)
    v = t.values
    m = v.size
    y = np.empty(m)
    acc = 0.0
    for i in range(m - 1):
        counts = np.arange(1, m - i + 1, dtype=float)
        y[i] = np.min((v[i:] - acc) / counts)
        acc += y[i]
    y[m - 1] = v[m - 1] - acc
    return RealSequence(y)


def is_in_constraint_set(A: SequenceLike, T: SequenceLike, tol: float = REL_TOL) -> bool:
    """True when every ascending prefix sum of ``A`` is at most ``T_i``."""
    a, t = as_sequence(A), as_sequence(T)
    _check_lengths(a, t)
    pa = a.prefix_sums()
    slack = _slack(max(np.abs(pa).max(), np.abs(t.values).max()), tol)
    return bool(np.all(pa <= t.values + slack))


@dataclass(frozen=True)
class KaramataReport:
    order: MajorizationOrder
    sum_a: float
    sum_b: float
    inequality_holds: bool


def karamata_check(
    A: SequenceLike,
    B: SequenceLike,
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = REL_TOL,
) -> KaramataReport:
    """Evaluate both sides of the majorization inequality for ``f``.

    ``f`` is normally an :class:`majorsphere.energy.PotentialFunction`; any
    callable with an optional ``contains(values)`` domain test also works.
    When ``A`` does not dominate ``B`` the inequality is vacuous and reported
    as holding.
    """
    a, b = as_sequence(A), as_sequence(B)
    _check_lengths(a, b)
    contains = getattr(f, "contains", None)
    if contains is not None:
        for name, seq in (("A", a), ("B", b)):
            inside = np.asarray(contains(seq.values))
            if not np.all(inside):
                bad = seq.values[~inside][0]
                raise DomainError(f"value {bad!r} of {name} lies outside the domain of f")
    fa = np.asarray(f(a.values), dtype=float)
    fb = np.asarray(f(b.values), dtype=float)
    sum_a = math.fsum(fa.tolist())
    sum_b = math.fsum(fb.tolist())
    order = compare(a, b, tol)
    holds = True
    if order in (MajorizationOrder.DOMINATES, MajorizationOrder.EQUAL):
        holds = sum_a <= sum_b + _slack(max(abs(sum_a), abs(sum_b)), tol)
    return KaramataReport(order, sum_a, sum_b, holds)


def parse_sequence(text: str) -> list[float]:
    """Parse a comma separated list such as ``1,3,4``."""
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise MajorsphereError(f"cannot parse sequence {text!r}: {exc}") from None
