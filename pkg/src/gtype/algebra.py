"""Iteration of geometric types, mixing/double-boundary predicates, Perron root.

Powers of a type are built from step words: a horizontal sub-rectangle of
``T^m`` inside ``R_i`` is a chain of ``m`` horizontal labels linked by ``xi``.
The paper's calculus uses ``T^m`` without spelling out the construction, so
the ordering conventions live here and are cross-checked geometrically by
``gtype.oracle.iterate_type``:

* Horizontal words in ``R_i``, bottom to top: first step ``(i, j0)`` with
  ``j0`` ascending; within a block, by the ``T^(m-1)`` order of the remaining
  word, ascending when ``eps(i, j0) = +1`` and descending when ``-1`` (the
  image of the band preserves or reverses the vertical order exactly per the
  sign).
* Vertical words in ``R_k``, left to right: last step with ``nu(last)``
  ascending; within a block, by the ``T^(m-1)`` vertical order of the prefix,
  ascending when ``eps(last) = +1`` and descending otherwise.
* ``rho`` of a power maps a word to itself viewed as a vertical word; the
  sign of a word is the product of its step signs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .core import (
    GeometricType,
    HLabel,
    IncidenceMatrix,
    incidence_matrix,
    invert,
    require_valid,
)
from .errors import BudgetExceeded, PreconditionError

DEFAULT_BUDGET = 2_000_000

Word = tuple[HLabel, ...]

#: Number of word materializations performed, and the largest power built.
#: Used by the acceptance suite to prove the 6n bound is respected.
_instrumentation = {"max_power": 0, "calls": 0}


def instrumentation_snapshot() -> dict:
    return dict(_instrumentation)


def instrumentation_reset() -> None:
    _instrumentation["max_power"] = 0
    _instrumentation["calls"] = 0


def size_budget() -> int:
    raw = os.environ.get("GTYPE_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET


def projected_alpha(T: GeometricType, m: int) -> int:
    """``alpha(T^m)`` computed from incidence powers, without materializing."""
    return incidence_matrix(T).power(m).total()


def word_sign(T: GeometricType, word: Word) -> int:
    s = 1
    for i, j in word:
        s *= T.eps(i, j)
    return s


def _check_word(T: GeometricType, word: Word) -> None:
    for (i, j), (i2, _j2) in zip(word, word[1:]):
        if T.xi(i, j) != i2:
            raise ValueError(f"word does not chain through xi at {(i, j)}")


class _WordTables:
    """Ordered horizontal/vertical word lists for the powers of one type."""

    def __init__(self, T: GeometricType):
        self.T = T
        self._h: dict[tuple[int, int], list[Word]] = {}
        self._v: dict[tuple[int, int], list[Word]] = {}

    def h_words(self, m: int, i: int) -> list[Word]:
        key = (m, i)
        if key not in self._h:
            T = self.T
            if m == 1:
                out = [((i, j),) for j in range(1, T.h[i - 1] + 1)]
            else:
                out = []
                for j in range(1, T.h[i - 1] + 1):
                    block = [((i, j),) + w for w in self.h_words(m - 1, T.xi(i, j))]
                    if T.eps(i, j) == -1:
                        block.reverse()
                    out.extend(block)
            self._h[key] = out
        return self._h[key]

    def v_words(self, m: int, k: int) -> list[Word]:
        key = (m, k)
        if key not in self._v:
            T = self.T
            if m == 1:
                out = [(T.rho_inv(k, l),) for l in range(1, T.v[k - 1] + 1)]
            else:
                out = []
                for l in range(1, T.v[k - 1] + 1):
                    i2, j2 = T.rho_inv(k, l)
                    block = [w + ((i2, j2),) for w in self.v_words(m - 1, i2)]
                    if T.eps(i2, j2) == -1:
                        block.reverse()
                    out.extend(block)
            self._v[key] = out
        return self._v[key]


def power(T: GeometricType, m: int, budget: int | None = None) -> GeometricType:
    """The ``m``-th iterate of ``T`` as a geometric type."""
    require_valid(T)
    if m < 1:
        raise ValueError("power requires m >= 1")
    if m == 1:
        return T
    limit = size_budget() if budget is None else budget
    projected = projected_alpha(T, m)
    if projected > limit:
        raise BudgetExceeded(projected, limit, m)
    _instrumentation["calls"] += 1
    _instrumentation["max_power"] = max(_instrumentation["max_power"], m)

    tables = _WordTables(T)
    h = tuple(len(tables.h_words(m, i)) for i in range(1, T.n + 1))
    v = tuple(len(tables.v_words(m, k)) for k in range(1, T.n + 1))
    v_index: dict[Word, tuple[int, int]] = {}
    for k in range(1, T.n + 1):
        for l, w in enumerate(tables.v_words(m, k), start=1):
            v_index[w] = (k, l)
    maps = []
    for i in range(1, T.n + 1):
        for j, w in enumerate(tables.h_words(m, i), start=1):
            maps.append(((i, j), v_index[w], word_sign(T, w)))
    Tm = GeometricType(T.n, h, v, tuple(maps))
    require_valid(Tm)
    return Tm


@dataclass(frozen=True)
class MixingReport:
    binary: bool
    mixing: bool
    witness_exponent: int | None


def mixing_report(A: IncidenceMatrix) -> MixingReport:
    """Mixing decided by positivity of ``A^n``; witness is the least power."""
    binary = A.is_binary()
    if not A.power(A.n).is_positive():
        return MixingReport(binary, False, None)
    witness = A.n
    P = A
    for k in range(1, A.n + 1):
        if P.is_positive():
            witness = k
            break
        P = P.mul(A)
    return MixingReport(binary, True, witness)


def pattern_is_mixing(A: IncidenceMatrix) -> bool:
    """Exact mixing test: iterate the boolean positivity pattern to a cycle.

    This decides ``exists k: A^k > 0`` without the ``A^n`` shortcut and is the
    brute-force side of the acceptance check for the bound.
    """
    n = A.n
    base = tuple(tuple(1 if x > 0 else 0 for x in row) for row in A.rows)

    def bmul(X, Y):
        return tuple(
            tuple(1 if any(X[i][t] and Y[t][k] for t in range(n)) else 0 for k in range(n))
            for i in range(n)
        )

    seen = set()
    P = base
    while P not in seen:
        if all(all(row) for row in P):
            return True
        seen.add(P)
        P = bmul(P, base)
    return False


@dataclass(frozen=True)
class DoubleBoundaryReport:
    s_cycle: tuple[int, ...] | None
    u_cycle: tuple[int, ...] | None

    def __bool__(self) -> bool:
        return self.s_cycle is not None or self.u_cycle is not None


def _h1_cycle(T: GeometricType) -> tuple[int, ...] | None:
    """A cycle of rectangles all with a single horizontal sub-rectangle."""
    singles = {i for i in range(1, T.n + 1) if T.h[i - 1] == 1}
    succ = {i: T.xi(i, 1) for i in singles}
    for start in sorted(singles):
        path: list[int] = []
        seen_at: dict[int, int] = {}
        node = start
        while node in succ and node not in seen_at:
            seen_at[node] = len(path)
            path.append(node)
            node = succ[node]
        if node in seen_at:
            cyc = tuple(path[seen_at[node]:])
            shift = cyc.index(min(cyc))
            return cyc[shift:] + cyc[:shift]
    return None


def has_double_boundary(T: GeometricType) -> DoubleBoundaryReport | None:
    """Witness cycles with ``h = 1`` (s-side) or ``v = 1`` (u-side), if any."""
    require_valid(T)
    s_cycle = _h1_cycle(T)
    u_cycle = _h1_cycle(invert(T))
    if s_cycle is None and u_cycle is None:
        return None
    return DoubleBoundaryReport(s_cycle, u_cycle)


def perron_root(A: IncidenceMatrix, rel_tol: float = 1e-10, max_iter: int = 100000) -> float:
    """Spectral radius by power iteration with Collatz-Wielandt bracketing."""
    report = mixing_report(A)
    if not report.mixing:
        raise PreconditionError("perron_root requires a mixing matrix")
    n = A.n
    if n == 1:
        return float(A.rows[0][0])
    vec = [1.0] * n
    rows = A.rows
    lam = 0.0
    for _ in range(max_iter):
        nxt = [sum(rows[i][k] * vec[k] for k in range(n)) for i in range(n)]
        ratios = [nxt[i] / vec[i] for i in range(n) if vec[i] > 0]
        lo, hi = min(ratios), max(ratios)
        norm = max(nxt)
        vec = [x / norm for x in nxt]
        lam = (lo + hi) / 2
        if hi - lo <= rel_tol * hi:
            return lam
    if not math.isfinite(lam):
        raise ArithmeticError("power iteration diverged")
    return lam
