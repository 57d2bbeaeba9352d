"""Geometric types: construction, validation, file format, inversion, incidence.

A geometric type is a quadruple ``(n, {h_i, v_i}, rho, eps)``: ``n`` rectangles,
``h_i`` horizontal and ``v_k`` vertical sub-rectangle counts, a bijection
``rho`` from horizontal labels ``(i, j)`` onto vertical labels ``(k, l)`` and a
sign function ``eps`` on horizontal labels.  All indices are 1-based.

The interchange format (``GT v1``) is line oriented::

    GT v1
    n=2
    h=2,1
    v=2,1
    map (1,1)->(1,1) +1
    map (1,2)->(2,1) +1
    map (2,1)->(1,2) +1

``#`` starts a comment, blank lines are ignored.  Canonical serialization
sorts ``map`` lines by ``(i, j)`` and puts exactly one space before the sign.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import InvalidTypeError, ParseError

HLabel = tuple[int, int]
VLabel = tuple[int, int]
MapEntry = tuple[HLabel, VLabel, int]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[tuple[str, str], ...]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class GeometricType:
    """Immutable geometric type; ``maps`` is sorted by horizontal label.

    The constructor does not validate; use :func:`validate` on raw candidates
    and :meth:`build` / :func:`parse_geometric_type` for checked construction.
    """

    n: int
    h: tuple[int, ...]
    v: tuple[int, ...]
    maps: tuple[MapEntry, ...]

    _rho: dict = field(init=False, repr=False, compare=False, hash=False)
    _eps: dict = field(init=False, repr=False, compare=False, hash=False)
    _rho_inv: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(sorted(self.maps)))
        rho = {hl: vl for hl, vl, _ in self.maps}
        eps = {hl: s for hl, _, s in self.maps}
        rho_inv = {vl: hl for hl, vl, _ in self.maps}
        object.__setattr__(self, "_rho", rho)
        object.__setattr__(self, "_eps", eps)
        object.__setattr__(self, "_rho_inv", rho_inv)

    @classmethod
    def build(
        cls,
        n: int,
        h: tuple[int, ...],
        v: tuple[int, ...],
        rho: Mapping[HLabel, VLabel],
        eps: Mapping[HLabel, int],
    ) -> "GeometricType":
        maps = tuple((hl, rho[hl], eps[hl]) for hl in sorted(rho))
        T = cls(n, tuple(h), tuple(v), maps)
        report = validate(T)
        if not report.ok:
            raise InvalidTypeError(report)
        return T

    # -- accessors ---------------------------------------------------------

    def rho(self, i: int, j: int) -> VLabel:
        return self._rho[(i, j)]

    def eps(self, i: int, j: int) -> int:
        return self._eps[(i, j)]

    def xi(self, i: int, j: int) -> int:
        return self._rho[(i, j)][0]

    def nu(self, i: int, j: int) -> int:
        return self._rho[(i, j)][1]

    def rho_inv(self, k: int, l: int) -> HLabel:
        return self._rho_inv[(k, l)]

    def theta(self, i: int, e: int) -> int:
        """Index of the extreme horizontal sub-rectangle on side ``e``."""
        return 1 if e == -1 else self.h[i - 1]

    @property
    def alpha(self) -> int:
        return sum(self.h)

    def hlabels(self) -> Iterator[HLabel]:
        for i in range(1, self.n + 1):
            for j in range(1, self.h[i - 1] + 1):
                yield (i, j)

    def vlabels(self) -> Iterator[VLabel]:
        for k in range(1, self.n + 1):
            for l in range(1, self.v[k - 1] + 1):
                yield (k, l)

    def stripes(self) -> Iterator[HLabel]:
        """Consecutive pairs ``(i, j), (i, j+1)`` indexed by the lower label."""
        for i in range(1, self.n + 1):
            for j in range(1, self.h[i - 1]):
                yield (i, j)


def validate(T: GeometricType) -> ValidationReport:
    """Check the geometric-type invariants on a raw candidate."""
    bad: list[tuple[str, str]] = []
    if T.n < 1:
        bad.append(("n-positive", f"n={T.n} is not positive"))
    if len(T.h) != T.n or len(T.v) != T.n:
        bad.append(("counts-length", f"need {T.n} entries in h and v"))
        return ValidationReport(False, tuple(bad))
    for name, seq in (("h", T.h), ("v", T.v)):
        for idx, value in enumerate(seq, start=1):
            if value < 1:
                bad.append((f"{name}-positive", f"{name}_{idx}={value} is not positive"))
    if sum(T.h) != sum(T.v):
        bad.append(("sum-mismatch", f"sum mismatch {sum(T.h)}≠{sum(T.v)}"))
    hset = set()
    if not bad:
        hset = {(i, j) for i in range(1, T.n + 1) for j in range(1, T.h[i - 1] + 1)}
        vset = {(k, l) for k in range(1, T.n + 1) for l in range(1, T.v[k - 1] + 1)}
        domain = [hl for hl, _, _ in T.maps]
        if len(set(domain)) != len(domain):
            bad.append(("rho-domain", "duplicate map line for a horizontal label"))
        extra = set(domain) - hset
        if extra:
            bad.append(("rho-domain", f"labels outside H(T): {sorted(extra)}"))
        missing = hset - set(domain)
        if missing:
            bad.append(("rho-not-total", f"rho not total, missing {sorted(missing)}"))
        images = [vl for _, vl, _ in T.maps]
        outside = set(images) - vset
        if outside:
            bad.append(("rho-range", f"images outside V(T): {sorted(outside)}"))
        if len(set(images)) != len(images):
            seen: dict[VLabel, HLabel] = {}
            for hl, vl, _ in T.maps:
                if vl in seen:
                    bad.append(
                        ("rho-not-injective", f"rho not injective: {seen[vl]} and {hl} both map to {vl}")
                    )
                seen[vl] = hl
    for hl, _, s in T.maps:
        if s not in (1, -1):
            bad.append(("eps-sign", f"eps{hl}={s} not in {{+1,-1}}"))
    return ValidationReport(not bad, tuple(bad))


def require_valid(T: GeometricType) -> None:
    report = validate(T)
    if not report.ok:
        raise InvalidTypeError(report)


def invert(T: GeometricType) -> GeometricType:
    """The inverse type ``(n, {v_i, h_i}, rho^-1, eps o rho^-1)``."""
    maps = tuple((vl, hl, s) for hl, vl, s in T.maps)
    return GeometricType(T.n, T.v, T.h, maps)


class IncidenceMatrix:
    """Square non-negative integer matrix with arbitrary-precision entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        self.rows = tuple(tuple(int(x) for x in row) for row in rows)
        self.n = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise ValueError("incidence matrix must be square")
            if any(x < 0 for x in row):
                raise ValueError("incidence matrix entries must be non-negative")

    def __eq__(self, other) -> bool:
        return isinstance(other, IncidenceMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IncidenceMatrix({[list(r) for r in self.rows]})"

    def entry(self, i: int, k: int) -> int:
        """1-based entry a_{ik}."""
        return self.rows[i - 1][k - 1]

    def mul(self, other: "IncidenceMatrix") -> "IncidenceMatrix":
        n = self.n
        o = other.rows
        return IncidenceMatrix(
            tuple(
                tuple(sum(self.rows[i][t] * o[t][k] for t in range(n)) for k in range(n))
                for i in range(n)
            )
        )

    def power(self, m: int) -> "IncidenceMatrix":
        if m < 0:
            raise ValueError("negative power")
        result = IncidenceMatrix(
            tuple(tuple(1 if i == k else 0 for k in range(self.n)) for i in range(self.n))
        )
        base = self
        while m:
            if m & 1:
                result = result.mul(base)
            base = base.mul(base)
            m >>= 1
        return result

    def transpose(self) -> "IncidenceMatrix":
        return IncidenceMatrix(tuple(zip(*self.rows)))

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.rows)

    def col_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.rows))

    def total(self) -> int:
        return sum(self.row_sums())

    def is_binary(self) -> bool:
        return all(x in (0, 1) for row in self.rows for x in row)

    def is_positive(self) -> bool:
        return all(x > 0 for row in self.rows for x in row)


def incidence_matrix(T: GeometricType) -> IncidenceMatrix:
    """``a_{ik}`` counts horizontal sub-rectangles of ``R_i`` sent into ``R_k``."""
    require_valid(T)
    rows = [[0] * T.n for _ in range(T.n)]
    for (i, _j), (k, _l), _s in T.maps:
        rows[i - 1][k - 1] += 1
    return IncidenceMatrix(rows)


# -- file format -----------------------------------------------------------

_MAP_RE = re.compile(
    r"^map \((\d+),(\d+)\)->\((\d+),(\d+)\) (\+1|-1)$"
)


def serialize(T: GeometricType) -> str:
    """Canonical text form; ``parse_geometric_type`` round-trips it exactly."""
    lines = ["GT v1", f"n={T.n}"]
    lines.append("h=" + ",".join(str(x) for x in T.h))
    lines.append("v=" + ",".join(str(x) for x in T.v))
    for (i, j), (k, l), s in T.maps:
        sign = "+1" if s == 1 else "-1"
        lines.append(f"map ({i},{j})->({k},{l}) {sign}")
    return "\n".join(lines) + "\n"


def _int_list(payload: str, what: str, lineno: int) -> tuple[int, ...]:
    parts = payload.split(",")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"expected comma-separated integers after {what}=", lineno)


def parse_geometric_type(text: str) -> GeometricType:
    """Parse the ``GT v1`` format and validate the result.

    Raises :class:`ParseError` on syntax errors and :class:`InvalidTypeError`
    (carrying the full report) on semantic ones.
    """
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    if not lines:
        raise ParseError("missing header 'GT v1'", 1)
    pos = 0

    def take(expected: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of input, expected {expected}",
                             lines[-1][0] if lines else 1)
        item = lines[pos]
        pos += 1
        return item

    lineno, header = take("header 'GT v1'")
    if header != "GT v1":
        raise ParseError("missing header 'GT v1'", lineno)
    lineno, nline = take("n=<int>")
    if not nline.startswith("n="):
        raise ParseError("expected n=<int>", lineno)
    try:
        n = int(nline[2:])
    except ValueError:
        raise ParseError("expected integer after n=", lineno)
    lineno, hline = take("h=<ints>")
    if not hline.startswith("h="):
        raise ParseError("expected h=<int>,<int>,...", lineno)
    h = _int_list(hline[2:], "h", lineno)
    lineno, vline = take("v=<ints>")
    if not vline.startswith("v="):
        raise ParseError("expected v=<int>,<int>,...", lineno)
    v = _int_list(vline[2:], "v", lineno)

    maps: list[MapEntry] = []
    while pos < len(lines):
        lineno, mline = take("map line")
        m = _MAP_RE.match(mline)
        if not m:
            raise ParseError(
                "expected 'map (<i>,<j>)->(<k>,<l>) <+1|-1>'", lineno
            )
        i, j, k, l = (int(m.group(t)) for t in range(1, 5))
        maps.append(((i, j), (k, l), 1 if m.group(5) == "+1" else -1))

    T = GeometricType(n, h, v, tuple(maps))
    report = validate(T)
    if not report.ok:
        raise InvalidTypeError(report)
    return T
