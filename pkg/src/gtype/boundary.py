"""Boundary-label dynamics, boundary codes, and the code relations.

Labels ``(i, e)`` name the horizontal boundary components of the rectangles:
``e = +1`` the top side, ``e = -1`` the bottom.  The generating function
``gamma`` pushes a component one step forward through the extreme horizontal
sub-rectangle on that side; ``upsilon`` is the same for the inverse type and
drives the vertical components.

Codes are bi-infinite, eventually periodic symbol sequences anchored at
position 0; that class is closed under everything done here, and every
decision below reduces to a finite window on it.

Code literals: ``[pre](cycle)^-|core|[pre](cycle)^+`` with comma-separated
symbols (bare digits allowed), core segment optional.  The left cycle tiles
positions below the left pre, which ends at position -1; the core starts at
position 0, followed by the right pre and the right cycle.  Example:
``(1)^-|1|(1)^+`` is the constant code at symbol 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import lcm
from typing import Iterator, Optional

from .algebra import has_double_boundary
from .core import GeometricType, IncidenceMatrix, incidence_matrix, invert, require_valid
from .errors import InconsistencyError, ParseError, PreconditionError

Label = tuple[int, int]


def gamma(T: GeometricType, lab: Label) -> Label:
    """One step of the horizontal-boundary dynamics."""
    i, e = lab
    if not (1 <= i <= T.n and e in (1, -1)):
        raise ValueError(f"not a boundary label: {lab}")
    j = T.theta(i, e)
    return (T.xi(i, j), e * T.eps(i, j))


def upsilon(T: GeometricType, lab: Label) -> Label:
    """Vertical-boundary dynamics; the horizontal dynamics of the inverse."""
    return gamma(invert(T), lab)


def all_labels(T: GeometricType) -> list[Label]:
    return [(i, e) for i in range(1, T.n + 1) for e in (-1, 1)]


def label_orbit(T: GeometricType, lab: Label, step=gamma) -> tuple[list[Label], list[Label]]:
    """``(tail, cycle)`` of the forward orbit; enters the cycle within 2n steps."""
    seen: dict[Label, int] = {}
    path: list[Label] = []
    cur = lab
    while cur not in seen:
        seen[cur] = len(path)
        path.append(cur)
        cur = step(T, cur)
    start = seen[cur]
    if start > 2 * T.n:
        raise InconsistencyError("boundary orbit tail exceeds 2n")
    return path[:start], path[start:]


# -- eventually periodic codes ------------------------------------------------


def _primitive(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[p:] + word[:p]:
            return word[:p]
    return word


@dataclass(frozen=True)
class Code:
    """Eventually periodic bi-infinite code in normal form.

    ``left_cycle`` tiles positions below ``-len(left_tail)`` (its last symbol
    sits immediately below the tail), ``left_tail`` covers ``[-len, -1]``,
    ``right_tail`` covers ``[0, len)``, and ``right_cycle`` tiles upward from
    ``len(right_tail)``.  Normalization makes cycles primitive and tails
    minimal, so semantic equality is structural equality.
    """

    left_cycle: tuple[int, ...]
    left_tail: tuple[int, ...]
    right_tail: tuple[int, ...]
    right_cycle: tuple[int, ...]

    def __post_init__(self):
        if not self.left_cycle or not self.right_cycle:
            raise ValueError("cycles must be nonempty")
        lc = _primitive(tuple(self.left_cycle))
        lt = tuple(self.left_tail)
        rt = tuple(self.right_tail)
        rc = _primitive(tuple(self.right_cycle))
        while rt and rt[-1] == rc[-1]:
            rc = rc[-1:] + rc[:-1]
            rt = rt[:-1]
        while lt and lt[0] == lc[0]:
            lc = lc[1:] + lc[:1]
            lt = lt[1:]
        object.__setattr__(self, "left_cycle", lc)
        object.__setattr__(self, "left_tail", lt)
        object.__setattr__(self, "right_tail", rt)
        object.__setattr__(self, "right_cycle", rc)

    @property
    def R0(self) -> int:
        """First position of the right-cyclic region."""
        return len(self.right_tail)

    @property
    def L0(self) -> int:
        """First position of the explicit window (left-cyclic below it)."""
        return -len(self.left_tail)

    def at(self, z: int) -> int:
        if z >= self.R0:
            return self.right_cycle[(z - self.R0) % len(self.right_cycle)]
        if z >= 0:
            return self.right_tail[z]
        if z >= self.L0:
            return self.left_tail[z - self.L0]
        return self.left_cycle[(z - self.L0) % len(self.left_cycle)]

    def window(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(self.at(z) for z in range(lo, hi))

    def shift(self, k: int) -> "Code":
        """The code ``z -> self[z + k]`` (``shift(1)`` moves symbols left)."""
        if k == 0:
            return self
        return Code.from_spans(
            self.left_cycle, self.window(self.L0, self.R0), self.L0 - k, self.right_cycle
        )

    def reverse(self) -> "Code":
        """The code ``z -> self[-z]``."""
        p, q = len(self.right_cycle), len(self.left_cycle)
        lo = -self.R0 - p
        hi = -self.L0 + q
        mid = tuple(self.at(-z) for z in range(lo, hi))
        lc = tuple(self.at(-(lo - p + t)) for t in range(p))
        rc = tuple(self.at(-(hi + t)) for t in range(q))
        return Code.from_spans(lc, mid, lo, rc)

    @property
    def is_periodic(self) -> bool:
        return (not self.left_tail and not self.right_tail
                and self.left_cycle == self.right_cycle)

    @property
    def period(self) -> int:
        if not self.is_periodic:
            raise ValueError("period of a non-periodic code")
        return len(self.right_cycle)

    @classmethod
    def from_spans(cls, left_cycle, mid, mid_start: int, right_cycle) -> "Code":
        """Code equal to ``mid`` on ``[mid_start, mid_start + len(mid))`` and
        tiled by the cycles outside (``left_cycle[-1]`` immediately below,
        ``right_cycle[0]`` immediately above)."""
        mid = tuple(mid)
        lc = tuple(left_cycle)
        rc = tuple(right_cycle)
        q, p = len(lc), len(rc)
        if mid_start > 0:
            pad = mid_start
            mid = tuple(lc[(t - pad) % q] for t in range(pad)) + mid
            rot = pad % q
            if rot:
                lc = lc[-rot:] + lc[:-rot]
            mid_start = 0
        end = mid_start + len(mid)
        if end < 0:
            pad = -end
            mid = mid + tuple(rc[t % p] for t in range(pad))
            rot = pad % p
            if rot:
                rc = rc[rot:] + rc[:rot]
        left_tail = mid[:-mid_start] if mid_start < 0 else ()
        right_tail = mid[-mid_start:] if mid_start < 0 else mid
        return cls(lc, left_tail, right_tail, rc)

    @classmethod
    def periodic(cls, word) -> "Code":
        """Periodic code with ``word[0]`` at position 0."""
        word = tuple(word)
        return cls(word, (), (), word)

    def __str__(self) -> str:
        return format_code(self)


def format_code(code: Code) -> str:
    def seg(word):
        return ",".join(str(s) for s in word)

    left = (f"[{seg(code.left_tail)}]" if code.left_tail else "") + f"({seg(code.left_cycle)})^-"
    right = (f"[{seg(code.right_tail)}]" if code.right_tail else "") + f"({seg(code.right_cycle)})^+"
    return f"{left}|{right}"


_LEFT_RE = re.compile(r"^(?:\[(?P<pre>[0-9,]*)\])?\((?P<cyc>[0-9,]+)\)\^-$")
_RIGHT_RE = re.compile(r"^(?:\[(?P<pre>[0-9,]*)\])?\((?P<cyc>[0-9,]+)\)\^\+$")


def _symbols(segment: str, source: str) -> tuple[int, ...]:
    segment = segment.strip()
    if not segment:
        return ()
    items = segment.split(",") if "," in segment else list(segment)
    try:
        out = tuple(int(s) for s in items)
    except ValueError:
        raise ParseError(f"bad symbols {segment!r} in code literal {source!r}")
    if any(s < 1 for s in out):
        raise ParseError(f"symbols must be positive in code literal {source!r}")
    return out


def parse_code(text: str) -> Code:
    """Parse ``[pre](cycle)^-|core|[pre](cycle)^+`` (core segment optional)."""
    raw = text.strip().replace(" ", "")
    parts = raw.split("|")
    if len(parts) == 2:
        left, core, right = parts[0], "", parts[1]
    elif len(parts) == 3:
        left, core, right = parts
    else:
        raise ParseError(f"code literal needs 2 or 3 '|'-segments: {text!r}")
    ml = _LEFT_RE.match(left)
    mr = _RIGHT_RE.match(right)
    if not ml:
        raise ParseError(f"bad left segment in code literal {text!r}")
    if not mr:
        raise ParseError(f"bad right segment in code literal {text!r}")
    lpre = _symbols(ml.group("pre") or "", text)
    lcyc = _symbols(ml.group("cyc"), text)
    core_syms = _symbols(core, text)
    rpre = _symbols(mr.group("pre") or "", text)
    rcyc = _symbols(mr.group("cyc"), text)
    mid = lpre + core_syms + rpre
    return Code.from_spans(lcyc, mid, -len(lpre), rcyc)


def admissible(A: IncidenceMatrix, code: Code) -> bool:
    """Every adjacent symbol pair must be a transition of ``A``."""
    lo = code.L0 - len(code.left_cycle) - 1
    hi = code.R0 + len(code.right_cycle) + 1
    return all(A.entry(code.at(z), code.at(z + 1)) >= 1 for z in range(lo, hi))


# -- boundary codes and the table ----------------------------------------------


def positive_code(T: GeometricType, lab: Label, step=gamma) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """One-sided code of ``lab`` as a normalized ``(pre, cycle)`` pair.

    Position ``t`` holds the rectangle index of ``step^t(lab)``; the symbol
    sequence may become periodic before the label orbit does.
    """
    tail, cycle = label_orbit(T, lab, step)
    pre = tuple(i for i, _e in tail)
    cyc = tuple(i for i, _e in cycle)
    while pre and pre[-1] == cyc[-1]:
        cyc = cyc[-1:] + cyc[:-1]
        pre = pre[:-1]
    return pre, _primitive(cyc)


def one_sided_equal(a, b) -> bool:
    """Equality of one-sided eventually periodic sequences ``(pre, cycle)``."""
    (pa, ca), (pb, cb) = a, b
    span = max(len(pa), len(pb)) + lcm(len(ca), len(cb))

    def sym(side, t):
        pre, cyc = side
        return pre[t] if t < len(pre) else cyc[(t - len(pre)) % len(cyc)]

    return all(sym(a, t) == sym(b, t) for t in range(span))


def periodization(T: GeometricType, lab: Label, step=gamma, reverse: bool = False) -> Code:
    """Bi-infinite periodic code of an on-cycle label.

    Forward: position ``z`` holds the rectangle of ``step^z(lab)``.  Reverse
    (vertical codes run backward in time): position ``-z`` holds it.
    """
    tail, cycle = label_orbit(T, lab, step)
    if tail:
        raise ValueError(f"label {lab} is not on a cycle")
    symbols = tuple(i for i, _e in cycle)
    if reverse:
        symbols = (symbols[0],) + tuple(reversed(symbols[1:]))
    return Code.periodic(symbols)


@dataclass(frozen=True)
class BoundaryCodeTable:
    i_plus: tuple[tuple[Label, tuple], ...]
    j_minus: tuple[tuple[Label, tuple], ...]
    gamma_orbits: tuple[tuple[Label, tuple], ...]
    upsilon_orbits: tuple[tuple[Label, tuple], ...]
    per_s: tuple[Code, ...]
    per_u: tuple[Code, ...]
    corner_codes: tuple[Code, ...]

    def i_plus_of(self, lab: Label):
        return dict(self.i_plus)[lab]

    def j_minus_of(self, lab: Label):
        return dict(self.j_minus)[lab]


def _table_preconditions(T: GeometricType) -> None:
    require_valid(T)
    if not incidence_matrix(T).is_binary():
        raise PreconditionError("boundary codes require a binary incidence matrix")
    if has_double_boundary(T):
        raise PreconditionError("boundary codes require no double boundaries")


def boundary_code_table(T: GeometricType) -> BoundaryCodeTable:
    _table_preconditions(T)
    Ti = invert(T)
    i_plus = tuple((lab, positive_code(T, lab)) for lab in all_labels(T))
    j_minus = tuple((lab, positive_code(Ti, lab)) for lab in all_labels(T))
    gamma_orbits = tuple(
        (lab, (tuple(t), tuple(c))) for lab in all_labels(T)
        for t, c in [label_orbit(T, lab)]
    )
    upsilon_orbits = tuple(
        (lab, (tuple(t), tuple(c))) for lab in all_labels(T)
        for t, c in [label_orbit(Ti, lab)]
    )
    per_s: set[Code] = set()
    per_u: set[Code] = set()
    for lab in all_labels(T):
        for phase_lab in label_orbit(T, lab)[1]:
            per_s.add(periodization(T, phase_lab))
        for phase_lab in label_orbit(Ti, lab)[1]:
            per_u.add(periodization(Ti, phase_lab, reverse=True))
    corner = per_s & per_u
    key = format_code
    return BoundaryCodeTable(
        i_plus, j_minus, gamma_orbits, upsilon_orbits,
        tuple(sorted(per_s, key=key)), tuple(sorted(per_u, key=key)),
        tuple(sorted(corner, key=key)),
    )


def has_corner_property(T: GeometricType) -> bool:
    """Every periodic boundary code is both horizontally and vertically periodic."""
    table = boundary_code_table(T)
    return set(table.per_s) == set(table.per_u)


# -- strata ---------------------------------------------------------------------


def _positive_part(code: Code, k: int):
    """One-sided sequence ``t -> code[k + t]`` as an (unnormalized) pre/cycle."""
    if k >= code.R0:
        q = len(code.right_cycle)
        r = (k - code.R0) % q
        return (), code.right_cycle[r:] + code.right_cycle[:r]
    return code.window(k, code.R0), code.right_cycle


def _matching_labels(codes, code: Code, k: int) -> list[Label]:
    side = _positive_part(code, k)
    return [lab for lab, target in codes if one_sided_equal(side, target)]


def _sigma_s_entry(T: GeometricType, code: Code, table: BoundaryCodeTable):
    """Least ``k`` whose positive part is a boundary code, if any.

    Membership is upward closed in ``k``, so checking one full period of the
    right-cyclic region decides it; the least ``k`` is found by descending
    until the match dies.  Periodic codes match at every shift and carry the
    sentinel ``("periodic", k)``.
    """
    q = len(code.right_cycle)
    hit = None
    for k in range(code.R0, code.R0 + q):
        if _matching_labels(table.i_plus, code, k):
            hit = k
            break
    if hit is None:
        return None
    if code.is_periodic:
        return ("periodic", hit)
    guard = (code.R0 - code.L0) + len(code.left_cycle) + 4 * T.n + 2 * q + 8
    k = hit
    while guard > 0:
        if not _matching_labels(table.i_plus, code, k - 1):
            return ("entry", k)
        k -= 1
        guard -= 1
    raise InconsistencyError("membership descent did not terminate")


def stratum(T: GeometricType, code: Code) -> str:
    """One of ``s-leaf``, ``u-leaf``, ``both``, ``interior``."""
    _table_preconditions(T)
    if not admissible(incidence_matrix(T), code):
        raise PreconditionError("code is not admissible for this type")
    in_s = _sigma_s_entry(T, code, boundary_code_table(T)) is not None
    Ti = invert(T)
    in_u = _sigma_s_entry(Ti, code.reverse(), boundary_code_table(Ti)) is not None
    if in_s and in_u:
        return "both"
    if in_s:
        return "s-leaf"
    if in_u:
        return "u-leaf"
    return "interior"


# -- the stable relation ---------------------------------------------------------


@dataclass(frozen=True)
class RelationResult:
    related: bool
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.related


def _stripe_flank_labels(T: GeometricType, i: int, j: int) -> tuple[Label, Label]:
    """Boundary labels receiving the two flanks of stripe ``(i,j),(i,j+1)``."""
    return ((T.xi(i, j), T.eps(i, j)), (T.xi(i, j + 1), -T.eps(i, j + 1)))


def periodic_s_pairings(T: GeometricType) -> list[tuple]:
    """Stable pairing witnesses between periodic boundary codes.

    One witness per stripe and per step ``t`` in one period of the paired
    label orbit, recorded once both labels reach their cycles: witnesses at
    ``t`` and ``t + period`` pair the same codes and are the same germ.
    """
    _table_preconditions(T)
    out = []
    for i, j in T.stripes():
        la, lb = _stripe_flank_labels(T, i, j)
        tail_a, cyc_a = label_orbit(T, la)
        tail_b, cyc_b = label_orbit(T, lb)
        t_star = max(len(tail_a), len(tail_b))
        p = lcm(len(cyc_a), len(cyc_b))
        a, b = la, lb
        for _ in range(t_star):
            a, b = gamma(T, a), gamma(T, b)
        for t in range(t_star, t_star + p):
            out.append(((i, j), t, periodization(T, a), periodization(T, b)))
            a, b = gamma(T, a), gamma(T, b)
    return out


def periodic_u_pairings(T: GeometricType) -> list[tuple]:
    return [(stripe, t, a.reverse(), b.reverse())
            for stripe, t, a, b in periodic_s_pairings(invert(T))]


def _transition(T: GeometricType, code: Code, table: BoundaryCodeTable):
    """``(kappa, labels)`` for a non-periodic s-leaf code: the unique position
    with ``sigma^kappa`` off the boundary codes and ``sigma^(kappa+1)`` on
    them, plus the label(s) presenting the entered code."""
    entry = _sigma_s_entry(T, code, table)
    if entry is None or entry[0] == "periodic":
        return None
    k_min = entry[1]
    labels = _matching_labels(table.i_plus, code, k_min)
    return k_min - 1, labels


def _s_partners(T: GeometricType, code: Code, table: BoundaryCodeTable) -> list[tuple[Code, tuple]]:
    """Stable partners of a non-periodic s-leaf code (unique when the
    boundary codes are pairwise distinct), with stripe witnesses."""
    data = _transition(T, code, table)
    if data is None:
        return []
    kappa, labels = data
    i = code.at(kappa)
    out = []
    for (tgt, e_w) in labels:
        js = [j for j in range(1, T.h[i - 1] + 1) if T.xi(i, j) == tgt]
        if len(js) != 1:
            raise InconsistencyError("binary matrix should give a unique sub-rectangle")
        j = js[0]
        if T.eps(i, j) == e_w and j + 1 <= T.h[i - 1]:
            stripe = (i, j)
            lab_v = (T.xi(i, j + 1), -T.eps(i, j + 1))
        elif T.eps(i, j) == -e_w and j - 1 >= 1:
            stripe = (i, j - 1)
            lab_v = (T.xi(i, j - 1), T.eps(i, j - 1))
        else:
            raise InconsistencyError("transition does not border a stripe")
        pre, cyc = positive_code(T, lab_v)
        lo = min(code.L0, kappa)
        lc_len = len(code.left_cycle)
        lc = tuple(code.at(lo - lc_len + t) for t in range(lc_len))
        mid = code.window(lo, kappa + 1) + pre
        partner = Code.from_spans(lc, mid, lo, cyc)
        out.append((partner, (("kappa", kappa), ("rectangle", i), ("stripe", stripe))))
    seen = set()
    uniq = []
    for partner, wit in out:
        if partner not in seen:
            seen.add(partner)
            uniq.append((partner, wit))
    return uniq


def s_related(T: GeometricType, w: Code, v: Code) -> RelationResult:
    """Decide the stable relation between two s-leaf codes."""
    _table_preconditions(T)
    table = boundary_code_table(T)
    if _sigma_s_entry(T, w, table) is None or _sigma_s_entry(T, v, table) is None:
        raise PreconditionError("s_related requires codes in the s-leaf stratum")
    if w == v:
        return RelationResult(True, (("reflexive", True),))
    if w.is_periodic != v.is_periodic:
        return RelationResult(False)
    if w.is_periodic:
        for stripe, t, a, b in periodic_s_pairings(T):
            if (a, b) in ((w, v), (v, w)):
                return RelationResult(True, (("stripe", stripe), ("t", t)))
        return RelationResult(False)
    for partner, wit in _s_partners(T, w, table):
        if partner == v:
            return RelationResult(True, wit)
    return RelationResult(False)


def u_related(T: GeometricType, w: Code, v: Code) -> RelationResult:
    """The vertical relation: the stable relation of the inverse on reversed codes."""
    return s_related(invert(T), w.reverse(), v.reverse())


def _t_moves(T, Ti, code: Code, table, table_i, per_s_pairs, per_u_pairs) -> Iterator[tuple[str, Code]]:
    if code.is_periodic:
        for _stripe, _t, a, b in per_s_pairs:
            if a == code and b != code:
                yield ("s", b)
            elif b == code and a != code:
                yield ("s", a)
        for _stripe, _t, a, b in per_u_pairs:
            if a == code and b != code:
                yield ("u", b)
            elif b == code and a != code:
                yield ("u", a)
        return
    if _sigma_s_entry(T, code, table) is not None:
        for partner, _w in _s_partners(T, code, table):
            yield ("s", partner)
    rev = code.reverse()
    if _sigma_s_entry(Ti, rev, table_i) is not None:
        for partner, _w in _s_partners(Ti, rev, table_i):
            yield ("u", partner.reverse())


def T_related(T: GeometricType, w: Code, v: Code) -> RelationResult:
    """Closure of the stable/vertical pairings; equality on interior codes."""
    _table_preconditions(T)
    A = incidence_matrix(T)
    for code in (w, v):
        if not admissible(A, code):
            raise PreconditionError("code is not admissible for this type")
    if w == v:
        return RelationResult(True, (("chain", ()),))
    if stratum(T, w) == "interior" or stratum(T, v) == "interior":
        return RelationResult(False)
    Ti = invert(T)
    table = boundary_code_table(T)
    table_i = boundary_code_table(Ti)
    periodic_world = w.is_periodic or v.is_periodic
    per_s_pairs = periodic_s_pairings(T) if periodic_world else []
    per_u_pairs = periodic_u_pairings(T) if periodic_world else []
    cap = 8 * T.n + 16
    seen: dict[Code, tuple] = {w: ()}
    frontier = [w]
    while frontier:
        nxt = []
        for cur in frontier:
            for rel, other in _t_moves(T, Ti, cur, table, table_i, per_s_pairs, per_u_pairs):
                if other in seen:
                    continue
                seen[other] = seen[cur] + ((rel, format_code(other)),)
                if other == v:
                    return RelationResult(True, (("chain", seen[other]),))
                nxt.append(other)
        frontier = nxt
        if len(seen) > cap:
            raise InconsistencyError("pairing closure exceeded the fiber bound")
    return RelationResult(False)
