"""Exact-rational affine realization: the brute-force geometric oracle.

The concretization places every rectangle on the unit square.  Horizontal
band ``(i, j)`` is ``[0,1] x [(j-1)/h_i, j/h_i]``, vertical band ``(k, l)``
is ``[(l-1)/v_k, l/v_k] x [0,1]``, and the map on ``(i, j)`` is the affine
bijection of the two bands, reversing both axes when ``eps = -1`` so the
plane orientation is preserved.  All coordinates are ``fractions.Fraction``;
nothing in this module uses a tolerance.

Everything the combinatorial modules compute is re-derived here from
coordinates: iterated band structures come from interval pullbacks and
coordinate sorting, boundary components evolve by following band edges, and
the finite-genus/impasse patterns become interval-order tests.  The realizer
surface is built with a *gapped* variant of the bands (strictly disjoint
sub-bands of the same combinatorics) so that ribbon attachment intervals are
pairwise disjoint segments; the realizer is unique up to HV-homeomorphism,
so its Euler data does not depend on that choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebra import has_double_boundary, projected_alpha, size_budget
from .core import GeometricType, HLabel, require_valid
from .errors import BudgetExceeded, InconsistencyError, PreconditionError

Interval = tuple[Fraction, Fraction]
Component = tuple[int, int]
Word = tuple[HLabel, ...]


@dataclass(frozen=True)
class AffineMap:
    """``(x, y) -> (ax*x + bx, ay*y + by)`` with exact rational coefficients."""

    ax: Fraction
    bx: Fraction
    ay: Fraction
    by: Fraction

    def apply(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return self.ax * x + self.bx, self.ay * y + self.by

    def x_image(self, iv: Interval) -> Interval:
        a, b = self.ax * iv[0] + self.bx, self.ax * iv[1] + self.bx
        return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class AffineRealization:
    T: GeometricType
    h_bands: dict
    v_bands: dict
    maps: dict

    def band_map(self, i: int, j: int) -> AffineMap:
        return self.maps[(i, j)]


def _v_extent(T: GeometricType, k: int, l: int) -> Interval:
    vk = T.v[k - 1]
    return (Fraction(l - 1, vk), Fraction(l, vk))


def _h_extent(T: GeometricType, i: int, j: int) -> Interval:
    hi = T.h[i - 1]
    return (Fraction(j - 1, hi), Fraction(j, hi))


def affine_concretization(T: GeometricType) -> AffineRealization:
    """Uniform-band affine concretization; undefined on double boundaries."""
    require_valid(T)
    if has_double_boundary(T):
        raise PreconditionError(
            "affine concretization requires a type without double boundaries"
        )
    h_bands = {}
    v_bands = {}
    maps = {}
    for (i, j), (k, l), e in T.maps:
        h_bands[(i, j)] = _h_extent(T, i, j)
        v_bands[(k, l)] = _v_extent(T, k, l)
        vk, hi = T.v[k - 1], T.h[i - 1]
        if e == 1:
            m = AffineMap(Fraction(1, vk), Fraction(l - 1, vk), Fraction(hi), Fraction(-(j - 1)))
        else:
            m = AffineMap(Fraction(-1, vk), Fraction(l, vk), Fraction(-hi), Fraction(j))
        maps[(i, j)] = m
        lo, hi_y = h_bands[(i, j)]
        left, right = v_bands[(k, l)]
        corners = [m.apply(x, y) for x in (Fraction(0), Fraction(1)) for y in (lo, hi_y)]
        xs = sorted(p[0] for p in corners)
        ys = sorted(p[1] for p in corners)
        if (xs[0], xs[-1]) != (left, right) or (ys[0], ys[-1]) != (Fraction(0), Fraction(1)):
            raise InconsistencyError(f"band map for {(i, j)} misses its target band")
    return AffineRealization(T, h_bands, v_bands, maps)


# -- iterated band structure -------------------------------------------------


class _BandStructure:
    """Generation-``m`` horizontal bands and their images, from coordinates."""

    def __init__(self, T: GeometricType, m: int, budget: int | None = None):
        require_valid(T)
        if m < 1:
            raise ValueError("generation must be >= 1")
        limit = size_budget() if budget is None else budget
        projected = projected_alpha(T, m)
        if projected > limit:
            raise BudgetExceeded(projected, limit, m)
        self.T = T
        self.m = m
        # h_bands[i]: bottom-to-top list of (lo, hi, word), one per length-m word
        cur: dict[int, list[tuple[Fraction, Fraction, Word]]] = {
            i: [(*_h_extent(T, i, j), ((i, j),)) for j in range(1, T.h[i - 1] + 1)]
            for i in range(1, T.n + 1)
        }
        for _ in range(m - 1):
            nxt: dict[int, list] = {}
            for i in range(1, T.n + 1):
                rows: list[tuple[Fraction, Fraction, Word]] = []
                hi_count = T.h[i - 1]
                for j in range(1, hi_count + 1):
                    sub = cur[T.xi(i, j)]
                    if T.eps(i, j) == 1:
                        pulled = [
                            ((y0 + j - 1) / hi_count, (y1 + j - 1) / hi_count, ((i, j),) + w)
                            for (y0, y1, w) in sub
                        ]
                    else:
                        pulled = [
                            ((j - y1) / hi_count, (j - y0) / hi_count, ((i, j),) + w)
                            for (y0, y1, w) in reversed(sub)
                        ]
                    rows.extend(pulled)
                nxt[i] = rows
            cur = nxt
        self.h_bands = cur
        self._image_cache: dict[Word, tuple[int, Interval, int]] = {}
        # v_bands[k]: left-to-right list of (lo, hi, word, sign)
        self.v_bands: dict[int, list[tuple[Fraction, Fraction, Word, int]]] = {}
        per_square: dict[int, list] = {k: [] for k in range(1, T.n + 1)}
        for i in range(1, T.n + 1):
            for (_y0, _y1, w) in self.h_bands[i]:
                k, iv, sign = self.image(w)
                per_square[k].append((iv[0], iv[1], w, sign))
        for k, items in per_square.items():
            items.sort(key=lambda t: t[0])
            for (a, _b, _w, _s), (c, _d, _w2, _s2) in zip(items, items[1:]):
                if c < _b:
                    raise InconsistencyError("overlapping vertical band images")
            self.v_bands[k] = items
        self.v_index: dict[Word, tuple[int, int]] = {}
        self.v_extents: dict[int, list[Interval]] = {}
        for k, items in self.v_bands.items():
            self.v_extents[k] = [(a, b) for a, b, _w, _s in items]
            for l, (_a, _b, w, _s) in enumerate(items, start=1):
                self.v_index[w] = (k, l)

    def image(self, w: Word) -> tuple[int, Interval, int]:
        """Final square, x-extent, and sign of the composed map on band ``w``."""
        if w not in self._image_cache:
            T = self.T
            iv: Interval = (Fraction(0), Fraction(1))
            sign = 1
            k = w[0][0]
            for (i, j) in w:
                kk, l = T.rho(i, j)
                vk = T.v[kk - 1]
                e = T.eps(i, j)
                if e == 1:
                    iv = ((l - 1 + iv[0]) / vk, (l - 1 + iv[1]) / vk)
                else:
                    iv = ((l - iv[1]) / vk, (l - iv[0]) / vk)
                sign *= e
                k = kk
            self._image_cache[w] = (k, iv, sign)
        return self._image_cache[w]


def iterate_type(T: GeometricType, m: int, budget: int | None = None) -> GeometricType:
    """Geometric type of the ``m``-th iterate read off from exact coordinates."""
    if m == 1:
        require_valid(T)
        return T
    bs = _BandStructure(T, m, budget)
    h = tuple(len(bs.h_bands[i]) for i in range(1, T.n + 1))
    v = tuple(len(bs.v_bands[k]) for k in range(1, T.n + 1))
    maps = []
    for i in range(1, T.n + 1):
        for j, (_y0, _y1, w) in enumerate(bs.h_bands[i], start=1):
            k, _iv, sign = bs.image(w)
            maps.append(((i, j), bs.v_index[w], sign))
    out = GeometricType(T.n, h, v, tuple(maps))
    require_valid(out)
    return out


# -- ribbons and boundary-edge dynamics --------------------------------------


@dataclass(frozen=True)
class RibbonEnd:
    square: int
    side: int
    lo: Fraction
    hi: Fraction
    orientation: int


@dataclass(frozen=True)
class Ribbon:
    generation: int
    stripe: HLabel
    ends: tuple[RibbonEnd, RibbonEnd]


def _edge_step(T, comp: Component, iv: Interval, orient: int, v_extents) -> tuple[Component, Interval, int]:
    """One application of the map to an interval on a boundary component."""
    k, s = comp
    j = T.theta(k, s)
    k2, l = T.rho(k, j)
    e = T.eps(k, j)
    a, b = v_extents(k2, l)
    width = b - a
    if e == 1:
        out = (a + iv[0] * width, a + iv[1] * width)
    else:
        out = (b - iv[1] * width, b - iv[0] * width)
    return (k2, s * e), out, orient * e


def _ribbon(T: GeometricType, g: int, stripe: HLabel, v_extents) -> Ribbon:
    i, j = stripe
    ends = []
    for (lab, side0) in (((i, j), T.eps(i, j)), ((i, j + 1), -T.eps(i, j + 1))):
        k0, l0 = T.rho(*lab)
        comp: Component = (k0, side0)
        iv = v_extents(k0, l0)
        orient = T.eps(*lab)
        for _ in range(g - 1):
            comp, iv, orient = _edge_step(T, comp, iv, orient, v_extents)
        ends.append(RibbonEnd(comp[0], comp[1], iv[0], iv[1], orient))
    return Ribbon(g, stripe, (ends[0], ends[1]))


def _uniform_v_extents(T: GeometricType):
    return lambda k, l: _v_extent(T, k, l)


def ribbons(T: GeometricType, m: int, budget: int | None = None) -> list[Ribbon]:
    """All ribbons of generation ``g <= m``; count per generation is sum(h_i - 1)."""
    require_valid(T)
    if has_double_boundary(T):
        raise PreconditionError("ribbons require a type without double boundaries")
    limit = size_budget() if budget is None else budget
    projected = projected_alpha(T, m)
    if projected > limit:
        raise BudgetExceeded(projected, limit, m)
    ext = _uniform_v_extents(T)
    expected = sum(h - 1 for h in T.h)
    out = []
    for g in range(1, m + 1):
        this_gen = [_ribbon(T, g, stripe, ext) for stripe in T.stripes()]
        if len(this_gen) != expected:
            raise InconsistencyError("ribbon count per generation is off")
        out.extend(this_gen)
    return out


def geometric_impasse(T: GeometricType, m: int, budget: int | None = None):
    """A ribbon of some generation ``g <= m`` whose ends share a boundary side
    on horizontally adjacent generation-``g`` columns, with opposite arrival
    orientations."""
    require_valid(T)
    if has_double_boundary(T):
        raise PreconditionError("geometric impasse requires no double boundaries")
    ext = _uniform_v_extents(T)
    for g in range(1, m + 1):
        bs = _BandStructure(T, g, budget)
        for stripe in T.stripes():
            r = _ribbon(T, g, stripe, ext)
            e1, e2 = r.ends
            if (e1.square, e1.side) != (e2.square, e2.side):
                continue
            cols = bs.v_extents[e1.square]
            c1 = cols.index((e1.lo, e1.hi)) + 1
            c2 = cols.index((e2.lo, e2.hi)) + 1
            if abs(c1 - c2) == 1:
                if e1.orientation == e2.orientation:
                    raise InconsistencyError(
                        "same-side adjacent ribbon ends with equal orientations"
                    )
                return {
                    "generation": g,
                    "stripe": stripe,
                    "square": e1.square,
                    "side": e1.side,
                    "intervals": ((e1.lo, e1.hi), (e2.lo, e2.hi)),
                }
    return None


# -- geometric obstruction tests ---------------------------------------------


def _pair_end_data(bs: _BandStructure):
    """End data of every consecutive generation-``m`` band pair.

    Yields ``(pair_id, end_low, end_high)`` where an end is
    ``(component, extent, arrival)``; the component side and the arrival
    orientation come from the composed sign of the band map, the extent from
    exact coordinates.
    """
    for i in sorted(bs.h_bands):
        rows = bs.h_bands[i]
        for j in range(len(rows) - 1):
            wa = rows[j][2]
            wb = rows[j + 1][2]
            ka, iva, sa = bs.image(wa)
            kb, ivb, sb = bs.image(wb)
            yield ((i, j + 1), ((ka, sa), iva, sa), ((kb, -sb), ivb, sb))


def geometric_obstructions(T: GeometricType, m: int, budget: int | None = None) -> dict:
    """Interval-order tests for the three finite-genus obstruction patterns,
    applied to the generation-``m`` band structure."""
    require_valid(T)
    if has_double_boundary(T):
        raise PreconditionError("geometric obstructions require no double boundaries")
    bs = _BandStructure(T, m, budget)
    pairs = list(_pair_end_data(bs))

    # Catalog of ribbon ends per component, keyed for interval lookups.
    slots: dict[Component, list[tuple[Interval, tuple, tuple]]] = {}
    for pid, (ca, iva, _oa), (cb, ivb, _ob) in pairs:
        slots.setdefault(ca, []).append((iva, pid, (cb, ivb)))
        slots.setdefault(cb, []).append((ivb, pid, (ca, iva)))
    for comp in slots:
        slots[comp].sort(key=lambda t: t[0])

    report = {"type1": None, "type2": None, "type3": None}

    # type (1): both ends of one pair on a component, an interloper strictly
    # between them whose far end is outside the horizontal span on that square.
    for pid, (ca, iva, _oa), (cb, ivb, _ob) in pairs:
        if report["type1"] is not None:
            break
        if ca != cb:
            continue
        left, right = (iva, ivb) if iva <= ivb else (ivb, iva)
        span = (left[0], right[1])
        for (ivc, pid2, (cd, ivd)) in slots.get(ca, ()):
            if pid2 == pid:
                continue
            if not (left[1] <= ivc[0] and ivc[1] <= right[0]):
                continue
            if cd[0] == ca[0] and span[0] <= ivd[0] and ivd[1] <= span[1]:
                continue
            report["type1"] = {
                "component": ca, "pair": pid, "interloper": pid2,
                "span": span, "between": ivc,
            }
            break

    # type (2): two pairs spanning the same two distinct components of equal
    # side type with interleaved feet (equal interval order); all four end
    # bands distinct.
    buckets: dict[tuple[Component, Component], list] = {}
    for pid, (ca, iva, _oa), (cb, ivb, _ob) in pairs:
        if ca == cb or ca[1] * cb[1] != 1:
            continue
        (c1, i1), (c2, i2) = sorted([(ca, iva), (cb, ivb)], key=lambda t: t[0])
        buckets.setdefault((c1, c2), []).append((i1, i2, pid))
    for key in sorted(buckets):
        if report["type2"] is not None:
            break
        entries = sorted(buckets[key])

        def bands_ok(e, f):
            c1, c2 = key
            group = {(c1[0], e[0]), (c1[0], f[0]), (c2[0], e[1]), (c2[0], f[1])}
            return len(group) == 4

        hit = None
        for e, f in zip(entries, entries[1:]):
            if e[1] < f[1] and bands_ok(e, f):
                hit = (e, f)
                break
        if hit is None and any(e[1] < f[1] for e, f in zip(entries, entries[1:])):
            for a_idx, e in enumerate(entries):
                for f in entries[a_idx + 1:]:
                    if e[1] < f[1] and bands_ok(e, f):
                        hit = (e, f)
                        break
                if hit:
                    break
        if hit:
            report["type2"] = {
                "components": key,
                "pairs": (hit[0][2], hit[1][2]),
                "intervals": ((hit[0][0], hit[0][1]), (hit[1][0], hit[1][1])),
            }

    # type (3): components fixed by the m-step edge dynamics carry embryonic
    # separatrices left/right of the fixed band; two pairs attach three
    # pairwise distinct germs sharing the first one, every germ end arriving
    # against the germ direction, shared-germ feet ordered.
    ext = _uniform_v_extents(T)
    fixed: dict[Component, Interval] = {}
    for k in range(1, T.n + 1):
        for s in (-1, 1):
            comp: Component = (k, s)
            iv: Interval = (Fraction(0), Fraction(1))
            orient = 1
            c = comp
            for _ in range(m):
                c, iv, orient = _edge_step(T, c, iv, orient, ext)
            if c == comp:
                if orient != 1:
                    raise InconsistencyError("fixed side with reversed orientation")
                fixed[comp] = iv

    def germ_of(comp: Component, iv: Interval, arrival: int):
        if comp not in fixed:
            return None
        fl, fr = fixed[comp]
        if iv[1] <= fl:
            d = -1
        elif iv[0] >= fr:
            d = 1
        else:
            return None
        return (comp, d) if arrival == -d else None

    by_germ: dict[tuple, list] = {}
    for pid, enda, endb in pairs:
        for (end, other) in ((enda, endb), (endb, enda)):
            g = germ_of(*end)
            if g is None:
                continue
            og = germ_of(*other)
            if og is None:
                continue
            by_germ.setdefault(g, []).append((pid, end[1], og))
    for s1 in sorted(by_germ):
        if report["type3"] is not None:
            break
        members = [e for e in by_germ[s1] if e[2] != s1]
        for a_idx, a in enumerate(members):
            for b in members[a_idx + 1:]:
                if a[2] == b[2]:
                    continue
                for r, rp in ((a, b), (b, a)):
                    if r[2][0] == s1[0] or not r[1] < rp[1]:
                        continue
                    report["type3"] = {
                        "s1": s1, "s2": r[2], "s3": rp[2],
                        "pairs": (r[0], rp[0]),
                    }
                    break
                if report["type3"]:
                    break
            if report["type3"]:
                break
    return report


# -- realizer surface ---------------------------------------------------------


@dataclass(frozen=True)
class RealizerEuler:
    chi: int
    components: int
    boundary_circles: int
    genus: int


def _gapped_v_extents(T: GeometricType):
    def ext(k: int, l: int) -> Interval:
        vk = T.v[k - 1]
        w = Fraction(1, 2 * vk - 1)
        return ((2 * l - 2) * w, (2 * l - 1) * w)

    return ext


def realizer_euler(T: GeometricType, m: int, budget: int | None = None) -> RealizerEuler:
    """Euler characteristic, components, boundary circles, and genus of the
    ``m``-th realizer, built as squares plus attached ribbon strips."""
    require_valid(T)
    if has_double_boundary(T):
        raise PreconditionError("realizer requires a type without double boundaries")
    limit = size_budget() if budget is None else budget
    projected = projected_alpha(T, max(m, 1))
    if projected > limit:
        raise BudgetExceeded(projected, limit, m)
    ext = _gapped_v_extents(T)
    strips = []
    for g in range(1, m + 1):
        for stripe in T.stripes():
            strips.append(_ribbon(T, g, stripe, ext))

    n = T.n
    chi = n * (m + 1) - m * T.alpha

    # Surface components: squares linked by the strips they carry.
    parent = list(range(n + len(strips)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for sid, r in enumerate(strips):
        union(n + sid, r.ends[0].square - 1)
        union(n + sid, r.ends[1].square - 1)

    # Boundary graph: nodes on square perimeters, arcs between consecutive
    # nodes, covered arcs replaced by the two side edges of their strip.
    attach: dict[tuple[int, int], list] = {}
    for sid, r in enumerate(strips):
        for which, end in enumerate(r.ends):
            key = (end.square, end.side)
            attach.setdefault(key, []).append((end.lo, end.hi, sid, which, end.orientation))
    for key, items in attach.items():
        items.sort()
        for (a, b, *_), (c, d, *_2) in zip(items, items[1:]):
            if c < b:
                raise InconsistencyError("overlapping ribbon attachment intervals")

    nodes: dict[tuple, int] = {}

    def node(square: int, side_name: str, pos: Fraction) -> int:
        key = (square, side_name, pos)
        if key not in nodes:
            nodes[key] = len(nodes)
        return nodes[key]

    ZERO, ONE = Fraction(0), Fraction(1)
    edges: list[tuple[int, int, int]] = []  # (node_a, node_b, surface_cell)

    def corner(square: int, x: Fraction, y: Fraction) -> int:
        # Canonical corner naming keeps the four side lines glued correctly.
        return node(square, "corner", (x, y))

    strip_endpoint: dict[tuple[int, int, int], int] = {}
    for square in range(1, n + 1):
        for side, side_name, y in ((-1, "bottom", ZERO), (1, "top", ONE)):
            items = attach.get((square, side), [])
            cuts: list[tuple[Fraction, tuple | None]] = [(ZERO, None), (ONE, None)]
            marks: list[tuple[Fraction, Fraction, int, int, int]] = items
            pts = sorted({ZERO, ONE} | {p for (a, b, *_r) in marks for p in (a, b)})
            ids = {}
            for p in pts:
                if p in (ZERO, ONE):
                    ids[p] = corner(square, p, y)
                else:
                    ids[p] = node(square, side_name, p)
            covered = {}
            for (a, b, sid, which, orient) in marks:
                covered[(a, b)] = (sid, which, orient)
                strip_endpoint[(sid, which, 0)] = ids[a]
                strip_endpoint[(sid, which, 1)] = ids[b]
            for a, b in zip(pts, pts[1:]):
                if (a, b) not in covered:
                    edges.append((ids[a], ids[b], square - 1))
        left = (corner(square, ZERO, ZERO), corner(square, ZERO, ONE))
        right = (corner(square, ONE, ZERO), corner(square, ONE, ONE))
        edges.append((left[0], left[1], square - 1))
        edges.append((right[0], right[1], square - 1))

    for sid, r in enumerate(strips):
        # Side edge of the strip at strip-coordinate x=0 and x=1: connect the
        # matching endpoints of the two attachment intervals.
        for xcoord in (0, 1):
            pick = []
            for which, end in enumerate(r.ends):
                at = xcoord if end.orientation == 1 else 1 - xcoord
                pick.append(strip_endpoint[(sid, which, at)])
            edges.append((pick[0], pick[1], n + sid))

    # Every boundary node must have degree 2; circles are the graph's cycles.
    degree: dict[int, int] = {}
    for a, b, _cell in edges:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    if any(d != 2 for d in degree.values()):
        raise InconsistencyError("boundary graph is not a disjoint union of circles")

    bparent = list(range(len(nodes)))

    def bfind(a):
        while bparent[a] != a:
            bparent[a] = bparent[bparent[a]]
            a = bparent[a]
        return a

    for a, b, _cell in edges:
        ra, rb = bfind(a), bfind(b)
        if ra != rb:
            bparent[ra] = rb
    circles = len({bfind(a) for a in range(len(nodes))})

    # Independent chi: V - E + F over the explicit cell structure.  Faces are
    # the squares and the strips; covered arcs are strip edges already.
    v_count = len(nodes)
    e_count = len(edges) + sum(len(items) for items in attach.values())
    f_count = n + len(strips)
    chi_cells = v_count - e_count + f_count
    if chi_cells != chi:
        raise InconsistencyError(
            f"cell-complex chi {chi_cells} differs from n(m+1) - m*alpha = {chi}"
        )

    comp_of_cell = {cell: find(cell) for cell in range(n + len(strips))}
    components = len(set(comp_of_cell.values()))

    # chi and boundary circles per surface component.
    chi_per: dict[int, int] = {root: 0 for root in set(comp_of_cell.values())}
    for cell in range(n + len(strips)):
        root = find(cell)
        chi_per[root] += 1 if cell < n else -1
    circ_per: dict[int, set] = {root: set() for root in chi_per}
    for a, b, cell in edges:
        circ_per[find(cell)].add(bfind(a))
    genus_total = 0
    for root, chi_c in chi_per.items():
        b_c = len(circ_per[root])
        num = 2 - chi_c - b_c
        if num % 2 != 0 or num < 0:
            raise InconsistencyError(
                f"component has chi={chi_c}, boundary={b_c}: genus is not a"
                " non-negative integer"
            )
        genus_total += num // 2
    return RealizerEuler(chi, components, circles, genus_total)
