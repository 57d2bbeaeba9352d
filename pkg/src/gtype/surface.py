"""Sector classes, prong spectrum, Euler characteristic, and genus.

Each boundary periodic point of the underlying surface is seen here as the
closure class of its periodic codes under the stable/vertical pairings.  A
stable germ of a class is one pairing witness modulo the common period of
the paired codes (``gtype.boundary.periodic_s_pairings`` enumerates exactly
those); unstable germs mirror it through the inverse type.

Some separatrices of a point never touch the partition boundary.  Their
germs pair two sectors carrying the same code and leave no stripe witness,
so they are reconstructed from sector multiplicity: each sector contributes
its code once to the stable germ slots and once to the unstable ones, hence
``mult(w) = max(c_s(w), c_u(w))`` with the parity test ``c_s = c_u (mod 2)``
as a hard tripwire.  The prong count of a class is half its sector count.

The membership rule printed in the source material (``a = 1`` on corner
codes, ``2`` otherwise) undercounts codes that a rectangle meets at two
different corners, so it is kept only as a warning-level cross-check; the
germ count is normative, and it reproduces the corner case ``P = m/2`` and
the spine case.
"""

from __future__ import annotations

from dataclasses import dataclass

from .boundary import (
    Code,
    boundary_code_table,
    format_code,
    periodic_s_pairings,
    periodic_u_pairings,
)
from .core import GeometricType, incidence_matrix, require_valid
from .errors import InconsistencyError, PreconditionError
from .obstructions import is_pseudo_anosov_class


@dataclass(frozen=True)
class SectorClass:
    codes: tuple[Code, ...]
    s_germs: int
    u_germs: int
    multiplicities: tuple[tuple[Code, int], ...]
    a_values: tuple[tuple[Code, int], ...]
    prongs: int
    orbit_period: int
    warnings: tuple[str, ...]

    def code_set(self) -> frozenset[Code]:
        return frozenset(self.codes)


@dataclass(frozen=True)
class SurfaceReport:
    classes: tuple[SectorClass, ...]
    spectrum: tuple[tuple[int, int], ...]  # (prong count, number of orbits)
    chi: int
    genus: int
    warnings: tuple[str, ...]


def _require_surface_preconditions(T: GeometricType):
    require_valid(T)
    if not incidence_matrix(T).is_binary():
        raise PreconditionError("surface invariants require a binary incidence matrix")
    verdict = is_pseudo_anosov_class(T)
    if not verdict.in_class:
        raise PreconditionError(
            f"surface invariants require the pseudo-Anosov class; verdict was "
            f"{verdict.verdict} with reasons {[r for r, _ in verdict.reasons]}"
        )
    return verdict


def _closure_classes(codes, germ_pairs):
    parent = {c: c for c in codes}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for _side, _stripe, _t, a, b in germ_pairs:
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    groups: dict[Code, set[Code]] = {}
    for c in codes:
        groups.setdefault(find(c), set()).add(c)
    return list(groups.values())


def sector_classes(T: GeometricType) -> list[SectorClass]:
    """Partition the periodic boundary codes into point classes with germ data."""
    _require_surface_preconditions(T)
    table = boundary_code_table(T)
    per_b = sorted(set(table.per_s) | set(table.per_u), key=format_code)
    germs = [("s", stripe, t, a, b) for stripe, t, a, b in periodic_s_pairings(T)]
    germs += [("u", stripe, t, a, b) for stripe, t, a, b in periodic_u_pairings(T)]
    for _side, stripe, t, a, b in germs:
        if (a in set(per_b)) != (b in set(per_b)):
            raise InconsistencyError(f"germ at {stripe},{t} pairs a non-boundary code")
    classes = _closure_classes(per_b, germs)

    out = []
    for group in sorted(classes, key=lambda g: format_code(min(g, key=format_code))):
        c_s: dict[Code, int] = {c: 0 for c in group}
        c_u: dict[Code, int] = {c: 0 for c in group}
        found_s = found_u = 0
        for side, _stripe, _t, a, b in germs:
            if a not in c_s:
                continue
            counter = c_s if side == "s" else c_u
            counter[a] += 1
            counter[b] += 1
            if side == "s":
                found_s += 1
            else:
                found_u += 1
        warnings = []
        mult: dict[Code, int] = {}
        for c in group:
            if (c_s[c] - c_u[c]) % 2 != 0:
                raise InconsistencyError(
                    f"prong computation inconsistent: code {format_code(c)} has "
                    f"stable slot count {c_s[c]} vs unstable {c_u[c]} (parity)"
                )
            mult[c] = max(c_s[c], c_u[c])
            if mult[c] == 0:
                raise InconsistencyError(
                    f"code {format_code(c)} carries no germ at all"
                )
        total_slots = sum(mult.values())
        if total_slots % 2 != 0:
            raise InconsistencyError("prong computation inconsistent: odd sector count")
        prongs = total_slots // 2
        s_total = found_s + sum((mult[c] - c_s[c]) // 2 for c in group)
        u_total = found_u + sum((mult[c] - c_u[c]) // 2 for c in group)
        if s_total != u_total or s_total != prongs:
            raise InconsistencyError(
                f"prong computation inconsistent: {s_total} stable vs {u_total} "
                f"unstable germs for a {prongs}-prong class"
            )
        per_s_set, per_u_set = set(table.per_s), set(table.per_u)
        a_values = {}
        for c in group:
            a_values[c] = 1 if (c in per_s_set and c in per_u_set) else 2
            if a_values[c] != mult[c]:
                warnings.append(
                    f"membership rule gives a={a_values[c]} for {format_code(c)}"
                    f" but the sector multiplicity is {mult[c]}"
                )
        # Orbit of the class under the shift.
        group_f = frozenset(group)
        period = 1
        cur = frozenset(c.shift(1) for c in group_f)
        guard = 4 * len(per_b) * max(len(c.right_cycle) for c in group) + 4
        while cur != group_f:
            cur = frozenset(c.shift(1) for c in cur)
            period += 1
            guard -= 1
            if guard <= 0:
                raise InconsistencyError("class orbit period diverged")
        key = format_code
        out.append(
            SectorClass(
                codes=tuple(sorted(group, key=key)),
                s_germs=s_total,
                u_germs=u_total,
                multiplicities=tuple(sorted(((c, mult[c]) for c in group), key=lambda p: key(p[0]))),
                a_values=tuple(sorted(((c, a_values[c]) for c in group), key=lambda p: key(p[0]))),
                prongs=prongs,
                orbit_period=period,
                warnings=tuple(warnings),
            )
        )
    return out


def surface_report(T: GeometricType) -> SurfaceReport:
    classes = sector_classes(T)
    # Group classes into shift orbits for the spectrum.
    remaining = {cls.code_set(): cls for cls in classes}
    spectrum: dict[int, int] = {}
    seen: set[frozenset] = set()
    for cls in classes:
        key = cls.code_set()
        if key in seen:
            continue
        orbit = {key}
        cur = frozenset(c.shift(1) for c in key)
        while cur != key:
            if cur not in remaining:
                raise InconsistencyError("shift image of a class is not a class")
            orbit.add(cur)
            cur = frozenset(c.shift(1) for c in cur)
        seen |= orbit
        spectrum[cls.prongs] = spectrum.get(cls.prongs, 0) + 1
    total = sum(2 - cls.prongs for cls in classes)
    if total % 2 != 0:
        raise InconsistencyError("Euler-Poincare sum is odd")
    chi = total // 2
    if (2 - chi) % 2 != 0 or (2 - chi) // 2 < 0:
        raise InconsistencyError(f"chi={chi} yields a non-integer or negative genus")
    genus = (2 - chi) // 2
    warnings = tuple(w for cls in classes for w in cls.warnings)
    return SurfaceReport(
        classes=tuple(classes),
        spectrum=tuple(sorted(spectrum.items())),
        chi=chi,
        genus=genus,
        warnings=warnings,
    )


def prong_spectrum(T: GeometricType) -> tuple[tuple[int, int], ...]:
    return surface_report(T).spectrum


def euler_characteristic(T: GeometricType) -> int:
    return surface_report(T).chi


def genus(T: GeometricType) -> int:
    return surface_report(T).genus
