"""Periodic cycles: enumeration up to a period bound, multipliers, taxonomy.

Periodic points of period p are the roots of the cleared-denominator
polynomial A_p(z) - z B_p(z) where f^p = A_p / B_p (plus possibly the
point at infinity, tested by direct orbit).  Exact periods are assigned
by snap-tolerance matching against the root sets of proper divisors —
never by polynomial deflation.  Classification follows the multiplier:
attracting / superattracting / repelling by modulus, parabolic when the
multiplier is a root of unity within a finite horizon (subclassified by
the sign of Re(nu)), and irrationally indifferent cycles stay
unresolved unless an arithmetic annotation (Brjuno / Liouville rotation
number) decides Siegel vs Cremer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernel import Polynomial, poly_roots
from .parabolic import (
    ParabolicInvariants,
    rotation_order,
    tangency_and_residu,
    UNITY_HORIZON,
    UNITY_TOL,
)
from .ratmap import RationalMap, SpherePoint, SNAP_TOL, _as_point

DEGREE_BUDGET = 5000

CLASS_ATTRACTING = "Attracting"
CLASS_SUPER = "SuperAttracting"
CLASS_REPELLING = "Repelling"
CLASS_PARABOLIC_ATTR = "ParabolicAttracting"
CLASS_PARABOLIC_REP = "ParabolicRepelling"
CLASS_SIEGEL = "SiegelDisc"
CLASS_CREMER = "Cremer"
CLASS_UNRESOLVED = "IndifferentUnresolved"

PARABOLIC_CLASSES = (CLASS_PARABOLIC_ATTR, CLASS_PARABOLIC_REP)


class CycleError(ValueError):
    pass


@dataclass
class Annotation:
    """Arithmetic or geometric side information that numerics cannot decide.

    kind: RotationNumberBrjuno | RotationNumberLiouville | HermanRing | LattesFlag
    cycle: index or point locating the annotated cycle (rotation kinds)
    period, annulus: Herman-ring data (invariant annulus [r_in, r_out])
    """

    kind: str
    cycle: object = None
    period: int = 0
    annulus: tuple = ()

    @classmethod
    def from_json(cls, obj):
        return cls(
            kind=obj["kind"],
            cycle=obj.get("cycle"),
            period=int(obj.get("period", 0)),
            annulus=tuple(obj.get("annulus", ())),
        )

    def matches_point(self, pt: SpherePoint):
        if self.cycle is None:
            return False
        if isinstance(self.cycle, (list, tuple)):
            return pt.close_to(SpherePoint(complex(self.cycle[0], self.cycle[1])))
        if self.cycle == "inf":
            return pt.is_infinity
        return False

    def to_json(self):
        out = {"kind": self.kind}
        if self.cycle is not None:
            out["cycle"] = self.cycle
        if self.period:
            out["period"] = self.period
        if self.annulus:
            out["annulus"] = list(self.annulus)
        return out


def load_annotations(obj):
    """Parse the annotations JSON object {"annotations": [...]}."""
    if obj is None:
        return []
    items = obj.get("annotations", obj) if isinstance(obj, dict) else obj
    return [Annotation.from_json(it) for it in items]


@dataclass
class Cycle:
    points: list  # ordered orbit of SpherePoints
    period: int
    multiplier: complex
    cls: str = ""
    parabolic: ParabolicInvariants | None = None

    def contains(self, pt, tol=SNAP_TOL):
        return any(q.close_to(_as_point(pt), tol) for q in self.points)

    def representative(self):
        """A finite cycle point when one exists (preferred chart for series work)."""
        for q in self.points:
            if not q.is_infinity and abs(q.value) <= 2.0:
                return q
        for q in self.points:
            if not q.is_infinity:
                return q
        return self.points[0]

    def sort_key(self):
        pt = self.points[0]
        if pt.is_infinity:
            return (self.period, 1, 0.0, 0.0)
        return (self.period, 0, round(pt.value.real, 9), round(pt.value.imag, 9))

    def to_json(self):
        out = {
            "period": self.period,
            "points": [p.to_json() for p in self.points],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "class": self.cls,
        }
        if self.parabolic is not None:
            out["parabolic"] = self.parabolic.to_json()
        return out


def _iterate_fraction(f: RationalMap, p):
    """(A, B) polynomials with f^p = A/B (uncancelled)."""
    if f.degree**p + 1 > DEGREE_BUDGET:
        raise CycleError(
            f"degree budget exceeded: {f.degree}^{p} + 1 > {DEGREE_BUDGET}"
        )
    return f.compose_self_homogeneous(p)


def periodic_points(f: RationalMap, p):
    """Finite solutions of f^p(z) = z as (point, multiplicity) pairs."""
    a, b = _iterate_fraction(f, p)
    poly = a - Polynomial([0.0, 1.0]) * b
    poly = poly.trimmed(1e-12)
    if poly.is_zero:
        raise CycleError(f"f^{p} is the identity; periodic points are not isolated")
    if poly.degree == 0:
        return []
    return [(SpherePoint(z), m) for z, m in poly_roots(poly)]


def _divisors(p):
    return [q for q in range(1, p) if p % q == 0]


def find_cycles(f: RationalMap, max_period, tol=SNAP_TOL):
    """All cycles of exact period <= max_period, sorted deterministically."""
    lower = {}  # period q -> list of points with f^q(z) = z
    cycles = []
    # the point at infinity, by direct orbit
    inf_period = None
    orb = f.orbit(SpherePoint.infinity(), max_period)
    for q in range(1, max_period + 1):
        if orb[q].is_infinity:
            inf_period = q
            break
    for p in range(1, max_period + 1):
        pts = periodic_points(f, p)
        lower[p] = [pt for pt, _ in pts]
        exact = []
        for pt, mult in pts:
            if any(pt.close_to(q, tol) for qq in _divisors(p) for q in lower[qq]):
                continue
            exact.append(pt)
        if inf_period == p:
            exact.append(SpherePoint.infinity())
        used = [False] * len(exact)
        for i, pt in enumerate(exact):
            if used[i]:
                continue
            used[i] = True
            orbit_pts = [pt]
            cur = pt
            for _ in range(p - 1):
                cur = f.evaluate(cur)
                for j, other in enumerate(exact):
                    if not used[j] and other.close_to(cur, max(tol, 1e-6)):
                        used[j] = True
                        cur = other
                        break
                orbit_pts.append(cur)
            lam = multiplier(f, orbit_pts)
            cycles.append(Cycle(points=orbit_pts, period=p, multiplier=lam))
    cycles.sort(key=Cycle.sort_key)
    return cycles


def multiplier(f: RationalMap, orbit_pts):
    """Product of chart-correct derivatives along the cycle."""
    lam = 1.0 + 0j
    for pt in orbit_pts:
        lam *= f.derivative_multiplier_chart(pt)
    return complex(lam)


def classify(cycle: Cycle, f: RationalMap, annotations=(), K=UNITY_HORIZON,
             tol=UNITY_TOL):
    """Fill in cycle.cls (and parabolic invariants when applicable)."""
    lam = cycle.multiplier
    mod = abs(lam)
    if mod <= tol:
        cycle.cls = CLASS_SUPER
        return cycle
    if mod < 1.0 - tol:
        cycle.cls = CLASS_ATTRACTING
        return cycle
    if mod > 1.0 + tol:
        cycle.cls = CLASS_REPELLING
        return cycle
    r = rotation_order(lam, K, tol)
    if r is not None:
        z0 = cycle.representative()
        inv = tangency_and_residu(f, z0, cycle.period, r)
        cycle.parabolic = inv
        if inv.nu.real <= 0:
            cycle.cls = CLASS_PARABOLIC_ATTR
        else:
            cycle.cls = CLASS_PARABOLIC_REP
        return cycle
    # irrationally indifferent: needs arithmetic annotation
    for ann in annotations:
        if ann.kind in ("RotationNumberBrjuno", "RotationNumberLiouville"):
            if _annotation_hits(ann, cycle):
                cycle.cls = (
                    CLASS_SIEGEL
                    if ann.kind == "RotationNumberBrjuno"
                    else CLASS_CREMER
                )
                return cycle
    cycle.cls = CLASS_UNRESOLVED
    return cycle


def _annotation_hits(ann: Annotation, cycle: Cycle):
    if ann.cycle is None:
        return True  # unanchored annotation applies to any undecided cycle
    if isinstance(ann.cycle, int):
        return False  # index-anchored annotations are resolved by the caller
    return any(ann.matches_point(pt) for pt in cycle.points)


def analyze_cycles(f: RationalMap, max_period, annotations=(), K=UNITY_HORIZON,
                   tol=UNITY_TOL):
    """find_cycles + classify, resolving index-anchored annotations by position."""
    cycles = find_cycles(f, max_period)
    for i, c in enumerate(cycles):
        resolved = [
            Annotation(kind=a.kind, cycle=None) if isinstance(a.cycle, int) else a
            for a in annotations
            if not isinstance(a.cycle, int) or a.cycle == i
        ]
        classify(c, f, resolved, K, tol)
    return cycles
