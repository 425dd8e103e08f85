"""Cluster algebras of convex polygons.

A point assigns a field value to every segment x_{i,j} of a convex n-gon
(1 <= i < j <= n).  Valid points satisfy every Ptolemy relation

    x_{i,k} x_{j,l} = x_{i,j} x_{k,l} + x_{i,l} x_{j,k}      (i<j<k<l)

with edges nonzero ("boundary-coefficients" mode) or equal to one
("type-A" mode).  A point is deep when every triangulation of the
polygon contains a diagonal sent to zero; deepness is certified here by
exhaustive triangulation enumeration, never by trusting a formula.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import DeepLocusError
from .field import FieldContext, FieldValue, product

Segment = Tuple[int, int]

MODE_BOUNDARY = "boundary-coefficients"
MODE_TYPE_A = "type-A"

MAX_ENUMERATION_N = 14
DEFAULT_MAX_SEARCH = 10**7


class PolygonError(DeepLocusError):
    pass


class SizeOutOfRange(PolygonError):
    pass


class InvalidPoint(PolygonError):
    pass


class OddPolygon(PolygonError):
    pass


class ConditionViolated(PolygonError):
    pass


class ZeroEdge(PolygonError):
    pass


class NoDeepPoint(PolygonError):
    pass


class ZeroCutValue(PolygonError):
    pass


class NotADiagonal(PolygonError):
    pass


class SearchTooLarge(PolygonError):
    pass


class UnderdeterminedPoint(PolygonError):
    """Value propagation stalled; the seed does not determine the point."""


def seg(i: int, j: int) -> Segment:
    return (i, j) if i < j else (j, i)


def is_edge(s: Segment, n: int) -> bool:
    i, j = s
    return j == i + 1 or (i, j) == (1, n)


def polygon_edges(n: int) -> List[Segment]:
    return [(i, i + 1) for i in range(1, n)] + [(1, n)]


def polygon_segments(n: int) -> List[Segment]:
    return [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]


def polygon_diagonals(n: int) -> List[Segment]:
    return [s for s in polygon_segments(n) if not is_edge(s, n)]


def segments_cross(a: Segment, b: Segment) -> bool:
    i, j = a
    k, l = b
    return (i < k < j < l) or (k < i < l < j)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@dataclass(frozen=True)
class PolygonTriangulation:
    """A maximal set of pairwise non-crossing diagonals of an n-gon."""

    n: int
    diagonals: frozenset

    def __post_init__(self):
        if len(self.diagonals) != self.n - 3:
            raise SizeOutOfRange(
                f"a triangulation of an {self.n}-gon has {self.n - 3} diagonals"
            )
        for a, b in itertools.combinations(sorted(self.diagonals), 2):
            if segments_cross(a, b):
                raise PolygonError(f"diagonals {a} and {b} cross")

    def sorted_diagonals(self) -> List[Segment]:
        return sorted(self.diagonals)


def enumerate_triangulations(n: int) -> List[PolygonTriangulation]:
    """All triangulations of the n-gon in lexicographic order.

    Count is Catalan(n-2); capped at n <= 14 (desk scale).
    """
    if not (3 <= n <= MAX_ENUMERATION_N):
        raise SizeOutOfRange(f"n={n} outside [3, {MAX_ENUMERATION_N}]")

    def chords(vertices: Tuple[int, ...]) -> Iterable[frozenset]:
        if len(vertices) <= 3:
            yield frozenset()
            return
        first, last = vertices[0], vertices[-1]
        for t in range(1, len(vertices) - 1):
            apex = vertices[t]
            new = [s for s in (seg(first, apex), seg(apex, last)) if not is_edge(s, n)]
            for left in chords(vertices[: t + 1]):
                for right in chords(vertices[t:]):
                    yield left | right | frozenset(new)

    found = {d for d in chords(tuple(range(1, n + 1)))}
    tris = [PolygonTriangulation(n, d) for d in found]
    tris.sort(key=lambda t: tuple(sorted(t.diagonals)))
    assert len(tris) == catalan(n - 2)
    return tris


class PolygonPoint:
    """A total assignment of field values to the segments of an n-gon."""

    def __init__(self, n: int, mode: str, values: Mapping[Segment, FieldValue]):
        if n < 3:
            raise SizeOutOfRange("polygon needs at least 3 vertices")
        if mode not in (MODE_BOUNDARY, MODE_TYPE_A):
            raise PolygonError(f"unknown mode {mode!r}")
        expected = polygon_segments(n)
        missing = [s for s in expected if s not in values]
        if missing:
            raise PolygonError(f"missing values for segments {missing[:4]}")
        ctxs = {values[s].ctx for s in expected}
        if len(ctxs) != 1:
            raise PolygonError("segment values come from different field contexts")
        self.n = n
        self.mode = mode
        self.values: Dict[Segment, FieldValue] = {s: values[s] for s in expected}
        self.ctx: FieldContext = next(iter(ctxs))

    def value(self, i: int, j: int) -> FieldValue:
        return self.values[seg(i, j)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolygonPoint)
            and self.n == other.n
            and self.mode == other.mode
            and self.values == other.values
        )

    def __repr__(self) -> str:
        return f"PolygonPoint(n={self.n}, mode={self.mode!r})"

    def mode_violations(self) -> List[str]:
        out = []
        one = self.ctx.one()
        for e in polygon_edges(self.n):
            v = self.values[e]
            if self.mode == MODE_TYPE_A and v != one:
                out.append(f"edge {e} is {v}, expected 1")
            elif v.is_zero:
                out.append(f"edge {e} is zero")
        return out

    def is_valid(self) -> bool:
        if self.mode_violations():
            return False
        return all(r.is_zero for _, r in ptolemy_residuals(self))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "values": [
                {"i": i, "j": j, "value": str(self.values[(i, j)])}
                for (i, j) in polygon_segments(self.n)
            ],
        }

    @classmethod
    def from_json(cls, data: dict, ctx: FieldContext) -> "PolygonPoint":
        values = {
            seg(item["i"], item["j"]): ctx.parse(item["value"])
            for item in data["values"]
        }
        return cls(data["n"], data["mode"], values)


def ptolemy_residuals(p: PolygonPoint) -> List[Tuple[Tuple[int, int, int, int], FieldValue]]:
    """One residual x_ik*x_jl - x_ij*x_kl - x_il*x_jk per 4-subset of vertices."""
    out = []
    for i, j, k, l in itertools.combinations(range(1, p.n + 1), 4):
        r = (
            p.value(i, k) * p.value(j, l)
            - p.value(i, j) * p.value(k, l)
            - p.value(i, l) * p.value(j, k)
        )
        out.append(((i, j, k, l), r))
    return out


def is_deep_bruteforce(p: PolygonPoint) -> bool:
    """True iff every triangulation contains a zero diagonal (exhaustive)."""
    bad = p.mode_violations()
    if bad:
        raise InvalidPoint("; ".join(bad))
    for quad, r in ptolemy_residuals(p):
        if not r.is_zero:
            raise InvalidPoint(f"Ptolemy residual at {quad} is {r}")
    for tri in enumerate_triangulations(p.n):
        if not any(p.values[d].is_zero for d in tri.diagonals):
            return False
    return True


def _alternating_product(values: Mapping[Segment, FieldValue], cycle: List[Segment], ctx) -> FieldValue:
    # cycle lists the edges (1,2),(2,3),...,(n-1,n),(1,n); odd slots are the
    # numerator, starting with (1,2), and (1,n) lands in the denominator
    num = product(ctx, (values[e] for e in cycle[0::2]))
    den = product(ctx, (values[e] for e in cycle[1::2]))
    return num / den


def _edge_cycle(n: int) -> List[Segment]:
    return [(i, i + 1) for i in range(1, n)] + [(1, n)]


def deep_point_from_edges(
    n: int, edge_values: Mapping[Segment, FieldValue]
) -> PolygonPoint:
    """Extend nonzero edge values to the unique deep point, when one exists.

    Requires n even and the alternating product of the edge values around
    the polygon to equal (-1)**((n+2)/2); then diagonals with even index
    difference get 0 and the others are fixed sign-alternating ratios of
    edge runs.
    """
    if n % 2 == 1:
        raise OddPolygon(f"the {n}-gon has no deep points")
    edges = polygon_edges(n)
    missing = [e for e in edges if e not in edge_values]
    if missing:
        raise PolygonError(f"missing edge values {missing}")
    for e in edges:
        if edge_values[e].is_zero:
            raise ZeroEdge(f"edge {e} must be nonzero")
    ctx = edge_values[edges[0]].ctx
    sign = ctx.minus_one() ** ((n + 2) // 2)
    alt = _alternating_product(edge_values, _edge_cycle(n), ctx)
    if alt != sign:
        raise ConditionViolated(
            f"alternating edge product is {alt}, needed {sign}"
        )

    values: Dict[Segment, FieldValue] = {e: edge_values[e] for e in edges}
    for s in polygon_segments(n):
        if s in values:
            continue
        i, j = s
        if (j - i) % 2 == 0:
            values[s] = ctx.zero()
        else:
            num = product(ctx, (edge_values[(t, t + 1)] for t in range(i, j, 2)))
            den = product(ctx, (edge_values[(t, t + 1)] for t in range(i + 1, j - 1, 2)))
            values[s] = ctx.minus_one() ** ((j - i - 1) // 2) * num / den

    mode = MODE_TYPE_A if all(edge_values[e] == ctx.one() for e in edges) else MODE_BOUNDARY
    point = PolygonPoint(n, mode, values)
    bad = [q for q, r in ptolemy_residuals(point) if not r.is_zero]
    assert not bad, f"constructed point fails Ptolemy at {bad[:3]}"
    return point


def unique_deep_point_typeA(n_rank: int, ctx: FieldContext) -> PolygonPoint:
    """The unique deep point of the coefficient-free type-A rank n_rank algebra.

    Exists iff n_rank = 3 (mod 4), or n_rank = 1 (mod 4) in characteristic 2.
    """
    if n_rank < 1:
        raise SizeOutOfRange("rank must be positive")
    n = n_rank + 3
    if n % 2 == 1:
        raise NoDeepPoint(f"rank {n_rank}: polygon size {n} is odd")
    one = ctx.one()
    sign = ctx.minus_one() ** ((n + 2) // 2)
    if sign != one:
        raise NoDeepPoint(
            f"rank {n_rank}: needs 1 = (-1)^{(n + 2) // 2}, false in this field"
        )
    edge_values = {e: one for e in polygon_edges(n)}
    return deep_point_from_edges(n, edge_values)


def _propagate(
    n: int, values: Dict[Segment, FieldValue], ctx: FieldContext
) -> Dict[Segment, FieldValue]:
    """Fill unknown segment values using Ptolemy relations with a single
    unknown and a nonzero known cofactor.  Raises if propagation stalls."""
    quads = list(itertools.combinations(range(1, n + 1), 4))
    todo = {s for s in polygon_segments(n) if s not in values}
    progress = True
    while todo and progress:
        progress = False
        for i, j, k, l in quads:
            d1, d2 = seg(i, k), seg(j, l)
            sides = [seg(i, j), seg(k, l), seg(i, l), seg(j, k)]
            known = lambda s: s in values
            unknowns = [s for s in {d1, d2, *sides} if not known(s)]
            if len(unknowns) != 1:
                continue
            u = unknowns[0]
            if u == d1 and not values[d2].is_zero:
                values[u] = (
                    values[sides[0]] * values[sides[1]]
                    + values[sides[2]] * values[sides[3]]
                ) / values[d2]
            elif u == d2 and not values[d1].is_zero:
                values[u] = (
                    values[sides[0]] * values[sides[1]]
                    + values[sides[2]] * values[sides[3]]
                ) / values[d1]
            elif u in (sides[0], sides[1]) and not values[sides[1] if u == sides[0] else sides[0]].is_zero:
                other = sides[1] if u == sides[0] else sides[0]
                values[u] = (
                    values[d1] * values[d2] - values[sides[2]] * values[sides[3]]
                ) / values[other]
            elif u in (sides[2], sides[3]) and not values[sides[3] if u == sides[2] else sides[2]].is_zero:
                other = sides[3] if u == sides[2] else sides[2]
                values[u] = (
                    values[d1] * values[d2] - values[sides[0]] * values[sides[1]]
                ) / values[other]
            else:
                continue
            todo.discard(u)
            progress = True
    if todo:
        raise UnderdeterminedPoint(f"could not determine segments {sorted(todo)[:4]}")
    return values


def extend_from_triangulation(
    n: int,
    tri: PolygonTriangulation,
    diagonal_values: Mapping[Segment, FieldValue],
    edge_values: Mapping[Segment, FieldValue],
) -> PolygonPoint:
    """The unique point with the given values on a triangulation's diagonals
    (all nonzero) and on the edges; every other segment is derived."""
    ctx = next(iter(edge_values.values())).ctx
    values: Dict[Segment, FieldValue] = {}
    for e in polygon_edges(n):
        if edge_values[e].is_zero:
            raise ZeroEdge(f"edge {e} must be nonzero")
        values[e] = edge_values[e]
    for d in tri.diagonals:
        v = diagonal_values[d]
        if v.is_zero:
            raise ZeroCutValue(f"seed diagonal {d} must be nonzero")
        values[d] = v
    _propagate(n, values, ctx)
    one = ctx.one()
    mode = MODE_TYPE_A if all(values[e] == one for e in polygon_edges(n)) else MODE_BOUNDARY
    point = PolygonPoint(n, mode, values)
    if not point.is_valid():
        raise InvalidPoint("seed values are inconsistent with the Ptolemy relations")
    return point


def _relabel(p: PolygonPoint, hull: List[int]) -> PolygonPoint:
    """Restrict p to the convex hull of the listed vertices (given in cyclic
    order); vertex hull[t] becomes t+1."""
    m = len(hull)
    index = {v: t + 1 for t, v in enumerate(hull)}
    values = {}
    for a, b in itertools.combinations(hull, 2):
        values[seg(index[a], index[b])] = p.value(a, b)
    return PolygonPoint(m, MODE_BOUNDARY, values)


def cut_along_diagonal(p: PolygonPoint, d: Segment) -> Tuple[PolygonPoint, PolygonPoint]:
    """Split p along a nonzero diagonal (i,j) into its restrictions to the
    hulls {i..j} and {j..n,1..i}; the cut diagonal becomes a boundary edge
    of each half, keeping its value."""
    d = seg(*d)
    if is_edge(d, p.n) or d not in p.values:
        raise NotADiagonal(f"{d} is not a diagonal of the {p.n}-gon")
    if p.values[d].is_zero:
        raise ZeroCutValue(f"cannot cut along {d}: value is zero")
    if not p.is_valid():
        raise InvalidPoint("cut requires a valid variety point")
    i, j = d
    hull_a = list(range(i, j + 1))
    hull_b = list(range(j, p.n + 1)) + list(range(1, i + 1))
    return _relabel(p, hull_a), _relabel(p, hull_b)


def glue_cut_halves(
    pa: PolygonPoint, pb: PolygonPoint, n: int, d: Segment
) -> PolygonPoint:
    """Inverse of cut_along_diagonal(p, d) for a point p of the n-gon.

    The halves carry the cut value on their closing edges (1, m); segments
    crossing the reinstated diagonal are recovered through the Ptolemy
    relations, so the round trip is exact."""
    ma, mb = pa.n, pb.n
    if ma + mb - 2 != n:
        raise PolygonError(f"halves of sizes {ma},{mb} do not glue to an {n}-gon")
    i, j = seg(*d)
    if j - i != ma - 1:
        raise NotADiagonal(f"first half does not span the hull of {d}")
    cut_value = pa.values[(1, ma)]
    if cut_value != pb.values[(1, mb)]:
        raise PolygonError("halves are not gluable: cut edge values differ")
    if cut_value.is_zero:
        raise ZeroCutValue("cut edge value is zero")

    def wrap(v: int) -> int:
        return (v - 1) % n + 1

    values: Dict[Segment, FieldValue] = {}
    for a, b in itertools.combinations(range(1, ma + 1), 2):
        values[seg(wrap(i + a - 1), wrap(i + b - 1))] = pa.value(a, b)
    for a, b in itertools.combinations(range(1, mb + 1), 2):
        values[seg(wrap(j + a - 1), wrap(j + b - 1))] = pb.value(a, b)
    ctx = pa.ctx
    _propagate(n, values, ctx)
    one = ctx.one()
    mode = MODE_TYPE_A if all(values[e] == one for e in polygon_edges(n)) else MODE_BOUNDARY
    point = PolygonPoint(n, mode, values)
    if not point.is_valid():
        raise InvalidPoint("glued values are inconsistent")
    return point


def max_search_cap(override: Optional[int] = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("DEEPLOCUS_MAX_SEARCH")
    return int(env) if env else DEFAULT_MAX_SEARCH


def bruteforce_variety_scan(
    n: int,
    ctx: FieldContext,
    mode: str = MODE_TYPE_A,
    max_search: Optional[int] = None,
) -> List[Tuple[PolygonPoint, bool]]:
    """Enumerate every assignment over a prime field, keep the variety
    points, and classify each as deep or not.  Type-A mode fixes edges at 1;
    boundary mode ranges edges over nonzero values as well."""
    if ctx.kind != "prime-field":
        raise SearchTooLarge("exhaustive scans need a finite field")
    diagonals = polygon_diagonals(n)
    edges = polygon_edges(n)
    p = ctx.p
    if mode == MODE_TYPE_A:
        free_edge_count = 0
    else:
        free_edge_count = len(edges)
    size = p ** len(diagonals) * max(1, (p - 1) ** free_edge_count)
    cap = max_search_cap(max_search)
    if size > cap:
        raise SearchTooLarge(f"{size} assignments exceed the cap {cap}")

    one = ctx.one()
    all_elems = list(ctx.elements())
    nonzero = all_elems[1:]
    if mode == MODE_TYPE_A:
        edge_choices = [[one]] * len(edges)
    else:
        edge_choices = [nonzero] * len(edges)

    results: List[Tuple[PolygonPoint, bool]] = []
    for edge_vals in itertools.product(*edge_choices):
        base = dict(zip(edges, edge_vals))
        for diag_vals in itertools.product(all_elems, repeat=len(diagonals)):
            values = dict(base)
            values.update(zip(diagonals, diag_vals))
            point = PolygonPoint(n, mode, values)
            if not all(r.is_zero for _, r in ptolemy_residuals(point)):
                continue
            results.append((point, is_deep_bruteforce(point)))
    return results
