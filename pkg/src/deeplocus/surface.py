"""Unpunctured marked surfaces as half-edge triangulations.

A surface is a set of oriented triangles (side ids listed
counterclockwise) plus a fixed-point-free involution gluing some sides
in orientation-reversing pairs; unglued sides form the boundary.  Arcs
are the glue-orbits of sides and stay stable under flips, so GF(2)
labels, values, and dissections can be transported along flip paths
recorded against a reference triangulation.

The deep machinery:

- a label class is a GF(2) assignment on arcs, 1 on the boundary, whose
  sum around every triangle is even (so each triangle has an odd number
  of label-0 sides);
- a polygonal dissection is a set of interior arcs whose complement is a
  spanning tree of the triangle adjacency graph; cutting along it opens
  the surface into a single polygon;
- a deep point is built by pushing nonzero values on boundary and
  dissection arcs through the polygon construction, provided the
  alternating product around the cut polygon equals (-1)**(b + m/2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import DeepLocusError
from .field import FieldContext, FieldValue
from .polygon import ConditionViolated, deep_point_from_edges, seg


class SurfaceError(DeepLocusError):
    pass


class InvalidPairing(SurfaceError):
    pass


class NonOrientableGluing(SurfaceError):
    pass


class DisconnectedResult(SurfaceError):
    pass


class UnmarkedSurface(SurfaceError):
    """The glued complex has no boundary marked points, so no triangulable
    marked surface (e.g. a closed torus)."""


class BoundaryArc(SurfaceError):
    pass


class NotADissection(SurfaceError):
    pass


class NoClass(SurfaceError):
    pass


class NonUnique(SurfaceError):
    pass


class InconsistentCocycle(SurfaceError):
    pass


class DifferentSurface(SurfaceError):
    pass


class OddMarkedPoints(SurfaceError):
    pass


class ZeroValue(SurfaceError):
    pass


class ValueUnderdetermined(SurfaceError):
    pass


class AvoidanceFailed(SurfaceError):
    pass


Triangle = Tuple[int, int, int]


class _Complex:
    """Raw half-edge combinatorics shared by surfaces and their cuttings."""

    def __init__(self, triangles: Sequence[Triangle], glue: Mapping[int, int]):
        self.triangles: Tuple[Triangle, ...] = tuple(tuple(t) for t in triangles)
        self.glue: Dict[int, int] = dict(glue)
        self.side_pos: Dict[int, Tuple[int, int]] = {}
        for t, tri in enumerate(self.triangles):
            if len(set(tri)) != 3:
                raise InvalidPairing(f"triangle {t} repeats a side id")
            for k, s in enumerate(tri):
                if s in self.side_pos:
                    raise InvalidPairing(f"side {s} used twice")
                self.side_pos[s] = (t, k)
        for a, b in self.glue.items():
            if a == b:
                raise NonOrientableGluing(f"side {a} glued to itself")
            if self.glue.get(b) != a:
                raise InvalidPairing(f"gluing of {a} and {b} is not involutive")
            if a not in self.side_pos or b not in self.side_pos:
                raise InvalidPairing(f"gluing touches unknown side {a} or {b}")
        self.sides = sorted(self.side_pos)
        self.boundary_sides = [s for s in self.sides if s not in self.glue]
        self._build_arcs()
        self._build_vertices()

    # -- arcs -------------------------------------------------------------

    def _build_arcs(self) -> None:
        self.arcs: List[Tuple[int, ...]] = []
        self.arc_of_side: Dict[int, int] = {}
        done = set()
        for s in self.sides:
            if s in done:
                continue
            orbit = (s, self.glue[s]) if s in self.glue else (s,)
            aid = len(self.arcs)
            self.arcs.append(tuple(sorted(orbit)))
            for x in orbit:
                self.arc_of_side[x] = aid
                done.add(x)

    def arc_is_boundary(self, aid: int) -> bool:
        return len(self.arcs[aid]) == 1

    def interior_arcs(self) -> List[int]:
        return [a for a in range(len(self.arcs)) if not self.arc_is_boundary(a)]

    def boundary_arcs(self) -> List[int]:
        return [a for a in range(len(self.arcs)) if self.arc_is_boundary(a)]

    # -- triangle navigation ------------------------------------------------

    def next_in_tri(self, s: int) -> int:
        t, k = self.side_pos[s]
        return self.triangles[t][(k + 1) % 3]

    def prev_in_tri(self, s: int) -> int:
        t, k = self.side_pos[s]
        return self.triangles[t][(k + 2) % 3]

    def tri_of_side(self, s: int) -> int:
        return self.side_pos[s][0]

    # -- vertices -----------------------------------------------------------

    def _build_vertices(self) -> None:
        # sides sharing a tail vertex form an orbit of s -> next(glue(s));
        # each orbit of a boundary vertex is a path ending at a boundary side
        def rot(s: int) -> Optional[int]:
            g = self.glue.get(s)
            return None if g is None else self.next_in_tri(g)

        starts = [s for s in self.sides if self.prev_in_tri(s) not in self.glue]
        self.vertex_of_side: Dict[int, int] = {}
        self.vertex_fans: List[List[int]] = []
        self.interior_vertices = 0
        for s0 in starts:
            fan = []
            s: Optional[int] = s0
            while s is not None:
                fan.append(s)
                self.vertex_of_side[s] = len(self.vertex_fans)
                s = rot(s)
            self.vertex_fans.append(fan)
        leftover = [s for s in self.sides if s not in self.vertex_of_side]
        while leftover:
            s0 = leftover[0]
            cycle = [s0]
            self.vertex_of_side[s0] = len(self.vertex_fans)
            s = rot(s0)
            while s != s0:
                cycle.append(s)
                self.vertex_of_side[s] = len(self.vertex_fans)
                s = rot(s)
            self.vertex_fans.append(cycle)
            self.interior_vertices += 1
            leftover = [x for x in leftover if x not in self.vertex_of_side]

    def tail_vertex(self, s: int) -> int:
        return self.vertex_of_side[s]

    def head_vertex(self, s: int) -> int:
        return self.vertex_of_side[self.next_in_tri(s)]

    # -- boundary and invariants ---------------------------------------------

    def boundary_components(self) -> List[List[int]]:
        # fans of boundary vertices end in their unique boundary side
        terminal = {}
        for fan in self.vertex_fans:
            last = fan[-1]
            if last not in self.glue:
                terminal[self.vertex_of_side[last]] = last
        succ = {}
        for s in self.boundary_sides:
            succ[s] = terminal[self.head_vertex(s)]
        comps = []
        todo = set(self.boundary_sides)
        while todo:
            s0 = min(todo)
            walk = [s0]
            todo.discard(s0)
            s = succ[s0]
            while s != s0:
                walk.append(s)
                todo.discard(s)
                s = succ[s]
            comps.append(walk)
        return comps

    def connected(self) -> bool:
        if not self.triangles:
            return False
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for s in self.triangles[t]:
                g = self.glue.get(s)
                if g is not None:
                    t2 = self.tri_of_side(g)
                    if t2 not in seen:
                        seen.add(t2)
                        stack.append(t2)
        return len(seen) == len(self.triangles)

    def counts(self) -> Tuple[int, int, int]:
        """(V, E, F) with E counting arcs."""
        return (len(self.vertex_fans), len(self.arcs), len(self.triangles))


class SurfaceTriangulation:
    """An unpunctured, connected, triangulated marked surface.

    Immutable; flips return a new triangulation sharing the reference and
    extending the flip path.  Arc ids are glue-orbits of side ids, hence
    identical across all flips of the same surface.
    """

    def __init__(
        self,
        triangles: Sequence[Triangle],
        glue: Mapping[int, int],
        reference: Optional["SurfaceTriangulation"] = None,
        flip_path: Tuple[int, ...] = (),
    ):
        self._c = _Complex(triangles, glue)
        if not self._c.connected():
            raise DisconnectedResult("triangle adjacency graph is disconnected")
        if not self._c.boundary_sides:
            raise UnmarkedSurface("no boundary, hence no marked points")
        if self._c.interior_vertices:
            raise UnmarkedSurface("gluing creates punctures (interior vertices)")
        self.reference = reference
        self.flip_path = tuple(flip_path)
        v, e, f = self._c.counts()
        b = len(self._c.boundary_components())
        chi = v - e + f
        if (2 - b - chi) % 2 != 0:
            raise SurfaceError("non-integral genus; gluing data is inconsistent")
        self.genus = (2 - b - chi) // 2
        self.num_boundary = b
        self.num_marked = v
        if self.genus < 0:
            raise NonOrientableGluing("negative genus; gluing is not orientable")
        if e != 6 * self.genus + 3 * b + 2 * v - 6:
            raise SurfaceError("arc count identity failed; not a triangulation")

    # -- delegation --------------------------------------------------------

    @property
    def triangles(self) -> Tuple[Triangle, ...]:
        return self._c.triangles

    @property
    def glue(self) -> Dict[int, int]:
        return self._c.glue

    @property
    def arcs(self) -> List[Tuple[int, ...]]:
        return self._c.arcs

    def arc_of_side(self, s: int) -> int:
        return self._c.arc_of_side[s]

    def interior_arcs(self) -> List[int]:
        return self._c.interior_arcs()

    def boundary_arcs(self) -> List[int]:
        return self._c.boundary_arcs()

    def arc_is_boundary(self, aid: int) -> bool:
        return self._c.arc_is_boundary(aid)

    def ref(self) -> "SurfaceTriangulation":
        return self.reference if self.reference is not None else self

    def invariants(self) -> Tuple[int, int, int, int]:
        """(genus, boundary components, marked points, arc count)."""
        return (self.genus, self.num_boundary, self.num_marked, len(self.arcs))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SurfaceTriangulation)
            and self.triangles == other.triangles
            and self.glue == other.glue
        )

    def __hash__(self) -> int:
        return hash((self.triangles, tuple(sorted(self.glue.items()))))

    def __repr__(self) -> str:
        g, b, m, e = self.invariants()
        return f"SurfaceTriangulation(g={g}, b={b}, m={m}, arcs={e})"

    # -- flips ----------------------------------------------------------------

    def flip_quad(self, aid: int) -> Tuple[int, int, int, int, int, int]:
        """(a1, p, q, a2, r, s): the flipped arc's sides and the cyclic
        quadrilateral sides around it."""
        arc = self.arcs[aid]
        if len(arc) == 1:
            raise BoundaryArc(f"arc {aid} is a boundary arc")
        a1, a2 = arc
        t1 = self.triangles[self._c.tri_of_side(a1)]
        t2 = self.triangles[self._c.tri_of_side(a2)]
        i1, i2 = t1.index(a1), t2.index(a2)
        p, q = t1[(i1 + 1) % 3], t1[(i1 + 2) % 3]
        r, s = t2[(i2 + 1) % 3], t2[(i2 + 2) % 3]
        return a1, p, q, a2, r, s

    def flip(self, aid: int) -> "SurfaceTriangulation":
        """Re-diagonalize the quadrilateral around an interior arc."""
        a1, p, q, a2, r, s = self.flip_quad(aid)
        replaced = {self._c.tri_of_side(a1): (a1, q, r), self._c.tri_of_side(a2): (a2, s, p)}
        new_triangles = [
            replaced.get(t, tri) for t, tri in enumerate(self.triangles)
        ]
        return SurfaceTriangulation(
            new_triangles,
            self.glue,
            reference=self.ref(),
            flip_path=self.flip_path + (aid,),
        )

    def replay(self) -> List["SurfaceTriangulation"]:
        """The chain reference -> ... -> self along the recorded flip path."""
        chain = [self.ref()]
        for aid in self.flip_path:
            chain.append(chain[-1].flip(aid))
        if chain[-1] != self:
            raise SurfaceError("flip path does not reproduce this triangulation")
        return chain


def build_from_gluing(
    polygon_sides: int, gluings: Sequence[Tuple[int, int]]
) -> SurfaceTriangulation:
    """Fan-triangulate a polygon and glue boundary side pairs.

    Polygon sides are 0..n-1 counterclockwise (side i joins vertex i to
    i+1); each gluing [a, b] identifies the sides reversing orientation,
    which keeps the quotient oriented.  The result is the reference
    triangulation of its surface.
    """
    n = polygon_sides
    if n < 3:
        raise SurfaceError("polygon needs at least 3 sides")
    glue: Dict[int, int] = {}
    # fan diagonals (0, i): lower half n+2(i-2) runs 0->i, upper runs i->0
    for i in range(2, n - 1):
        lo, hi = n + 2 * (i - 2), n + 2 * (i - 2) + 1
        glue[lo] = hi
        glue[hi] = lo
    triangles = []
    for t in range(1, n - 1):
        side_a = 0 if t == 1 else n + 2 * (t - 2)
        side_b = t
        side_c = n - 1 if t == n - 2 else n + 2 * (t - 1) + 1
        triangles.append((side_a, side_b, side_c))
    used = set()
    for pair in gluings:
        if len(pair) != 2:
            raise InvalidPairing(f"gluing {pair} is not a pair")
        a, b = pair
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidPairing(f"gluing {pair} outside polygon sides 0..{n - 1}")
        if a == b:
            raise NonOrientableGluing(f"side {a} glued to itself")
        if a in used or b in used:
            raise InvalidPairing(f"side in {pair} glued twice")
        used.update((a, b))
        glue[a] = b
        glue[b] = a
    return SurfaceTriangulation(triangles, glue)


def named_surface(name: str) -> SurfaceTriangulation:
    """Builders for the surfaces used throughout the examples and tests."""
    builders = {
        "disk4": lambda: build_from_gluing(4, []),
        "disk6": lambda: build_from_gluing(6, []),
        "annulus11": lambda: build_from_gluing(4, [(0, 2)]),
        "annulus21": lambda: build_from_gluing(5, [(0, 3)]),
        "annulus22": lambda: build_from_gluing(6, [(0, 3)]),
        "genus1": lambda: build_from_gluing(6, [(0, 2), (1, 3)]),
        "genus2": lambda: build_from_gluing(10, [(0, 2), (1, 3), (4, 6), (5, 7)]),
        "pants": lambda: build_from_gluing(10, [(0, 3), (5, 8)]),
    }
    if name not in builders:
        raise SurfaceError(f"unknown surface {name!r}; try {sorted(builders)}")
    return builders[name]()


# ---------------------------------------------------------------------------
# GF(2) label classes


@dataclass(frozen=True)
class Z2Class:
    """GF(2) labels on the arcs of a carrier triangulation: boundary arcs
    are 1 and the sum around every triangle is even."""

    carrier: SurfaceTriangulation
    labels: Tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.carrier.arcs):
            raise InconsistentCocycle("one label per arc required")
        for aid in self.carrier.boundary_arcs():
            if self.labels[aid] != 1:
                raise InconsistentCocycle(f"boundary arc {aid} must be labeled 1")
        for tri in self.carrier.triangles:
            total = sum(self.labels[self.carrier.arc_of_side(s)] for s in tri)
            if total % 2 != 0:
                raise InconsistentCocycle(f"triangle {tri} violates the cocycle rule")

    def label_of(self, aid: int) -> int:
        return self.labels[aid]

    def zero_arcs(self) -> FrozenSet[int]:
        return frozenset(a for a, v in enumerate(self.labels) if v == 0)


def solve_classes(t: SurfaceTriangulation) -> List[Z2Class]:
    """All label classes, by GF(2) elimination over the interior arcs.

    Count is 2^(2g+b-1) when the number of marked points is even, else 0.
    """
    interior = t.interior_arcs()
    col = {a: i for i, a in enumerate(interior)}
    nvars = len(interior)
    rows = []
    for tri in t.triangles:
        mask = 0
        rhs = 0
        for s in tri:
            a = t.arc_of_side(s)
            if a in col:
                mask ^= 1 << col[a]
            else:
                rhs ^= 1
        rows.append((mask, rhs))

    # forward elimination
    pivots: Dict[int, Tuple[int, int]] = {}
    for mask, rhs in rows:
        for pcol, (pmask, prhs) in pivots.items():
            if (mask >> pcol) & 1:
                mask ^= pmask
                rhs ^= prhs
        if mask == 0:
            if rhs:
                return []
            continue
        low = (mask & -mask).bit_length() - 1
        pivots[low] = (mask, rhs)
    free_cols = [i for i in range(nvars) if i not in pivots]

    classes = []
    for bits in itertools.product((0, 1), repeat=len(free_cols)):
        sol = 0
        for i, bit in zip(free_cols, bits):
            if bit:
                sol |= 1 << i
        for pcol in sorted(pivots, reverse=True):
            pmask, prhs = pivots[pcol]
            val = prhs ^ (bin(sol & pmask & ~(1 << pcol)).count("1") % 2)
            if val:
                sol |= 1 << pcol
        labels = [1] * len(t.arcs)
        for a, i in col.items():
            labels[a] = (sol >> i) & 1
        classes.append(Z2Class(t, tuple(labels)))
    classes.sort(key=lambda c: c.labels)
    return classes


def _transport_labels(
    t: SurfaceTriangulation, labels: Tuple[int, ...], aid: int
) -> Tuple[int, ...]:
    """Labels after flipping aid: the new arc's label is the cocycle
    completion in either new triangle; the two must agree."""
    a1, p, q, a2, r, s = t.flip_quad(aid)
    arc = t.arc_of_side
    from_t1 = (labels[arc(q)] + labels[arc(r)]) % 2
    from_t2 = (labels[arc(s)] + labels[arc(p)]) % 2
    if from_t1 != from_t2:
        raise InconsistentCocycle("input labels violate the cocycle rule")
    out = list(labels)
    out[aid] = from_t1
    return tuple(out)


def transport_class(cls: Z2Class, aid: int) -> Z2Class:
    """The class carried across one flip (labels on the flipped carrier)."""
    labels = _transport_labels(cls.carrier, cls.labels, aid)
    return Z2Class(cls.carrier.flip(aid), labels)


def transport_to_reference(cls: Z2Class) -> Z2Class:
    """Transport back along the carrier's recorded flip path."""
    chain = cls.carrier.replay()
    labels = cls.labels
    for step in range(len(chain) - 1, 0, -1):
        aid = chain[step].flip_path[-1]
        labels = _transport_labels(chain[step], labels, aid)
    return Z2Class(chain[0], labels)


# ---------------------------------------------------------------------------
# polygonal dissections


@dataclass(frozen=True)
class Dissection:
    """Interior arcs whose complement is a spanning tree of the triangle
    adjacency graph; cutting along them opens the surface to a polygon."""

    carrier: SurfaceTriangulation
    arcs: FrozenSet[int]

    def __post_init__(self):
        t = self.carrier
        for a in self.arcs:
            if t.arc_is_boundary(a):
                raise NotADissection(f"arc {a} is a boundary arc")
        tree_arcs = [a for a in t.interior_arcs() if a not in self.arcs]
        if len(tree_arcs) != len(t.triangles) - 1:
            raise NotADissection("complement has the wrong size for a spanning tree")
        adj: Dict[int, List[int]] = {i: [] for i in range(len(t.triangles))}
        for a in tree_arcs:
            s1, s2 = t.arcs[a]
            t1, t2 = t._c.tri_of_side(s1), t._c.tri_of_side(s2)
            adj[t1].append(t2)
            adj[t2].append(t1)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != len(t.triangles):
            raise NotADissection("complement does not span the triangles")

    def sorted_arcs(self) -> List[int]:
        return sorted(self.arcs)


def dissection_spanning_tree(t: SurfaceTriangulation) -> Dissection:
    """Deterministic dissection: BFS the triangle graph from triangle 0
    taking interior arcs in id order; the unused arcs are the dissection."""
    seen = {0}
    tree: Set[int] = set()
    frontier = [0]
    while frontier:
        next_frontier = []
        for tri in frontier:
            for a in t.interior_arcs():
                if a in tree:
                    continue
                s1, s2 = t.arcs[a]
                t1, t2 = t._c.tri_of_side(s1), t._c.tri_of_side(s2)
                if t1 == tri and t2 not in seen:
                    seen.add(t2)
                    tree.add(a)
                    next_frontier.append(t2)
                elif t2 == tri and t1 not in seen:
                    seen.add(t1)
                    tree.add(a)
                    next_frontier.append(t1)
        frontier = next_frontier
    arcs = frozenset(a for a in t.interior_arcs() if a not in tree)
    return Dissection(t, arcs)


def _all_dissections(t: SurfaceTriangulation) -> List[Dissection]:
    interior = t.interior_arcs()
    d = 2 * t.genus + t.num_boundary - 1
    out = []
    for combo in itertools.combinations(sorted(interior), d):
        try:
            out.append(Dissection(t, frozenset(combo)))
        except NotADissection:
            continue
    return out


def _cut_complex_of(tri: SurfaceTriangulation, d_arcs) -> _Complex:
    return _Complex(
        tri.triangles,
        {a: b for a, b in tri.glue.items() if tri.arc_of_side(a) not in d_arcs},
    )


def dissection_avoiding(t: SurfaceTriangulation, zero_class: Z2Class) -> Dissection:
    """A dissection all of whose arcs are labeled 1 by the class.

    Exchange procedure: while some dissection arc has label 0, pick a
    junction on the cut polygon's boundary where a copy of such an arc
    meets a label-1 edge, flip away every interior arc at the shared
    corner, and swap the bad arc for the exposed ear arc (whose label is
    1 by the odd-per-triangle rule).  The label-0 count drops each round.
    """
    labels = zero_class.labels
    tri = t
    d_arcs = set(dissection_spanning_tree(t).arcs)
    for _ in range(len(d_arcs) + 1):
        bad = [a for a in sorted(d_arcs) if labels[a] == 0]
        if not bad:
            return Dissection(tri, frozenset(d_arcs))
        cx = _cut_complex_of(tri, d_arcs)
        walk = cx.boundary_components()[0]
        k = len(walk)
        junction = None
        for i, s in enumerate(walk):
            s2 = walk[(i + 1) % k]
            a1, a2 = tri.arc_of_side(s), tri.arc_of_side(s2)
            if a1 in d_arcs and labels[a1] == 0 and labels[a2] == 1:
                junction = (s, s2, a1)
                break
            if a2 in d_arcs and labels[a2] == 0 and labels[a1] == 1:
                junction = (s, s2, a2)
                break
        if junction is None:
            raise AvoidanceFailed("no label-0/label-1 junction on the cut boundary")
        s_before, s_after, alpha = junction

        # flip the corner free: each flip of an arc through the shared
        # vertex strictly reduces its interior degree in the cut polygon
        while True:
            cx = _cut_complex_of(tri, d_arcs)
            v = cx.head_vertex(s_before)
            incident = [
                aid
                for aid in tri.interior_arcs()
                if aid not in d_arcs
                and any(
                    cx.tail_vertex(x) == v or cx.head_vertex(x) == v
                    for x in tri.arcs[aid]
                )
            ]
            if not incident:
                break
            labels = _transport_labels(tri, labels, incident[0])
            tri = tri.flip(incident[0])

        ear = cx.tri_of_side(s_before)
        if cx.tri_of_side(s_after) != ear:
            raise AvoidanceFailed("corner reduction did not expose an ear")
        gamma_side = next(
            x for x in tri.triangles[ear] if x not in (s_before, s_after)
        )
        gamma = tri.arc_of_side(gamma_side)
        if labels[gamma] != 1:
            raise AvoidanceFailed("ear arc unexpectedly lies in the zero set")
        d_arcs.discard(alpha)
        d_arcs.add(gamma)
    raise AvoidanceFailed("exchange procedure failed to terminate")


def class_of_dissection(d: Dissection) -> Z2Class:
    """The unique class labeling every dissection arc (and the boundary) 1."""
    matches = [
        c for c in solve_classes(d.carrier) if all(c.labels[a] == 1 for a in d.arcs)
    ]
    if not matches:
        raise NoClass("no class exists (odd number of marked points)")
    if len(matches) > 1:
        raise NonUnique("multiple classes fix the dissection; invariant broken")
    return matches[0]


def subset_bijection(d: Dissection) -> Dict[FrozenSet[int], Z2Class]:
    """For each subset S of the dissection, the unique class vanishing
    exactly on S within the dissection; a bijection onto all classes."""
    classes = solve_classes(d.carrier)
    if not classes:
        raise NoClass("no classes exist (odd number of marked points)")
    out: Dict[FrozenSet[int], Z2Class] = {}
    arcs = d.sorted_arcs()
    for bits in itertools.product((0, 1), repeat=len(arcs)):
        s = frozenset(a for a, bit in zip(arcs, bits) if bit == 0)
        matches = [
            c
            for c in classes
            if all(c.labels[a] == (0 if a in s else 1) for a in arcs)
        ]
        if len(matches) != 1:
            raise NonUnique(f"subset {sorted(s)} pinned {len(matches)} classes")
        out[s] = matches[0]
    return out


def congruent(d1: Dissection, d2: Dissection) -> bool:
    """Whether the two dissections bound the same deep component: their
    classes agree after transport to the shared reference triangulation."""
    if d1.carrier.ref() is not d2.carrier.ref():
        raise DifferentSurface("dissections live on different surfaces")
    c1 = transport_to_reference(class_of_dissection(d1))
    c2 = transport_to_reference(class_of_dissection(d2))
    return c1.labels == c2.labels


# ---------------------------------------------------------------------------
# cutting along a dissection


@dataclass(frozen=True)
class CutPolygon:
    """The polygon obtained by unglueing the dissection arcs.

    Boundary slots are numbered so slot t (1-based) runs from polygon
    vertex t to t+1; `edge_source[t]` is the surface side occupying it.
    `diagonal_of_arc` places every remaining interior arc as a chord."""

    size: int
    edge_source: Tuple[int, ...]
    arc_of_edge_source: Tuple[int, ...]
    diagonal_of_arc: Dict[int, Tuple[int, int]]

    def polygon_edge(self, t: int) -> Tuple[int, int]:
        return (t, t + 1) if t < self.size else (1, self.size)


def cut_polygon(d: Dissection) -> CutPolygon:
    t = d.carrier
    cut_glue = {
        a: b
        for a, b in t.glue.items()
        if t.arc_of_side(a) not in d.arcs
    }
    cx = _Complex(t.triangles, cut_glue)
    if cx.interior_vertices:
        raise NotADissection("cutting left interior vertices")
    comps = cx.boundary_components()
    if len(comps) != 1:
        raise NotADissection("cutting did not open into a single polygon")
    walk = comps[0]
    v, e, f = cx.counts()
    if v - e + f != 1:
        raise NotADissection("cut complex is not a disk")
    vertex_number = {}
    for idx, s in enumerate(walk):
        vertex_number[cx.tail_vertex(s)] = idx + 1
    k = len(walk)
    diagonal_of_arc: Dict[int, Tuple[int, int]] = {}
    for aid in t.interior_arcs():
        if aid in d.arcs:
            continue
        s = t.arcs[aid][0]
        i = vertex_number[cx.tail_vertex(s)]
        j = vertex_number[cx.head_vertex(s)]
        diagonal_of_arc[aid] = seg(i, j)
    return CutPolygon(
        size=k,
        edge_source=tuple(walk),
        arc_of_edge_source=tuple(t.arc_of_side(s) for s in walk),
        diagonal_of_arc=diagonal_of_arc,
    )


# ---------------------------------------------------------------------------
# deep points


@dataclass
class SurfaceDeepPoint:
    """A deep point: values on every arc of the current triangulation
    (None marks a value the flip walk could not derive), together with the
    label class whose zero set is exactly the vanishing arcs."""

    dissection: Dissection
    boundary_values: Dict[int, FieldValue]
    dissection_values: Dict[int, FieldValue]
    triangulation: SurfaceTriangulation
    values: Dict[int, Optional[FieldValue]]
    z2: Z2Class
    ctx: FieldContext


def deep_point_from_dissection(
    d: Dissection,
    boundary_values: Mapping[int, FieldValue],
    dissection_values: Mapping[int, FieldValue],
) -> SurfaceDeepPoint:
    """Extend nonzero values on boundary and dissection arcs to the deep
    point supported on the dissection, via the cut polygon."""
    t = d.carrier
    if t.num_marked % 2 != 0:
        raise OddMarkedPoints(f"{t.num_marked} marked points; no deep points")
    for aid in t.boundary_arcs():
        if aid not in boundary_values:
            raise SurfaceError(f"missing value for boundary arc {aid}")
        if boundary_values[aid].is_zero:
            raise ZeroValue(f"boundary arc {aid} must be nonzero")
    for aid in d.arcs:
        if aid not in dissection_values:
            raise SurfaceError(f"missing value for dissection arc {aid}")
        if dissection_values[aid].is_zero:
            raise ZeroValue(f"dissection arc {aid} must be nonzero")

    cp = cut_polygon(d)
    value_of_arc = dict(boundary_values)
    value_of_arc.update(dissection_values)
    edges = {}
    for slot, aid in enumerate(cp.arc_of_edge_source, start=1):
        edges[cp.polygon_edge(slot)] = value_of_arc[aid]
    poly_point = deep_point_from_edges(cp.size, edges)

    values: Dict[int, Optional[FieldValue]] = dict(value_of_arc)
    for aid, diag in cp.diagonal_of_arc.items():
        values[aid] = poly_point.value(*diag)
    cls = class_of_dissection(d)
    for aid, v in values.items():
        if v.is_zero != (cls.labels[aid] == 0):
            raise SurfaceError(f"value/label mismatch on arc {aid}")
    ctx = next(iter(boundary_values.values())).ctx
    return SurfaceDeepPoint(
        dissection=d,
        boundary_values=dict(boundary_values),
        dissection_values=dict(dissection_values),
        triangulation=t,
        values=values,
        z2=cls,
        ctx=ctx,
    )


def solve_closing_value(
    d: Dissection, values: Mapping[int, FieldValue], target_arc: int
) -> FieldValue:
    """The unique nonzero value on target_arc (a boundary arc) making the
    alternating product around the cut polygon equal (-1)**(b + m/2),
    given values on every other boundary and dissection arc."""
    t = d.carrier
    if not t.arc_is_boundary(target_arc):
        raise SurfaceError("the closing arc must be a boundary arc")
    cp = cut_polygon(d)
    ctx = next(iter(values.values())).ctx
    sign = ctx.minus_one() ** ((cp.size + 2) // 2)
    num, den = ctx.one(), ctx.one()
    target_in_numerator = None
    for slot in range(1, cp.size + 1):
        aid = cp.arc_of_edge_source[slot - 1]
        if aid == target_arc:
            target_in_numerator = slot % 2 == 1
            continue
        if slot % 2 == 1:
            num = num * values[aid]
        else:
            den = den * values[aid]
    if target_in_numerator is None:
        raise SurfaceError("closing arc does not appear on the cut polygon")
    if target_in_numerator:
        return sign * den / num
    return num / (sign * den)


def flip_evaluation(
    p: SurfaceDeepPoint, aid: int, allow_unknown: bool = False
) -> SurfaceDeepPoint:
    """Carry the deep point across one flip.

    The class always transports; the new arc's value is 0 when its label
    is 0, is derived from the quadrilateral exchange relation when the old
    value is known and nonzero, and is otherwise underdetermined."""
    t = p.triangulation
    a1, pp, qq, a2, rr, ss = t.flip_quad(aid)
    arc = t.arc_of_side
    quad_vals = [p.values.get(arc(x)) for x in (pp, qq, rr, ss)]
    old = p.values.get(aid)
    labels2 = _transport_labels(t, p.z2.labels, aid)
    t2 = t.flip(aid)

    if labels2[aid] == 0:
        new_value: Optional[FieldValue] = p.ctx.zero()
    elif old is not None and not old.is_zero and all(v is not None for v in quad_vals):
        vp, vq, vr, vs = quad_vals
        new_value = (vp * vr + vq * vs) / old
    elif allow_unknown:
        new_value = None
    else:
        raise ValueUnderdetermined(
            f"flip of arc {aid}: replacement has label 1 but no local derivation"
        )

    # exchange identity old * new = v(p)v(r) + v(q)v(s), where computable
    if old is not None and new_value is not None and all(
        v is not None for v in quad_vals
    ):
        vp, vq, vr, vs = quad_vals
        if old * new_value != vp * vr + vq * vs:
            raise SurfaceError(f"exchange identity fails at arc {aid}")

    values2 = dict(p.values)
    values2[aid] = new_value
    return SurfaceDeepPoint(
        dissection=p.dissection,
        boundary_values=p.boundary_values,
        dissection_values=p.dissection_values,
        triangulation=t2,
        values=values2,
        z2=Z2Class(t2, labels2),
        ctx=p.ctx,
    )


@dataclass
class WalkReport:
    steps: int
    flips_taken: List[int] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    undetermined_values: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures


def _check_state(p: SurfaceDeepPoint, report: WalkReport, where: str) -> None:
    t = p.triangulation
    if not any(v == 0 for v in p.z2.labels):
        report.failures.append(f"{where}: no arc of the triangulation vanishes")
    for tri in t.triangles:
        zeros = sum(1 for s in tri if p.z2.labels[t.arc_of_side(s)] == 0)
        if zeros % 2 != 1:
            report.failures.append(f"{where}: triangle {tri} has {zeros} zero sides")
    for aid, v in p.values.items():
        if v is not None and v.is_zero != (p.z2.labels[aid] == 0):
            report.failures.append(f"{where}: value/label mismatch on arc {aid}")


def verify_deep_random_walk(
    p: SurfaceDeepPoint, steps: int, seed: int
) -> WalkReport:
    """Seeded random flip walk certifying deepness along the way: at every
    visited triangulation some arc vanishes, every triangle kills an odd
    number of its sides, and every computable exchange identity holds."""
    import random as _random

    rng = _random.Random(seed)
    report = WalkReport(steps)
    state = p
    _check_state(state, report, "start")
    for step in range(steps):
        t = state.triangulation
        candidates = sorted(t.interior_arcs())
        defined = []
        for aid in candidates:
            labels2 = _transport_labels(t, state.z2.labels, aid)
            if labels2[aid] == 0:
                defined.append(aid)
                continue
            old = state.values.get(aid)
            a1, pp, qq, a2, rr, ss = t.flip_quad(aid)
            quad_known = all(
                state.values.get(t.arc_of_side(x)) is not None
                for x in (pp, qq, rr, ss)
            )
            if old is not None and not old.is_zero and quad_known:
                defined.append(aid)
        pool = defined if defined else candidates
        aid = rng.choice(pool)
        try:
            state = flip_evaluation(state, aid, allow_unknown=True)
        except SurfaceError as exc:
            report.failures.append(f"step {step}: {exc}")
            break
        report.flips_taken.append(aid)
        if state.values.get(aid) is None:
            report.undetermined_values += 1
        _check_state(state, report, f"step {step}")
    return report


# ---------------------------------------------------------------------------
# alternating double covers


@dataclass
class AlternatingDoubleCover:
    """Two copies of the cut polygon with opposite alternating colorings,
    re-glued along the dissection so endpoint colors match."""

    base: SurfaceTriangulation
    dissection: Dissection
    triangles: Tuple[Triangle, ...]
    glue: Dict[int, int]
    projection: Dict[int, int]
    vertex_colors: Dict[int, int]
    complex: _Complex

    def indicator_labels(self) -> Tuple[int, ...]:
        """Label 1 on base arcs whose lifts join opposite colors, 0 on arcs
        whose lifts have same-colored ends (the vanishing class)."""
        out = []
        for sides in self.base.arcs:
            s = sides[0]
            tail = self.complex.tail_vertex(s)
            head = self.complex.head_vertex(s)
            out.append(0 if self.vertex_colors[tail] == self.vertex_colors[head] else 1)
        return tuple(out)


def alternating_double_cover(d: Dissection) -> AlternatingDoubleCover:
    t = d.carrier
    if t.num_marked % 2 != 0:
        raise OddMarkedPoints("alternating covers need an even marked-point count")
    cp = cut_polygon(d)
    cut_glue = {
        a: b for a, b in t.glue.items() if t.arc_of_side(a) not in d.arcs
    }
    cut_cx = _Complex(t.triangles, cut_glue)
    vertex_number = {}
    for idx, s in enumerate(cp.edge_source):
        vertex_number[cut_cx.tail_vertex(s)] = idx + 1

    def color(copy: int, s: int, at_head: bool) -> int:
        vtx = cut_cx.head_vertex(s) if at_head else cut_cx.tail_vertex(s)
        return (vertex_number[vtx] + copy) % 2

    shift = max(cut_cx.sides) + 1
    triangles = list(t.triangles) + [
        tuple(s + shift for s in tri) for tri in t.triangles
    ]
    glue: Dict[int, int] = {}
    for a, b in cut_glue.items():
        glue[a] = b
        glue[a + shift] = b + shift
    for aid in d.sorted_arcs():
        s1, s2 = t.arcs[aid]
        # gluing identifies tail(s1) with head(s2): same copy iff colors agree
        same_copy = color(0, s1, at_head=False) == color(0, s2, at_head=True)
        if same_copy:
            pairs = [(s1, s2), (s1 + shift, s2 + shift)]
        else:
            pairs = [(s1, s2 + shift), (s1 + shift, s2)]
        for a, b in pairs:
            glue[a] = b
            glue[b] = a
    cover_cx = _Complex(triangles, glue)

    vertex_colors: Dict[int, int] = {}
    for s in cover_cx.sides:
        if s >= shift:
            copy, base_side = 1, s - shift
        else:
            copy, base_side = 0, s
        c = color(copy, base_side, at_head=False)
        vtx = cover_cx.tail_vertex(s)
        if vtx in vertex_colors and vertex_colors[vtx] != c:
            raise SurfaceError("cover coloring is inconsistent around a vertex")
        vertex_colors[vtx] = c

    cover = AlternatingDoubleCover(
        base=t,
        dissection=d,
        triangles=tuple(triangles),
        glue=glue,
        projection={s: (s - shift if s >= shift else s) for s in cover_cx.sides},
        vertex_colors=vertex_colors,
        complex=cover_cx,
    )
    _validate_cover(cover, t, shift)
    return cover


def _validate_cover(
    cover: AlternatingDoubleCover, base: SurfaceTriangulation, shift: int
) -> None:
    cx = cover.complex
    # adjacent marked points along the cover boundary have opposite colors
    for s in cx.boundary_sides:
        if cover.vertex_colors[cx.tail_vertex(s)] == cover.vertex_colors[cx.head_vertex(s)]:
            raise SurfaceError("adjacent cover marked points share a color")
    # the two preimages of each base marked point have opposite colors
    base_cx = base._c
    preimages: Dict[int, Set[int]] = {}
    for s in cx.sides:
        base_vertex = base_cx.tail_vertex(cover.projection[s])
        preimages.setdefault(base_vertex, set()).add(cx.tail_vertex(s))
    for base_vertex, lifted in preimages.items():
        if len(lifted) != 2:
            raise SurfaceError(
                f"marked point {base_vertex} has {len(lifted)} preimages"
            )
        c1, c2 = [cover.vertex_colors[v] for v in sorted(lifted)]
        if c1 == c2:
            raise SurfaceError(f"preimages of marked point {base_vertex} share a color")


# ---------------------------------------------------------------------------
# the Dehn twist scenario on the (1,1)-annulus


def _boundary_pinned_isomorphism(
    t_from: SurfaceTriangulation, t_to: SurfaceTriangulation
) -> Optional[Dict[int, int]]:
    """A side bijection fixing every boundary side, commuting with the
    gluing, and matching triangles with their cyclic order; None if none
    exists."""
    interior_from = sorted(s for tri in t_from.triangles for s in tri if s in t_from.glue)
    interior_to = sorted(s for tri in t_to.triangles for s in tri if s in t_to.glue)
    if len(interior_from) != len(interior_to):
        return None
    to_triangles = set()
    for tri in t_to.triangles:
        for r in range(3):
            to_triangles.add((tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]))
    for image in itertools.permutations(interior_to):
        phi = {s: s for s in t_from._c.boundary_sides}
        phi.update(dict(zip(interior_from, image)))
        if any(phi[t_from.glue[s]] != t_to.glue[phi[s]] for s in interior_from):
            continue
        if all(
            (phi[a], phi[b], phi[c]) in to_triangles for a, b, c in t_from.triangles
        ):
            return phi
    return None


@dataclass
class DehnTwistReport:
    flip_sequence: Tuple[int, ...]
    class_map: List[Tuple[Tuple[int, ...], Tuple[int, ...]]]
    swaps: bool
    square_is_identity: bool
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _twist_action(
    t0: SurfaceTriangulation, max_len: int = 4
) -> Tuple[Tuple[int, ...], Dict[Tuple[int, ...], Tuple[int, ...]]]:
    """The shortest non-backtracking flip sequence returning to a
    boundary-pinned copy of t0, as a permutation of label classes."""
    sequences = [((), t0)]
    for length in range(1, max_len + 1):
        next_sequences = []
        for path, tri in sequences:
            for aid in tri.interior_arcs():
                if path and path[-1] == aid:
                    continue
                t2 = tri.flip(aid)
                new_path = path + (aid,)
                phi = _boundary_pinned_isomorphism(t2, t0)
                if phi is not None:
                    action = {}
                    for cls in solve_classes(t0):
                        labels = cls.labels
                        chain = t0
                        for step in new_path:
                            labels = _transport_labels(chain, labels, step)
                            chain = chain.flip(step)
                        relabeled = [0] * len(t0.arcs)
                        for side, image in phi.items():
                            relabeled[t0.arc_of_side(image)] = labels[
                                chain.arc_of_side(side)
                            ]
                        action[cls.labels] = tuple(relabeled)
                    return new_path, action
                next_sequences.append((new_path, t2))
        sequences = next_sequences
    raise SurfaceError("no combinatorial return found within the length cap")


def dehn_twist_scenario_11_annulus() -> DehnTwistReport:
    """Realize the Dehn twist of the (1,1)-annulus as the shortest
    non-backtracking flip return and check that it swaps the two label
    classes while its square acts trivially."""
    t0 = named_surface("annulus11")
    classes = solve_classes(t0)
    failures: List[str] = []
    if len(classes) != 2:
        failures.append(f"expected 2 classes on the (1,1)-annulus, got {len(classes)}")
    path, action = _twist_action(t0)
    label_set = {c.labels for c in classes}
    if set(action.values()) != label_set:
        failures.append("twist image is not a permutation of the classes")
    swaps = bool(action) and all(v != k for k, v in action.items())
    square_identity = all(action.get(v) == k for k, v in action.items())
    if not swaps:
        failures.append("twist acts trivially on the deep components")
    if not square_identity:
        failures.append("twist squared is not the identity on the components")
    return DehnTwistReport(
        flip_sequence=path,
        class_map=sorted(action.items()),
        swaps=swaps,
        square_is_identity=square_identity,
        failures=failures,
    )
