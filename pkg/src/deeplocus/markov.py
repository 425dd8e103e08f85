"""The Markov quiver's upper cluster algebra and its deep points.

The upper variety is the hypersurface x*y*z*M = x^2 + y^2 + z^2 in
affine 4-space.  Mutation in any of the three directions is the
division-free involution v -> (product of the other two) * M - v, and the
exchange graph is a 3-regular tree (reduced words over the three
directions).  Deep points fall into four families:

    A: (0, 0, 0, alpha)                      kills every cluster variable
    X: (0, beta, gamma, 0), beta^2+gamma^2=0  kills every x-type variable
    Y: (beta, 0, gamma, 0), beta^2+gamma^2=0  kills every y-type variable
    Z: (beta, gamma, 0, 0), beta^2+gamma^2=0  kills every z-type variable

disjoint except for the common origin, which is classified as type A.
Restriction to the cluster algebra itself collapses all of type A to the
single all-variables-zero point and is injective elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import DeepLocusError
from .field import FieldContext, FieldValue

DIRECTIONS = ("x", "y", "z")

MAX_SCAN_PRIME = 101


class MarkovError(DeepLocusError):
    pass


class InvalidPoint(MarkovError):
    pass


class ZeroDenominator(MarkovError, ZeroDivisionError):
    pass


class SearchTooLarge(MarkovError):
    pass


@dataclass(frozen=True)
class MarkovUpperPoint:
    x: FieldValue
    y: FieldValue
    z: FieldValue
    M: FieldValue

    @property
    def ctx(self) -> FieldContext:
        return self.x.ctx

    def values(self) -> Tuple[FieldValue, FieldValue, FieldValue]:
        return (self.x, self.y, self.z)


def markov_residual(p: MarkovUpperPoint) -> FieldValue:
    return p.x * p.y * p.z * p.M - p.x**2 - p.y**2 - p.z**2


def is_valid_point(p: MarkovUpperPoint) -> bool:
    return markov_residual(p).is_zero


def markov_element(x: FieldValue, y: FieldValue, z: FieldValue) -> FieldValue:
    den = x * y * z
    if den.is_zero:
        raise ZeroDenominator("the Markov element needs x*y*z nonzero")
    return (x**2 + y**2 + z**2) / den


@dataclass(frozen=True)
class TreeNode:
    """A cluster in the 3-regular exchange tree: a reduced mutation word
    and the (x-type, y-type, z-type) values there."""

    path: Tuple[str, ...]
    values: Tuple[FieldValue, FieldValue, FieldValue]

    def __post_init__(self):
        for a, b in zip(self.path, self.path[1:]):
            if a == b:
                raise MarkovError(f"path {self.path} is not reduced")


def mutate_upper(node: TreeNode, M: FieldValue, direction: str) -> TreeNode:
    """Replace the direction-type value v by (other pair product)*M - v.

    Mutating twice in a direction returns to the parent; the path shrinks
    on a backtrack and grows otherwise."""
    if direction not in DIRECTIONS:
        raise MarkovError(f"unknown direction {direction!r}")
    k = DIRECTIONS.index(direction)
    vals = list(node.values)
    others = [v for t, v in enumerate(vals) if t != k]
    vals[k] = others[0] * others[1] * M - vals[k]
    if node.path and node.path[-1] == direction:
        path = node.path[:-1]
    else:
        path = node.path + (direction,)
    return TreeNode(path, tuple(vals))


@dataclass(frozen=True)
class DeepType:
    tag: str  # one of "A", "X", "Y", "Z"
    alpha: Optional[FieldValue] = None
    beta: Optional[FieldValue] = None
    gamma: Optional[FieldValue] = None

    def __post_init__(self):
        if self.tag not in ("A", "X", "Y", "Z"):
            raise MarkovError(f"unknown deep type {self.tag!r}")
        if self.tag != "A":
            if not (self.beta**2 + self.gamma**2).is_zero:
                raise MarkovError("X/Y/Z types need beta^2 + gamma^2 = 0")


def classify_deep_upper(p: MarkovUpperPoint) -> Optional[DeepType]:
    """The deep family of p, or None when p lies in some cluster torus.

    The all-zero cluster is reported as type A (the four families overlap
    only there)."""
    if not is_valid_point(p):
        raise InvalidPoint(f"residual is {markov_residual(p)}")
    zero = p.ctx.zero()
    if p.x == zero and p.y == zero and p.z == zero:
        return DeepType("A", alpha=p.M)
    if not p.M.is_zero:
        return None
    if p.x == zero and (p.y**2 + p.z**2).is_zero:
        return DeepType("X", beta=p.y, gamma=p.z)
    if p.y == zero and (p.x**2 + p.z**2).is_zero:
        return DeepType("Y", beta=p.x, gamma=p.z)
    if p.z == zero and (p.x**2 + p.y**2).is_zero:
        return DeepType("Z", beta=p.x, gamma=p.y)
    return None


def enumerate_deep_upper(ctx: FieldContext) -> List[MarkovUpperPoint]:
    """Exhaustive scan of the variety over a small prime field, keeping
    the deep points."""
    if ctx.kind != "prime-field":
        raise SearchTooLarge("exhaustive enumeration needs a finite field")
    if ctx.p > MAX_SCAN_PRIME:
        raise SearchTooLarge(f"p={ctx.p} exceeds the p^4 scan cap {MAX_SCAN_PRIME}")
    elems = list(ctx.elements())
    out = []
    for x, y, z, M in itertools.product(elems, repeat=4):
        p = MarkovUpperPoint(x, y, z, M)
        if not markov_residual(p).is_zero:
            continue
        if classify_deep_upper(p) is not None:
            out.append(p)
    return out


@dataclass(frozen=True)
class ClusterRestriction:
    """Image of a deep upper point in the cluster variety: type A points
    all collapse to the all-zero representative."""

    kind: str  # "all-zero" or one of "X", "Y", "Z"
    beta: Optional[FieldValue] = None
    gamma: Optional[FieldValue] = None


def restrict_to_cluster_algebra(p: MarkovUpperPoint) -> ClusterRestriction:
    t = classify_deep_upper(p)
    if t is None:
        raise InvalidPoint("restriction representative is defined for deep points")
    if t.tag == "A":
        return ClusterRestriction("all-zero")
    return ClusterRestriction(t.tag, t.beta, t.gamma)


@dataclass
class ExploreReport:
    point: MarkovUpperPoint
    depth: int
    nodes_visited: int = 0
    failures: List[str] = field(default_factory=list)
    markov_element_values: Dict[Tuple[str, ...], FieldValue] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def explore_and_verify(p: MarkovUpperPoint, depth: int = 6) -> ExploreReport:
    """Walk every reduced mutation word to the given depth and check:

    - the exchange identity v*v' = (sum of squares of the other two) at
      every mutation, division-free;
    - type A points vanish identically, type X/Y/Z points kill exactly
      their own type everywhere;
    - on torus clusters (all three values nonzero) the Markov element is
      constant, equal to M.
    """
    deep_type = classify_deep_upper(p)
    report = ExploreReport(p, depth)
    root = TreeNode((), p.values())
    frontier = [root]
    seen = 0
    while frontier:
        next_frontier = []
        for node in frontier:
            seen += 1
            _check_node(node, p, deep_type, report)
            if len(node.path) < depth:
                for d in DIRECTIONS:
                    if node.path and node.path[-1] == d:
                        continue
                    child = mutate_upper(node, p.M, d)
                    _check_exchange(node, child, d, report)
                    next_frontier.append(child)
        frontier = next_frontier
    report.nodes_visited = seen
    return report


def _check_node(node: TreeNode, p: MarkovUpperPoint, deep_type, report) -> None:
    vx, vy, vz = node.values
    if deep_type is None:
        if not (vx.is_zero or vy.is_zero or vz.is_zero):
            m = markov_element(vx, vy, vz)
            report.markov_element_values[node.path] = m
            if m != p.M:
                report.failures.append(
                    f"Markov element {m} differs from M={p.M} at {node.path}"
                )
        return
    if deep_type.tag == "A":
        if not (vx.is_zero and vy.is_zero and vz.is_zero):
            report.failures.append(f"type A values not all zero at {node.path}")
        return
    expected_zero = DIRECTIONS.index(deep_type.tag.lower())
    for k, v in enumerate(node.values):
        if k == expected_zero and not v.is_zero:
            report.failures.append(
                f"{deep_type.tag}-type value nonzero at {node.path}"
            )
        if k != expected_zero and v.is_zero:
            report.failures.append(
                f"unexpected zero of {DIRECTIONS[k]}-type at {node.path}"
            )


def _check_exchange(node: TreeNode, child: TreeNode, direction: str, report) -> None:
    k = DIRECTIONS.index(direction)
    v, v_new = node.values[k], child.values[k]
    others = [val for t, val in enumerate(node.values) if t != k]
    if v * v_new != others[0] ** 2 + others[1] ** 2:
        report.failures.append(
            f"exchange identity fails mutating {direction} at {node.path}"
        )
