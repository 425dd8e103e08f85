"""Rank-2 cluster algebras of (b,c)-type with frozen coefficients.

The presentation has two relations

    x0*x2 = y^[e1]+ * x1^b + y^[e1]-
    x1*x3 = y^[e2]+ * x2^c + y^[e2]-

where y^v means prod_k y_k^(v_k) and [v]+/[v]- are the componentwise
nonnegative parts with v = [v]+ - [v]- (so [v]- = max(-v, 0); both
exponent vectors are nonnegative).  The doubly infinite cluster
variable sequence obeys x_{i-1} x_{i+1} = y^[e_i]+ x_i^(b|c) + y^[e_i]-
(exponent b at odd i), with exchange-direction vectors e_i defined by the
recursion e_{i+1} + e_{i-1} = -(b|c) [e_i]-.

Deep points kill exactly the even-indexed or exactly the odd-indexed
cluster variables.  Window propagation across a killed neighbor uses a
polynomial identity: writing (y^[e]+ x^c + y^[e]-)^b = x^c g(x) + y^(b[e]-)
defines g, and x_{2i+2} has a closed form in x_{2i-2}, x_{2i}, x_{2i+1}
and g(x_{2i}) that needs no division by cluster values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DeepLocusError
from .field import FieldContext, FieldValue, GAUSSIAN_RATIONALS, PRIME_FIELD, RATIONALS

Vector = Tuple[int, ...]


class Rank2Error(DeepLocusError):
    pass


class InvalidPoint(Rank2Error):
    pass


class EnumerationUnsupported(Rank2Error):
    pass


class StuckPropagation(Rank2Error):
    """Neither the division rule nor the closed form can extend the window."""


def positive_part(v: Vector) -> Vector:
    return tuple(max(x, 0) for x in v)


def negative_part(v: Vector) -> Vector:
    """Componentwise, nonnegative: v = positive_part(v) - negative_part(v)."""
    return tuple(max(-x, 0) for x in v)


def vadd(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(k: int, v: Vector) -> Vector:
    return tuple(k * x for x in v)


def y_monomial(ys: Sequence[FieldValue], v: Vector, ctx: FieldContext) -> FieldValue:
    out = ctx.one()
    for yk, vk in zip(ys, v):
        out = out * yk**vk
    return out


@dataclass(frozen=True)
class Rank2Spec:
    b: int
    c: int
    f: int = 0
    e1: Vector = ()
    e2: Vector = ()

    def __post_init__(self):
        if self.b < 1 or self.c < 1:
            raise Rank2Error("b and c must be positive")
        if len(self.e1) != self.f or len(self.e2) != self.f:
            raise Rank2Error("e1 and e2 must have length f")

    def degree(self, i: int) -> int:
        """Exponent in the mutation relation at index i."""
        return self.b if i % 2 == 1 else self.c


@dataclass(frozen=True)
class EVectorWindow:
    spec: Rank2Spec
    lo: int
    hi: int
    vectors: Dict[int, Vector]

    def __getitem__(self, i: int) -> Vector:
        return self.vectors[i]


def e_vectors(spec: Rank2Spec, lo: int, hi: int) -> EVectorWindow:
    """Exchange-direction vectors on [lo, hi], by forward and backward
    recursion from e_1, e_2.

    Seed mutation of the extended exchange matrix gives
    e_{i+1} + e_{i-1} = -b [e_i]- at even i and -c [e_i]- at odd i: the
    coefficient is the mutation exponent of the adjacent odd/even indices.
    """
    if lo > 1 or hi < 2:
        raise Rank2Error("window must contain indices 1 and 2")
    vecs: Dict[int, Vector] = {1: tuple(spec.e1), 2: tuple(spec.e2)}
    for i in range(2, hi):
        coef = spec.degree(i + 1)
        vecs[i + 1] = vsub(vscale(-coef, negative_part(vecs[i])), vecs[i - 1])
    for i in range(1, lo, -1):
        coef = spec.degree(i + 1)
        vecs[i - 1] = vsub(vscale(-coef, negative_part(vecs[i])), vecs[i + 1])
    return EVectorWindow(spec, lo, hi, vecs)


@dataclass(frozen=True)
class Rank2Point:
    spec: Rank2Spec
    xs: Tuple[FieldValue, FieldValue, FieldValue, FieldValue]
    ys: Tuple[FieldValue, ...] = ()

    def __post_init__(self):
        if len(self.xs) != 4:
            raise Rank2Error("need exactly the four values x0..x3")
        if len(self.ys) != self.spec.f:
            raise Rank2Error("y-vector length must equal f")
        for y in self.ys:
            if y.is_zero:
                raise Rank2Error("frozen coefficients must be nonzero")

    @property
    def ctx(self) -> FieldContext:
        return self.xs[0].ctx


def presentation_residuals(p: Rank2Point) -> Tuple[FieldValue, FieldValue]:
    ctx = p.ctx
    s = p.spec
    e1, e2 = tuple(s.e1), tuple(s.e2)
    r1 = (
        p.xs[0] * p.xs[2]
        - y_monomial(p.ys, positive_part(e1), ctx) * p.xs[1] ** s.b
        - y_monomial(p.ys, negative_part(e1), ctx)
    )
    r2 = (
        p.xs[1] * p.xs[3]
        - y_monomial(p.ys, positive_part(e2), ctx) * p.xs[2] ** s.c
        - y_monomial(p.ys, negative_part(e2), ctx)
    )
    return r1, r2


def is_valid_point(p: Rank2Point) -> bool:
    r1, r2 = presentation_residuals(p)
    return r1.is_zero and r2.is_zero


# ---------------------------------------------------------------------------
# the g polynomial


@dataclass(frozen=True)
class GPolynomial:
    """g with Laurent-monomial coefficients: terms (int coef, y-exponent, x-degree)."""

    outer: int
    inner: int
    e: Vector
    terms: Tuple[Tuple[int, Vector, int], ...]

    def evaluate(self, x: FieldValue, ys: Sequence[FieldValue]) -> FieldValue:
        ctx = x.ctx
        out = ctx.zero()
        for coef, yexp, xdeg in self.terms:
            out = out + ctx.from_int(coef) * y_monomial(ys, yexp, ctx) * x**xdeg
        return out

    def constant_term(self) -> Tuple[int, Vector]:
        for coef, yexp, xdeg in self.terms:
            if xdeg == 0:
                return coef, yexp
        return 0, vscale(0, self.e)


def _binomial_g(outer: int, inner: int, e: Vector) -> GPolynomial:
    """g defined by (y^[e]+ x^inner + y^[e]-)^outer = x^inner * g(x) + y^(outer*[e]-)."""
    ep, em = positive_part(e), negative_part(e)
    terms = []
    for k in range(1, outer + 1):
        coef = math.comb(outer, k)
        yexp = vadd(vscale(k, ep), vscale(outer - k, em))
        terms.append((coef, yexp, (k - 1) * inner))
    return GPolynomial(outer, inner, tuple(e), tuple(terms))


def g_polynomial(spec: Rank2Spec, e_even: Vector) -> GPolynomial:
    return _binomial_g(spec.b, spec.c, tuple(e_even))


# ---------------------------------------------------------------------------
# window propagation


def division_step(
    spec: Rank2Spec,
    evw: EVectorWindow,
    ys: Sequence[FieldValue],
    window: Dict[int, FieldValue],
    j: int,
    s: int = -1,
) -> Optional[FieldValue]:
    """x_j from the mutation relation at j+s, dividing by x_{j+2s}; None if
    the divisor vanishes."""
    ctx = ys[0].ctx if ys else window[j + s].ctx
    divisor = window[j + 2 * s]
    if divisor.is_zero:
        return None
    mid = j + s
    e = evw[mid]
    rhs = (
        y_monomial(ys, positive_part(e), ctx) * window[mid] ** spec.degree(mid)
        + y_monomial(ys, negative_part(e), ctx)
    )
    return rhs / divisor


def closed_form_step(
    spec: Rank2Spec,
    evw: EVectorWindow,
    ys: Sequence[FieldValue],
    window: Dict[int, FieldValue],
    j: int,
    s: int = -1,
) -> FieldValue:
    """x_j without dividing by any cluster value, via the g identity.

    Uses x_{j+s}, x_{j+2s}, x_{j+4s}; valid at every variety point.
    """
    ctx = window[j + s].ctx
    outer = spec.degree(j + s)
    inner = spec.degree(j)
    e_mid = evw[j + 2 * s]
    e_adj = evw[j + s]
    e_far = evw[j + 3 * s]
    g = _binomial_g(outer, inner, e_mid)
    gval = g.evaluate(window[j + 2 * s], ys)
    term1 = -y_monomial(ys, negative_part(e_adj), ctx) * window[j + 2 * s] ** (inner - 1) * gval
    term2 = (
        y_monomial(ys, vsub(negative_part(e_adj), positive_part(e_far)), ctx)
        * window[j + 4 * s]
        * window[j + s] ** outer
    )
    return y_monomial(ys, vscale(-outer, negative_part(e_mid)), ctx) * (term1 + term2)


@dataclass(frozen=True)
class Rank2Evaluation:
    point: Rank2Point
    lo: int
    hi: int
    values: Dict[int, FieldValue]

    def __getitem__(self, i: int) -> FieldValue:
        return self.values[i]


def extend_evaluation(p: Rank2Point, N: int) -> Rank2Evaluation:
    """Fill the window [-N, N+3].  Where the division rule is blocked by a
    vanishing neighbor, the relation there must already be consistent and
    the closed form takes over; otherwise the candidate is invalid."""
    if not is_valid_point(p):
        raise InvalidPoint(f"presentation residuals are {presentation_residuals(p)}")
    ctx = p.ctx
    lo, hi = -N, N + 3
    evw = e_vectors(p.spec, lo - 1, hi + 1)
    w: Dict[int, FieldValue] = {i: p.xs[i] for i in range(4)}

    def advance(j: int, s: int) -> None:
        v = division_step(p.spec, evw, p.ys, w, j, s)
        if v is None:
            # divisor x_{j+2s} vanished: the relation at j+s forces its
            # right side to vanish too, or no valid extension exists
            mid = j + s
            e = evw[mid]
            rhs = (
                y_monomial(p.ys, positive_part(e), ctx) * w[mid] ** p.spec.degree(mid)
                + y_monomial(p.ys, negative_part(e), ctx)
            )
            if not rhs.is_zero:
                raise StuckPropagation(
                    f"x_{j + 2 * s} = 0 but the relation at {mid} has value {rhs}"
                )
            v = closed_form_step(p.spec, evw, p.ys, w, j, s)
        w[j] = v

    for j in range(4, hi + 1):
        advance(j, -1)
    for j in range(-1, lo - 1, -1):
        advance(j, +1)
    return Rank2Evaluation(p, lo, hi, w)


def relation_holds(
    spec: Rank2Spec,
    evw: EVectorWindow,
    ys: Sequence[FieldValue],
    window: Dict[int, FieldValue],
    i: int,
) -> bool:
    """Exact identity check of the mutation relation at index i."""
    ctx = window[i].ctx
    e = evw[i]
    lhs = window[i - 1] * window[i + 1]
    rhs = (
        y_monomial(ys, positive_part(e), ctx) * window[i] ** spec.degree(i)
        + y_monomial(ys, negative_part(e), ctx)
    )
    return lhs == rhs


def verify_deep(p: Rank2Point, N: int = 10) -> bool:
    """Certify deepness on [-N, N+3]: every relation holds exactly and the
    zero set is exactly the evens or exactly the odds."""
    ev = extend_evaluation(p, N)
    evw = e_vectors(p.spec, ev.lo - 1, ev.hi + 1)
    for i in range(ev.lo + 1, ev.hi):
        if not relation_holds(p.spec, evw, p.ys, ev.values, i):
            return False
    evens_zero = all(ev.values[i].is_zero for i in range(ev.lo, ev.hi + 1) if i % 2 == 0)
    odds_zero = all(ev.values[i].is_zero for i in range(ev.lo, ev.hi + 1) if i % 2 != 0)
    evens_nonzero = all(
        not ev.values[i].is_zero for i in range(ev.lo, ev.hi + 1) if i % 2 == 0
    )
    odds_nonzero = all(
        not ev.values[i].is_zero for i in range(ev.lo, ev.hi + 1) if i % 2 != 0
    )
    return (evens_zero and odds_nonzero) or (odds_zero and evens_nonzero)


# ---------------------------------------------------------------------------
# deep point families


def _fraction_root(q: Fraction, k: int) -> Optional[Fraction]:
    """The exact nonnegative k-th root of q >= 0, if it is rational."""
    if q < 0:
        return None

    def int_root(m: int) -> Optional[int]:
        if m == 0:
            return 0
        r = round(m ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**k == m:
                return cand
        return None

    rn = int_root(q.numerator)
    rd = int_root(q.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _nth_roots(ctx: FieldContext, target: FieldValue, k: int) -> List[FieldValue]:
    """All solutions of alpha^k = target, exactly, sorted."""
    if k == 1:
        return [target]
    if ctx.kind == PRIME_FIELD:
        return [a for a in ctx.elements() if a**k == target]
    if ctx.kind == RATIONALS:
        q = target._v
        out = []
        if k % 2 == 1:
            r = _fraction_root(abs(q), k)
            if r is not None:
                out.append(FieldValue(ctx, r if q >= 0 else -r))
        else:
            r = _fraction_root(q, k)
            if r is not None:
                out.extend([FieldValue(ctx, -r), FieldValue(ctx, r)])
                if r == 0:
                    out = [FieldValue(ctx, r)]
        return out
    if ctx.kind == GAUSSIAN_RATIONALS and k == 2:
        re, im = target._v
        roots = []
        if im == 0:
            r = _fraction_root(re, 2) if re >= 0 else None
            if r is not None:
                roots = [(r, Fraction(0)), (-r, Fraction(0))]
            else:
                s = _fraction_root(-re, 2)
                if s is not None:
                    roots = [(Fraction(0), s), (Fraction(0), -s)]
        else:
            norm = _fraction_root(re * re + im * im, 2)
            if norm is not None:
                x = _fraction_root((re + norm) / 2, 2)
                if x is not None and x != 0:
                    y = im / (2 * x)
                    roots = [(x, y), (-x, -y)]
        out = [ctx.gaussian(a, b) for a, b in roots]
        assert all(v * v == target for v in out)
        return sorted(set(out), key=lambda v: v.sort_key())
    raise EnumerationUnsupported(
        f"cannot extract {k}-th roots over {ctx!r}"
    )


def _beta_candidates(
    spec: Rank2Spec, ctx: FieldContext, betas: Optional[Iterable[Tuple[FieldValue, ...]]]
) -> List[Tuple[FieldValue, ...]]:
    if spec.f == 0:
        return [()]
    if betas is not None:
        return [tuple(b) for b in betas]
    if ctx.kind == PRIME_FIELD:
        return list(itertools.product(list(ctx.nonzero_elements()), repeat=spec.f))
    raise EnumerationUnsupported(
        "f >= 1 over an infinite field requires caller-supplied beta candidates"
    )


def _family_alphas(
    ctx: FieldContext, beta: Tuple[FieldValue, ...], e: Vector, exponent: int
) -> List[FieldValue]:
    """Solutions alpha of  beta^[e]+ * alpha^exponent + beta^[e]- = 0."""
    if len(e) == 0:
        return ctx.roots_of_minus_one(exponent)
    target = -y_monomial(beta, vsub(negative_part(e), positive_part(e)), ctx)
    return [a for a in _nth_roots(ctx, target, exponent) if not a.is_zero]


def deep_points(
    spec: Rank2Spec,
    ctx: FieldContext,
    betas: Optional[Iterable[Tuple[FieldValue, ...]]] = None,
) -> List[Tuple[Rank2Point, str]]:
    """All deep points over ctx, each tagged "even" or "odd" by which
    half of the cluster variables it kills.

    The even-killing family exists only when c > 1 or char divides b, and
    consists of (0, alpha, 0, alpha^-1 beta^[e2]-) with
    beta^[e1]+ alpha^b + beta^[e1]- = 0; the odd-killing family is the
    b <-> c mirror.  Every emitted point is residual-checked.
    """
    char = ctx.characteristic
    zero = ctx.zero()
    results: List[Tuple[Rank2Point, str]] = []
    candidates = _beta_candidates(spec, ctx, betas)

    if spec.c > 1 or (char > 0 and spec.b % char == 0):
        for beta in candidates:
            for alpha in _family_alphas(ctx, beta, tuple(spec.e1), spec.b):
                x3 = alpha.inverse() * y_monomial(beta, negative_part(tuple(spec.e2)), ctx)
                point = Rank2Point(spec, (zero, alpha, zero, x3), beta)
                assert is_valid_point(point)
                results.append((point, "even"))

    if spec.b > 1 or (char > 0 and spec.c % char == 0):
        for beta in candidates:
            for alpha in _family_alphas(ctx, beta, tuple(spec.e2), spec.c):
                x0 = alpha.inverse() * y_monomial(beta, negative_part(tuple(spec.e1)), ctx)
                point = Rank2Point(spec, (x0, zero, alpha, zero), beta)
                assert is_valid_point(point)
                results.append((point, "odd"))

    return results
