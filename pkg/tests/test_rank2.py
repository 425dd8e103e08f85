import itertools
import random

import pytest

from deeplocus.field import QI, QQ, prime_field
from deeplocus.rank2 import (
    EnumerationUnsupported,
    InvalidPoint,
    Rank2Point,
    Rank2Spec,
    StuckPropagation,
    closed_form_step,
    deep_points,
    division_step,
    e_vectors,
    extend_evaluation,
    g_polynomial,
    is_valid_point,
    presentation_residuals,
    relation_holds,
    negative_part,
    positive_part,
    verify_deep,
    y_monomial,
)

from conftest import F2, F3, F5, F7, random_value


def mk_point(spec, ctx, xs, ys=()):
    return Rank2Point(spec, tuple(ctx.from_int(x) for x in xs), tuple(ys))


class TestEVectors:
    def test_coefficient_free_is_empty(self):
        spec = Rank2Spec(2, 2)
        w = e_vectors(spec, -4, 6)
        assert all(v == () for v in w.vectors.values())

    def test_forward_hand_example(self):
        spec = Rank2Spec(1, 1, 1, (1,), (0,))
        w = e_vectors(spec, 1, 3)
        assert w[3] == (-1,)

    def test_backward_hand_example(self):
        spec = Rank2Spec(2, 1, 1, (-1,), (1,))
        w = e_vectors(spec, 0, 2)
        # e_2 + e_0 = -c [e_1]_-  =  (-1,)
        assert w[0] == (-2,)

    def test_recursion_holds_everywhere(self):
        for spec in [
            Rank2Spec(2, 3, 2, (1, -2), (0, 1)),
            Rank2Spec(1, 4, 1, (-3,), (2,)),
        ]:
            w = e_vectors(spec, -6, 8)
            for i in range(-5, 8):
                coef = spec.degree(i + 1)
                left = tuple(
                    x + y for x, y in zip(w[i + 1], w[i - 1])
                )
                right = tuple(-coef * m for m in negative_part(w[i]))
                assert left == right


class TestResiduals:
    def test_kronecker_deep_point_over_qi(self):
        spec = Rank2Spec(2, 2)
        p = Rank2Point(spec, (QI.zero(), QI.i(), QI.zero(), QI.gaussian(0, -1)))
        r1, r2 = presentation_residuals(p)
        assert r1.is_zero and r2.is_zero

    def test_wrong_guess_rejected_for_2_1(self):
        spec = Rank2Spec(2, 1)
        p = mk_point(spec, QQ, [0, -1, 0, -1])
        r1, r2 = presentation_residuals(p)
        assert r1 == QQ.from_int(-2)
        assert r2.is_zero

    def test_all_ones_type_1_1(self):
        spec = Rank2Spec(1, 1)
        p = mk_point(spec, QQ, [1, 1, 1, 1])
        assert presentation_residuals(p) == (QQ.minus_one(), QQ.minus_one())


class TestDeepPointFamilies:
    def test_counts_1_1_2_1_2_2(self):
        assert deep_points(Rank2Spec(1, 1), QQ) == []
        pts_21 = deep_points(Rank2Spec(2, 1), QQ)
        assert len(pts_21) == 1
        point, parity = pts_21[0]
        assert parity == "odd"
        assert point.xs[0] == QQ.minus_one() and point.xs[2] == QQ.minus_one()
        assert point.xs[1].is_zero and point.xs[3].is_zero
        assert len(deep_points(Rank2Spec(2, 2), F5)) == 4

    def test_2_2_over_f5_alphas(self):
        pts = deep_points(Rank2Spec(2, 2), F5)
        even = {p.xs[1]._v for p, parity in pts if parity == "even"}
        odd = {p.xs[2]._v for p, parity in pts if parity == "odd"}
        assert even == {2, 3} and odd == {2, 3}

    def test_kronecker_field_dependence(self):
        spec = Rank2Spec(2, 2)
        assert deep_points(spec, QQ) == []
        assert len(deep_points(spec, QI)) == 4
        assert len(deep_points(spec, F2)) == 2

    def test_2_1_char_2_gains_even_family(self):
        pts = deep_points(Rank2Spec(2, 1), F2)
        assert len(pts) == 2
        assert {parity for _, parity in pts} == {"even", "odd"}

    def test_every_emitted_point_verifies(self):
        for spec, ctx in [
            (Rank2Spec(2, 2), F5),
            (Rank2Spec(2, 1), QQ),
            (Rank2Spec(3, 2), F7),
            (Rank2Spec(2, 2), QI),
        ]:
            for point, _ in deep_points(spec, ctx):
                assert verify_deep(point, N=10)

    def test_count_formula_f0(self):
        # c = 1 contributes no even-killing points unless char | b, etc.
        for b, c in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (3, 4)]:
            for ctx in [F3, F5, F7, prime_field(13)]:
                spec = Rank2Spec(b, c)
                char = ctx.characteristic
                even = (
                    len(ctx.roots_of_minus_one(b))
                    if (c > 1 or b % char == 0)
                    else 0
                )
                odd = (
                    len(ctx.roots_of_minus_one(c))
                    if (b > 1 or c % char == 0)
                    else 0
                )
                assert len(deep_points(spec, ctx)) == even + odd

    def test_frozen_coefficients_over_f5(self):
        # derived fixture: (b, c) = (2, 2) with one frozen, e1=(1), e2=(0)
        spec = Rank2Spec(2, 2, 1, (1,), (0,))
        pts = deep_points(spec, F5)
        even = [(p, t) for p, t in pts if t == "even"]
        odd = [(p, t) for p, t in pts if t == "odd"]
        # beta*alpha^2 + 1 = 0 has solutions for beta in {1, 4} only
        assert len(even) == 4
        # alpha^2 + 1 = 0 has two roots; beta ranges over all of F5*
        assert len(odd) == 8
        for p, _ in pts:
            assert is_valid_point(p)
            assert verify_deep(p, N=8)

    def test_frozen_with_negative_exponent(self):
        spec = Rank2Spec(2, 2, 1, (-1,), (2,))
        for p, _ in deep_points(spec, F7):
            assert is_valid_point(p)
            assert verify_deep(p, N=6)

    def test_infinite_field_with_frozens_needs_betas(self):
        spec = Rank2Spec(2, 2, 1, (1,), (0,))
        with pytest.raises(EnumerationUnsupported):
            deep_points(spec, QQ)
        pts = deep_points(spec, QQ, betas=[(QQ.minus_one(),)])
        # -alpha^2 + ... : beta = -1 makes alpha^2 = 1 solvable over Q
        assert len(pts) >= 2
        for p, _ in pts:
            assert verify_deep(p, N=6)

    def test_supplied_betas_over_gaussian_rationals(self):
        # beta = i: the even family needs alpha^2 = -beta^-2 = 1, the odd
        # family alpha^2 = -1; two points each
        spec = Rank2Spec(2, 2, 1, (2,), (0,))
        pts = deep_points(spec, QI, betas=[(QI.i(),)])
        assert len(pts) == 4
        even = [p for p, parity in pts if parity == "even"]
        assert {p.xs[1] for p in even} == {QI.one(), QI.minus_one()}
        for p, _ in pts:
            assert verify_deep(p, N=6)


class TestGPolynomial:
    def test_b_equals_1_is_constant(self):
        g = g_polynomial(Rank2Spec(1, 3, 1, (2,), (0,)), (2,))
        assert g.terms == ((1, (2,), 0),)

    def test_2_2_expansion(self):
        g = g_polynomial(Rank2Spec(2, 2), ())
        # (x^2 + 1)^2 = x^2 (x^2 + 2) + 1
        assert sorted(g.terms) == [(1, (), 2), (2, (), 0)]

    def test_2_1_expansion_constant_term(self):
        g = g_polynomial(Rank2Spec(2, 1), ())
        assert sorted(g.terms) == [(1, (), 1), (2, (), 0)]
        coef, yexp = g.constant_term()
        assert coef == 2 and yexp == ()

    def test_defining_identity_numerically(self, rng):
        # (y^[e]+ x^c + y^[e]-)^b == x^c g(x) + y^(b [e]-) at random inputs
        for b, c, e in [(2, 2, (1,)), (3, 1, (-2,)), (2, 3, (1, -1))]:
            spec = Rank2Spec(b, c, len(e), e, tuple(0 for _ in e))
            g = g_polynomial(spec, e)
            for _ in range(10):
                x = random_value(QQ, rng)
                ys = tuple(random_value(QQ, rng, nonzero=True) for _ in e)
                lhs = (
                    y_monomial(ys, positive_part(e), QQ) * x**c
                    + y_monomial(ys, negative_part(e), QQ)
                ) ** b
                rhs = x**c * g.evaluate(x, ys) + y_monomial(
                    ys, tuple(b * m for m in negative_part(e)), QQ
                )
                assert lhs == rhs


def random_torus_point(spec, ctx, rng, tries=200):
    """A valid point with x0..x3 all nonzero, or None."""
    for _ in range(tries):
        x0 = random_value(ctx, rng, nonzero=True)
        x1 = random_value(ctx, rng, nonzero=True)
        ys = tuple(random_value(ctx, rng, nonzero=True) for _ in range(spec.f))
        e1, e2 = tuple(spec.e1), tuple(spec.e2)
        x2 = (
            y_monomial(ys, positive_part(e1), ctx) * x1**spec.b
            + y_monomial(ys, negative_part(e1), ctx)
        ) / x0
        if x2.is_zero:
            continue
        x3 = (
            y_monomial(ys, positive_part(e2), ctx) * x2**spec.c
            + y_monomial(ys, negative_part(e2), ctx)
        ) / x1
        if x3.is_zero:
            continue
        return Rank2Point(spec, (x0, x1, x2, x3), ys)
    return None


class TestEvaluationWindows:
    def test_kronecker_window_pattern(self):
        spec = Rank2Spec(2, 2)
        p = Rank2Point(spec, (QI.zero(), QI.i(), QI.zero(), QI.gaussian(0, -1)))
        ev = extend_evaluation(p, 6)
        for i in range(-6, 10):
            if i % 2 == 0:
                assert ev[i].is_zero
            elif i % 4 == 1:
                assert ev[i] == QI.i()
            else:
                assert ev[i] == QI.gaussian(0, -1)

    def test_2_1_odd_killing_window(self):
        [(p, parity)] = deep_points(Rank2Spec(2, 1), QQ)
        assert parity == "odd"
        ev = extend_evaluation(p, 6)
        for i in range(-6, 10):
            if i % 2 == 1:
                assert ev[i].is_zero
            else:
                assert ev[i] == QQ.minus_one()

    def test_type_a2_five_periodicity(self):
        spec = Rank2Spec(1, 1)
        p = mk_point(spec, QQ, [1, 1, 2, 3])
        assert is_valid_point(p)
        ev = extend_evaluation(p, 10)
        for i in range(-10, 9):
            assert ev[i] == ev[i + 5]

    def test_invalid_point_rejected(self):
        spec = Rank2Spec(2, 2)
        p = mk_point(spec, QQ, [0, 0, 1, 1])
        with pytest.raises(InvalidPoint):
            extend_evaluation(p, 4)

    def test_adjacent_values_never_both_vanish(self, rng):
        specs = [Rank2Spec(2, 2), Rank2Spec(3, 1), Rank2Spec(2, 3, 1, (1,), (-1,))]
        for spec in specs:
            for ctx in [QQ, F7]:
                p = random_torus_point(spec, ctx, rng)
                if p is None:
                    continue
                ev = extend_evaluation(p, 5)
                for i in range(-5, 8):
                    assert not (ev[i].is_zero and ev[i + 1].is_zero)

    def test_verify_deep_rejects_torus_point(self, rng):
        spec = Rank2Spec(2, 2)
        p = random_torus_point(spec, F7, rng)
        assert p is not None
        assert not verify_deep(p, N=6)


class TestClosedForm:
    @pytest.mark.parametrize("bc", [(2, 2), (3, 1), (1, 3), (2, 3)])
    @pytest.mark.parametrize("f", [0, 1])
    def test_division_and_closed_form_agree(self, bc, f, rng):
        b, c = bc
        spec = (
            Rank2Spec(b, c)
            if f == 0
            else Rank2Spec(b, c, 1, (rng.choice([-2, -1, 1, 2]),), (rng.choice([-1, 0, 1]),))
        )
        checked = 0
        for _ in range(40):
            p = random_torus_point(spec, F7, rng)
            if p is None:
                continue
            ev = extend_evaluation(p, 6)
            evw = e_vectors(spec, -7, 10)
            for j in range(4, 10):
                div = division_step(spec, evw, p.ys, ev.values, j, -1)
                closed = closed_form_step(spec, evw, p.ys, ev.values, j, -1)
                if div is not None:
                    assert div == closed == ev[j]
                    checked += 1
            for j in range(-6, 0):
                div = division_step(spec, evw, p.ys, ev.values, j, +1)
                closed = closed_form_step(spec, evw, p.ys, ev.values, j, +1)
                if div is not None:
                    assert div == closed == ev[j]
                    checked += 1
        assert checked > 50
