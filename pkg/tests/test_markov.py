import itertools
import random

import pytest

from deeplocus.field import QI, QQ, prime_field
from deeplocus.markov import (
    ClusterRestriction,
    InvalidPoint,
    MarkovUpperPoint,
    SearchTooLarge,
    TreeNode,
    ZeroDenominator,
    classify_deep_upper,
    enumerate_deep_upper,
    explore_and_verify,
    markov_element,
    markov_residual,
    mutate_upper,
    restrict_to_cluster_algebra,
)

from conftest import F2, F3, F5, F7, random_value


def pt(ctx, x, y, z, M):
    return MarkovUpperPoint(*(ctx.from_int(v) for v in (x, y, z, M)))


class TestResidualAndElement:
    def test_markov_triple_111(self):
        assert markov_residual(pt(QQ, 1, 1, 1, 3)).is_zero

    def test_origin_line(self):
        for a in range(-3, 4):
            assert markov_residual(pt(QQ, 0, 0, 0, a)).is_zero

    def test_non_point(self):
        assert markov_residual(pt(QQ, 1, 1, 1, 1)) == QQ.from_int(-2)

    def test_markov_element(self):
        one = QQ.one()
        assert markov_element(one, one, one) == QQ.from_int(3)
        assert markov_element(one, one, QQ.from_int(2)) == QQ.from_int(3)
        with pytest.raises(ZeroDenominator):
            markov_element(QQ.zero(), one, one)


class TestMutation:
    def test_markov_triples(self):
        three = QQ.from_int(3)
        node = TreeNode((), (QQ.one(), QQ.one(), QQ.one()))
        node = mutate_upper(node, three, "x")
        assert [v._v for v in node.values] == [2, 1, 1]
        node = mutate_upper(node, three, "y")
        assert [v._v for v in node.values] == [2, 5, 1]

    def test_type_x_absorbs(self):
        node = TreeNode((), (F5.zero(), F5.one(), F5.from_int(2)))
        out = mutate_upper(node, F5.zero(), "x")
        assert out.values[0].is_zero

    def test_involution(self, rng):
        for _ in range(20):
            vals = tuple(random_value(QQ, rng) for _ in range(3))
            M = random_value(QQ, rng)
            node = TreeNode((), vals)
            for d in "xyz":
                back = mutate_upper(mutate_upper(node, M, d), M, d)
                assert back.values == vals and back.path == ()

    def test_path_reduction(self):
        three = QQ.from_int(3)
        node = TreeNode((), (QQ.one(), QQ.one(), QQ.one()))
        a = mutate_upper(node, three, "x")
        assert a.path == ("x",)
        b = mutate_upper(a, three, "y")
        assert b.path == ("x", "y")
        c = mutate_upper(b, three, "y")
        assert c.path == ("x",) and c.values == a.values


class TestClassification:
    def test_type_a(self):
        t = classify_deep_upper(pt(QQ, 0, 0, 0, 7))
        assert t.tag == "A" and t.alpha == QQ.from_int(7)

    def test_type_x_over_f5(self):
        t = classify_deep_upper(pt(F5, 0, 1, 2, 0))
        assert t.tag == "X" and (t.beta._v, t.gamma._v) == (1, 2)

    def test_torus_point_is_none(self):
        assert classify_deep_upper(pt(QQ, 1, 1, 1, 3)) is None

    def test_m_nonzero_kills_deepness(self):
        # valid point with x = 0 vanishing pair but M != 0: first mutation
        # of x is y*z*M != 0, so some cluster has no zero
        p = pt(F5, 0, 1, 2, 3)
        assert markov_residual(p).is_zero
        assert classify_deep_upper(p) is None

    def test_origin_reported_as_a(self):
        t = classify_deep_upper(pt(QQ, 0, 0, 0, 0))
        assert t.tag == "A"

    def test_invalid_point_rejected(self):
        with pytest.raises(InvalidPoint):
            classify_deep_upper(pt(QQ, 1, 1, 1, 1))

    def test_types_over_qi(self):
        p = MarkovUpperPoint(QI.zero(), QI.one(), QI.i(), QI.zero())
        t = classify_deep_upper(p)
        assert t.tag == "X"


class TestEnumeration:
    def test_f5_count(self):
        deep = enumerate_deep_upper(F5)
        assert len(deep) == 29
        tags = [classify_deep_upper(p).tag for p in deep]
        assert tags.count("A") == 5
        # 8 nonzero solutions each for X/Y/Z; the origin is counted as A
        assert tags.count("X") == 8 and tags.count("Y") == 8 and tags.count("Z") == 8

    def test_f3_collapses_to_type_a(self):
        deep = enumerate_deep_upper(F3)
        assert len(deep) == 3
        assert all(classify_deep_upper(p).tag == "A" for p in deep)

    def test_f2_count_matches_families(self):
        deep = enumerate_deep_upper(F2)
        # chi^2 + gamma^2 = (chi+gamma)^2 over F2: X/Y/Z give one nonzero
        # point each, plus 2 type-A points
        assert len(deep) == 5

    def test_f7_matches_family_parameterization(self):
        deep = enumerate_deep_upper(F7)
        expected = set()
        for alpha in F7.elements():
            expected.add((0, 0, 0, alpha._v))
        roots = [r for r in F7.elements() if (r * r + F7.one()).is_zero]
        for beta in F7.nonzero_elements():
            for r in roots:
                g = (beta * r)._v
                expected.add((0, beta._v, g, 0))
                expected.add((beta._v, 0, g, 0))
                expected.add((beta._v, g, 0, 0))
        got = {(p.x._v, p.y._v, p.z._v, p.M._v) for p in deep}
        assert got == expected

    def test_scan_guard(self):
        with pytest.raises(SearchTooLarge):
            enumerate_deep_upper(prime_field(103))
        with pytest.raises(SearchTooLarge):
            enumerate_deep_upper(QQ)


class TestOverGaussianRationals:
    def test_seven_line_structure(self):
        # with a square root of -1 the pair condition splits into two
        # lines per killed type, plus the all-zero line: seven total,
        # meeting only at the origin
        i = QI.i()
        zero, one, two = QI.zero(), QI.one(), QI.from_int(2)
        lines = {
            "A": lambda s: MarkovUpperPoint(zero, zero, zero, s),
            "X+": lambda s: MarkovUpperPoint(zero, s, i * s, zero),
            "X-": lambda s: MarkovUpperPoint(zero, s, -(i * s), zero),
            "Y+": lambda s: MarkovUpperPoint(s, zero, i * s, zero),
            "Y-": lambda s: MarkovUpperPoint(s, zero, -(i * s), zero),
            "Z+": lambda s: MarkovUpperPoint(s, i * s, zero, zero),
            "Z-": lambda s: MarkovUpperPoint(s, -(i * s), zero, zero),
        }
        assert len(lines) == 7
        samples = {}
        for name, line in lines.items():
            for s in (one, two):
                p = line(s)
                t = classify_deep_upper(p)
                assert t is not None and t.tag == name[0]
                samples[(name, str(s._v))] = (p.x, p.y, p.z, p.M)
            origin = line(zero)
            assert classify_deep_upper(origin).tag == "A"
        # distinct lines meet only at the origin
        assert len(set(samples.values())) == len(samples)

    def test_multiple_points_over_one_cluster_but_one_deep(self):
        # (x,y,z) = (0,1,i) extends to a valid point for every M, but only
        # M = 0 is deep
        for m_int in range(-2, 3):
            p = MarkovUpperPoint(QI.zero(), QI.one(), QI.i(), QI.from_int(m_int))
            assert markov_residual(p).is_zero
            t = classify_deep_upper(p)
            if m_int == 0:
                assert t is not None and t.tag == "X"
            else:
                assert t is None


class TestRestriction:
    def test_type_a_collapses(self):
        r5 = restrict_to_cluster_algebra(pt(QQ, 0, 0, 0, 5))
        r7 = restrict_to_cluster_algebra(pt(QQ, 0, 0, 0, 7))
        assert r5 == r7 == ClusterRestriction("all-zero")

    def test_xyz_injective_off_origin(self):
        reps = {
            restrict_to_cluster_algebra(p)
            for p in enumerate_deep_upper(F5)
            if classify_deep_upper(p).tag != "A"
        }
        assert len(reps) == 24

    def test_x_vs_y_distinct(self):
        rx = restrict_to_cluster_algebra(pt(F5, 0, 1, 2, 0))
        ry = restrict_to_cluster_algebra(pt(F5, 1, 0, 2, 0))
        assert rx != ry


class TestExploration:
    def test_torus_point_m_invariance(self):
        report = explore_and_verify(pt(QQ, 1, 1, 1, 3), depth=6)
        assert report.passed
        assert report.nodes_visited == 1 + 3 * (2**6 - 1)
        assert all(m == QQ.from_int(3) for m in report.markov_element_values.values())

    def test_type_x_kills_only_x(self):
        report = explore_and_verify(pt(F5, 0, 1, 2, 0), depth=6)
        assert report.passed

    def test_type_a_absorbs(self):
        report = explore_and_verify(pt(QQ, 0, 0, 0, 4), depth=4)
        assert report.passed

    def test_all_f5_deep_points_verify(self):
        for p in enumerate_deep_upper(F5):
            assert explore_and_verify(p, depth=4).passed

    def test_random_torus_points(self, rng):
        for _ in range(20):
            x = random_value(F7, rng, nonzero=True)
            y = random_value(F7, rng, nonzero=True)
            z = random_value(F7, rng, nonzero=True)
            M = markov_element(x, y, z)
            p = MarkovUpperPoint(x, y, z, M)
            assert markov_residual(p).is_zero
            assert explore_and_verify(p, depth=5).passed

    def test_same_cluster_same_type_agree_everywhere(self):
        # deep points agreeing on one cluster agree everywhere; the
        # finite-depth check retraces a walk from a non-root cluster
        p = pt(F5, 0, 1, 2, 0)
        node = TreeNode((), p.values())
        walked = mutate_upper(mutate_upper(node, p.M, "y"), p.M, "z")
        q = MarkovUpperPoint(*walked.values, p.M)
        back = TreeNode((), q.values())
        back = mutate_upper(mutate_upper(back, q.M, "z"), q.M, "y")
        assert back.values == p.values()

    def test_distinct_parameters_differ(self):
        r1 = explore_and_verify(pt(F5, 0, 1, 2, 0), depth=3)
        r2 = explore_and_verify(pt(F5, 0, 2, 4, 0), depth=3)
        assert r1.passed and r2.passed
        assert r1.point != r2.point
