import itertools
import math

import numpy as np
import pytest

from opshift.errors import ValidationError
from opshift.functions import (
    GaussianFunction,
    PolynomialFunction,
    bump,
    class_membership,
    divided_difference,
    leibniz_weighted_sup_bound,
    peano_kernel,
    rational_from_poles,
    weight_multiply,
)
from opshift.piecewise import integral_against_derivative
from opshift.ensembles import rng_stream


def recursive_divided_difference(values, nodes):
    """Independent oracle: the plain recursion for pairwise distinct nodes."""
    table = list(values)
    xs = list(nodes)
    n = len(xs)
    for j in range(1, n):
        table = [
            (table[i + 1] - table[i]) / (xs[i + j] - xs[i]) for i in range(n - j)
        ]
    return table[0]


class TestDividedDifference:
    def test_quadratic_is_one(self):
        f = PolynomialFunction((0.0, 0.0, 1.0))
        for nodes in ([0.0, 1.0, 2.0], [-3.1, 0.4, 7.7], [1.0, 1.0, 1.0]):
            assert divided_difference(f, nodes) == pytest.approx(1.0)

    def test_weight_function_column(self):
        u = PolynomialFunction((-1j, 1.0))
        assert divided_difference(u, [0.2, 5.1]) == pytest.approx(1.0)
        for count in (3, 4, 5):
            nodes = np.linspace(-1, 1, count)
            assert abs(divided_difference(u, nodes)) < 1e-14

    def test_confluent_first_derivative(self):
        g = GaussianFunction(0.0, 1.0)
        val = divided_difference(g, [0.0, 0.0])
        assert val == pytest.approx(complex(g.eval_deriv(1, 0.0)))

    def test_matches_recursion_on_distinct_nodes(self):
        rng = rng_stream(3, 0)
        f = rational_from_poles([2j, -1 - 1j, 1 + 2j])
        for _ in range(20):
            nodes = np.sort(rng.uniform(-2, 2, 4))
            while np.min(np.diff(nodes)) < 1e-3:
                nodes = np.sort(rng.uniform(-2, 2, 4))
            oracle = recursive_divided_difference([complex(f.eval_deriv(0, x)) for x in nodes], nodes)
            assert divided_difference(f, nodes) == pytest.approx(oracle, rel=1e-10)

    def test_permutation_invariance(self):
        rng = rng_stream(4, 0)
        f = rational_from_poles([1j, -2j, 1 + 1j])
        nodes = list(rng.uniform(-2, 2, 4))
        base = divided_difference(f, nodes)
        for perm in itertools.permutations(nodes):
            val = divided_difference(f, perm)
            assert abs(val - base) <= 1e-10 * (1.0 + abs(base))

    def test_leibniz_rule_with_weight(self):
        # (g u)^[m](l0..lm) = g^[m](l0..lm) u(lm) + g^[m-1](l0..l_{m-1})
        rng = rng_stream(5, 0)
        g = rational_from_poles([2j, -1 - 1.5j])
        for _ in range(10):
            nodes = list(rng.uniform(-2, 2, 4))
            gu = weight_multiply(g, 1)
            lhs = divided_difference(gu, nodes)
            rhs = divided_difference(g, nodes) * (nodes[-1] - 1j) + divided_difference(g, nodes[:-1])
            assert abs(lhs - rhs) <= 1e-10 * (1.0 + abs(lhs))

    def test_swap_identity_each_slot(self):
        # g^[m] = (gu)^[m] u^-1(lj) - g^[m-1](without j) u^-1(lj)
        rng = rng_stream(6, 0)
        g = rational_from_poles([1j, 1 - 2j, -1 + 1j])
        gu = weight_multiply(g, 1)
        for _ in range(5):
            nodes = list(rng.uniform(-2, 2, 4))
            lhs = divided_difference(g, nodes)
            for j in range(len(nodes)):
                uinv = 1.0 / (nodes[j] - 1j)
                rest = nodes[:j] + nodes[j + 1 :]
                rhs = divided_difference(gu, nodes) * uinv - divided_difference(g, rest) * uinv
                assert abs(lhs - rhs) <= 1e-10 * (1.0 + abs(lhs))

    def test_insufficient_smoothness_at_kink(self):
        f = bump(-1.0, 1.0, smoothness=2)
        with pytest.raises(ValidationError):
            divided_difference(f, [1.0, 1.0, 1.0, 1.0, 1.0])


class TestWeightMultiply:
    def test_gaussian_leibniz(self):
        g = GaussianFunction(0.4, 1.2)
        gu = weight_multiply(g, 1)
        for x in (-1.0, 0.3, 2.2):
            expect = complex(g.eval_deriv(1, x)) * (x - 1j) + complex(g.eval_deriv(0, x))
            assert complex(gu.eval_deriv(1, x)) == pytest.approx(expect)

    def test_rational_decay_bookkeeping(self):
        f = rational_from_poles([2j, 2j, 2j])  # (x-2i)^-3
        fw = weight_multiply(f, 2)
        assert fw.decay_order == 1
        xs = np.array([50.0, 100.0, 200.0])
        vals = np.abs(fw.eval_deriv(0, xs))
        assert np.all(vals * xs < 2.0)  # decays like 1/x
        assert np.all(vals < 1.0)  # stays bounded

    def test_bump_support_unchanged(self):
        f = bump(-1.0, 1.0, smoothness=4)
        fw = weight_multiply(f, 5)
        assert fw.support == (-1.0, 1.0)
        assert fw.eval_deriv(0, 1.5) == 0.0
        assert fw.eval_deriv(0, -1.0) == 0.0

    def test_weight_power_bookkeeping(self):
        f = GaussianFunction(0.0, 1.0)
        assert weight_multiply(f, 3).weight_power == 3
        with pytest.raises(ValidationError):
            weight_multiply(f, -1)


class TestClassMembership:
    def test_pole_product_matches_weight(self):
        for k in (0, 1, 3):
            poles = [complex(j, 1 + j) for j in range(k + 1)]
            f = rational_from_poles(poles)
            for n in (0, 2, 5):
                assert class_membership(f, n, k).member

    def test_insufficient_decay_rejected(self):
        f = rational_from_poles([2j])  # decay order 1
        dec = class_membership(f, 2, 1)
        assert not dec.member
        assert "decay" in dec.reason

    def test_gaussian_always_member(self):
        g = GaussianFunction(1.0, 0.7, (1.0, 2.0))
        for n, k in ((0, 0), (3, 10), (6, 15)):
            assert class_membership(g, n, k).member

    def test_constant_not_member(self):
        one = PolynomialFunction((1.0,))
        dec = class_membership(one, 0, 1)
        assert not dec.member

    def test_bump_requires_smoothness(self):
        f = bump(-1.0, 1.0, smoothness=3)
        assert class_membership(f, 2, 7).member
        assert not class_membership(f, 3, 0).member

    def test_decay_proxy_of_weighted_derivatives(self):
        # members have f^(m) u^l vanishing at infinity for l <= k
        f = rational_from_poles([1j + j for j in range(4)])
        assert class_membership(f, 2, 3).member
        xs = np.array([10.0, 40.0, 160.0])
        for m in range(3):
            for l in range(4):
                vals = np.abs(f.eval_deriv(m, xs) * (xs - 1j) ** l)
                assert vals[-1] < vals[0] or vals[-1] < 1e-12


class TestPeanoKernel:
    def test_two_nodes_indicator(self):
        k = peano_kernel([0.0, 1.0])
        assert k(0.5) == pytest.approx(1.0)
        assert complex(k.lebesgue_integral()) == pytest.approx(1.0)

    def test_hat_from_divided_difference_oracle(self):
        # solve integral of f'' * kernel = f^[2] for f = x^2, x^3
        k = peano_kernel([0.0, 1.0, 2.0])
        assert complex(k.lebesgue_integral()) == pytest.approx(0.5)
        assert k(1.0) == pytest.approx(0.5)
        f2 = PolynomialFunction((0.0, 0.0, 1.0))
        f3 = PolynomialFunction((0.0, 0.0, 0.0, 1.0))
        assert integral_against_derivative(f2, 2, k) == pytest.approx(
            divided_difference(f2, [0.0, 1.0, 2.0])
        )
        assert integral_against_derivative(f3, 2, k) == pytest.approx(
            divided_difference(f3, [0.0, 1.0, 2.0])
        )

    def test_taylor_remainder_kernel(self):
        # n repeated zeros and one v: density (v-x)^(n-1)/((n-1)! v^n)
        for n, v in ((2, 1.0), (3, 1.0), (4, 2.0)):
            k = peano_kernel([0.0] * n + [v])
            xs = np.linspace(0.01, v - 0.01, 9)
            expect = (v - xs) ** (n - 1) / (math.factorial(n - 1) * v**n)
            assert np.max(np.abs(k(xs) - expect)) < 1e-12

    def test_all_equal_nodes_atom(self):
        k = peano_kernel([1.3, 1.3, 1.3])
        assert k.atoms == ((1.3, 0.5),)

    def test_kernel_consistency_random(self):
        rng = rng_stream(7, 0)
        funcs = [
            rational_from_poles([2j, -1 - 1j, 1 + 2j]),
            GaussianFunction(0.2, 1.1),
            PolynomialFunction((1.0, -0.5, 2.0, 0.25, 0.125)),
        ]
        for trial in range(100):
            f = funcs[trial % len(funcs)]
            p = int(rng.integers(1, 5))
            nodes = rng.uniform(-2, 2, p + 1)
            if rng.uniform() < 0.3:
                nodes[0] = nodes[-1]  # exercise repeated knots
            k = peano_kernel(nodes)
            val = integral_against_derivative(f, p, k)
            dd = divided_difference(f, nodes)
            assert abs(val - dd) <= 1e-9 * (1.0 + abs(dd))


class TestWeightedSupBound:
    def test_bound_over_bump_family(self):
        rng = rng_stream(8, 0)
        a = 2.0
        n, k = 4, 3
        for trial in range(6):
            pre = tuple(rng.standard_normal(3))
            f = bump(-a + 0.2, a - 0.2, smoothness=n + 1, prefactor=pre)
            fw = weight_multiply(f, k)
            sup_fn = f.sup_deriv(n)
            for p in range(n + 1):
                c = leibniz_weighted_sup_bound(n, k, a, p)
                assert fw.sup_deriv(p) <= c * sup_fn * (1.0 + 1e-9)
