import random
from fractions import Fraction

import numpy as np
import pytest

from ccrpoly.arith import QQ, ConsistencyError, PrimeField
from ccrpoly.polynomials import (
    Kind,
    MalformedFileError,
    MultiplicationCounter,
    SparsePoly,
    WeightedPoly,
    count_N23,
    count_N123,
    fit_weighted_form,
    height_stats,
    naive_multiplication_count,
    newton_to_coeffs,
    pippenger_batch,
    power_sums_from_coeffs,
    read_polynomial,
    write_polynomial,
    xyz_monomials,
    yz_monomials,
)

U3_TERMS = {(4, 0, 0): 1, (2, 1, 0): 2, (1, 0, 1): 4, (0, 2, 0): Fraction(-1, 3)}
U5_TERMS = {(6, 0, 0): 1, (4, 1, 0): 20, (3, 0, 1): 160, (2, 2, 0): -80, (1, 1, 1): -128, (0, 0, 2): -80}


def u3():
    return WeightedPoly.ccr(Kind.U, 3, U3_TERMS)


def u5():
    return WeightedPoly.ccr(Kind.U, 5, U5_TERMS)


class TestMonomialCounts:

    @pytest.mark.parametrize("n", range(0, 40))
    def test_n123_matches_enumeration(self, n):
        assert count_N123(n) == len(xyz_monomials(n))

    @pytest.mark.parametrize("n", range(0, 40))
    def test_n23_matches_enumeration(self, n):
        assert count_N23(n) == len(yz_monomials(n))

    @pytest.mark.parametrize("n,expected", [(1, 0), (6, 2), (12, 3), (18, 4), (5, 1)])
    def test_n23_values(self, n, expected):
        assert count_N23(n) == expected

    def test_negative(self):
        with pytest.raises(ValueError):
            count_N123(-1)
        with pytest.raises(ValueError):
            count_N23(-2)

    def test_canonical_order(self):
        assert yz_monomials(6) == [(3, 0), (0, 2)]
        assert xyz_monomials(4, 1, 2) == [(2, 1, 0), (1, 0, 1), (0, 2, 0)]
        assert xyz_monomials(8, 2)[0] == (4, 0, 0)


class TestPippenger:

    def test_values(self):
        monomials = yz_monomials(30)
        values = pippenger_batch(3, 5, monomials)
        assert values == [3 ** a * 5 ** b for a, b in monomials]

    def test_modular(self):
        p = 1811
        monomials = [(0, 0), (2, 3), (5, 0)]
        values = pippenger_batch(1582, 902, monomials, 1, lambda u, v: u * v % p)
        assert values == [1, pow(1582, 2, p) * pow(902, 3, p) % p, pow(1582, 5, p)]

    def test_fewer_multiplications(self):
        monomials = yz_monomials(60)
        counter = MultiplicationCounter()
        pippenger_batch(2, 3, monomials, counter=counter)
        assert counter.count < naive_multiplication_count(monomials)

    def test_trivial_and_weight_six(self):
        assert pippenger_batch(7, 11, [(0, 0)]) == [1]
        assert pippenger_batch(7, 11, yz_monomials(6)) == [7 ** 3, 11 ** 2]

    def test_chain_is_shared(self):
        counter = MultiplicationCounter()
        assert pippenger_batch(3, 5, [(8, 0), (4, 0)], counter=counter) == [3 ** 8, 3 ** 4]
        # Y^2, Y^4 = (Y^2)^2, Y^8 = Y^4 Y^4
        assert counter.count == 3

    def test_mixed_monomials_reuse_pairs(self):
        counter = MultiplicationCounter()
        monomials = [(1, 1), (2, 2), (3, 3), (3, 2)]
        assert pippenger_batch(2, 3, monomials, counter=counter) == [2 ** a * 3 ** b for a, b in monomials]
        assert counter.count == 4

    def test_all_monomials_for_ell_23(self):
        rng = random.Random(23)
        y = rng.getrandbits(256)
        z = rng.getrandbits(256)
        monomials = [m for weight in range(25) for m in yz_monomials(weight)]
        counter = MultiplicationCounter()
        assert pippenger_batch(y, z, monomials, counter=counter) == [y ** a * z ** b for a, b in monomials]
        assert counter.count < naive_multiplication_count(monomials)
        assert counter.count <= len(set(monomials))


class TestSparsePoly:

    def test_arithmetic(self):
        y = SparsePoly.variable(0, 2)
        z = SparsePoly.variable(1, 2)
        p = (y + z) ** 2 - y * y
        assert p == SparsePoly({(1, 1): 2, (0, 2): 1}, 2)
        assert (p - p).is_zero()
        assert p.weighted_degrees((2, 3)) == {5, 6}
        assert p.degree(1) == 2

    def test_divide_scalar_mod_p(self):
        field = PrimeField(7)
        p = SparsePoly({(1, 0): 3}, 2, field).divide_scalar(2)
        assert p.coefficient((1, 0)) == 5


class TestNewton:

    def test_roots_1_2_3(self):
        assert newton_to_coeffs([6, 14, 36], 3) == [-6, 11, -6, 1]

    def test_round_trip(self):
        coeffs = [Fraction(-1, 3), 4, 2, 0, 1]
        sums = power_sums_from_coeffs(coeffs, 4)
        assert newton_to_coeffs(sums, 4) == coeffs

    def test_random_round_trips(self):
        rng = random.Random(100)
        for _ in range(100):
            degree = rng.randint(1, 12)
            coeffs = [rng.randint(-1000, 1000) for _ in range(degree)] + [1]
            sums = power_sums_from_coeffs(coeffs, degree)
            assert newton_to_coeffs(sums, degree) == coeffs

    def test_random_integer_roots(self):
        rng = random.Random(101)
        for _ in range(100):
            roots = [rng.randint(-9, 9) for _ in range(rng.randint(1, 12))]
            coeffs = [1]
            for root in roots:
                shifted = [0] + coeffs
                coeffs = [shifted[i] - root * (coeffs[i] if i < len(coeffs) else 0) for i in range(len(shifted))]
            sums = [sum(x ** k for x in roots) for k in range(1, len(roots) + 1)]
            assert newton_to_coeffs(sums, len(roots)) == coeffs
            assert power_sums_from_coeffs(coeffs, len(roots)) == sums

    def test_small_characteristic(self):
        with pytest.raises(ValueError):
            newton_to_coeffs([1, 2, 3], 3, PrimeField(3))

    def test_too_few_sums(self):
        with pytest.raises(ValueError):
            newton_to_coeffs([1, 2], 3)

    def test_polynomial_sums(self):
        y = SparsePoly.variable(0, 2)
        coeffs = newton_to_coeffs([SparsePoly({}, 2), y * -4], 2)
        assert coeffs[0] == y * 2
        assert coeffs[1] == 0


class TestWeightedPoly:

    def test_checks(self):
        with pytest.raises(ValueError):
            WeightedPoly.ccr(Kind.U, 3, {(4, 0, 0): 2})
        with pytest.raises(ValueError):
            WeightedPoly.ccr(Kind.U, 3, {(4, 0, 0): 1, (3, 0, 0): 1})
        with pytest.raises(ValueError):
            WeightedPoly.ccr(Kind.U, 3, {(4, 0, 0): 1, (1, 1, 0): 1})
        with pytest.raises(ValueError):
            WeightedPoly.numerator("C", 3, {})

    def test_kind_weights(self):
        v3 = WeightedPoly.ccr(Kind.V, 3, {(4, 0, 0): 1})
        assert v3.weight == 8
        assert WeightedPoly.numerator("B", 5, {(5, 0, 1): 1}).weight == 8

    def test_cusp_factorization(self):
        # U_5(X, -3, -2) = (X - 10)(X + 2)^5
        poly = u5()
        assert poly.evaluate(10, -3, -2) == 0
        assert poly.evaluate(-2, -3, -2) == 0
        assert poly.evaluate(0, -3, -2) == -320

    def test_properties(self):
        poly = u3()
        assert poly.x_degree == 4
        assert not poly.is_integral()
        assert poly.denominator() == 3
        mixed = WeightedPoly({(0, 2, 0): Fraction(1, 4), (1, 0, 1): Fraction(1, 6), (4, 0, 0): 1}, 3, 4)
        assert mixed.denominator() == 12
        assert WeightedPoly({}, 3, 4).denominator() == 1
        assert u5().is_integral()
        assert len(poly) == 4

    def test_reduce_mod(self):
        reduced = u3().reduce_mod(7)
        assert reduced.modulus == 7
        assert reduced.coefficient((0, 2, 0)) == 2

    def test_derivative(self):
        derivative = u3().derivative_x()
        assert derivative.weight == 3
        assert derivative.coefficient((3, 0, 0)) == 4
        assert derivative.coefficient((0, 0, 1)) == 4

    def test_text(self):
        assert u3().to_text() == "CCR kind=U ell=3\n4 0 0 1\n2 1 0 2\n1 0 1 4\n0 2 0 -1/3\n"
        assert WeightedPoly.from_text(u3().to_text()) == u3()

    def test_text_with_modulus(self):
        poly = u5().reduce_mod(1811)
        assert poly.to_text().splitlines()[0] == "CCR kind=U ell=5 p=1811"
        assert WeightedPoly.from_text(poly.to_text()) == poly

    def test_json(self):
        assert WeightedPoly.from_json(u5().to_json()) == u5()

    @pytest.mark.parametrize("text,line", [
        ("CCR kind=U ell=3\n4 0 0 1\n2 1 x 2\n", 3),
        ("CCR kind=U ell=3\n# comment\n4 0 0 1\n2 1 0\n", 4),
        ("CCR kind=U\n4 0 0 1\n", 1),
        ("CCR kind=U ell=3\n4 0 0 1\n1 1 0 1\n", 1),
        ("", 1),
    ])
    def test_malformed(self, text, line):
        with pytest.raises(MalformedFileError) as err:
            WeightedPoly.from_text(text, "u3.ccr")
        assert err.value.line == line
        assert err.value.path == "u3.ccr"

    def test_bad_json(self):
        with pytest.raises(MalformedFileError):
            WeightedPoly.from_json('{"format": "CCR", "kind": "U"}')

    def test_files(self, tmp_path):
        write_polynomial(u3(), tmp_path / "u3.ccr")
        write_polynomial(u3(), tmp_path / "u3.json", fmt="json")
        assert read_polynomial(tmp_path / "u3.ccr") == u3()
        assert read_polynomial(tmp_path / "u3.json") == u3()
        with pytest.raises(ValueError):
            write_polynomial(u3(), tmp_path / "u3.xml", fmt="xml")


class TestHeights:

    def test_u5(self):
        stats = height_stats(u5())
        assert stats.bits == 36
        assert np.isclose(stats.height, np.log(160))
        assert round(stats.relative_height, 3) == 0.526

    def test_zero(self):
        with pytest.raises(ValueError):
            height_stats(WeightedPoly({}, 5, 6))


class TestFitWeightedForm:

    def test_recovers_form(self):
        p = 101
        points = [(1, 2), (3, 4), (5, 7), (10, 11)]
        values = [(3 * y ** 3 + 5 * z ** 2) % p for y, z in points]
        form = fit_weighted_form(points, values, 6, p)
        assert form == SparsePoly({(3, 0): 3, (0, 2): 5}, 2, PrimeField(p))

    def test_inconsistent(self):
        p = 101
        points = [(1, 2), (3, 4), (5, 7)]
        with pytest.raises(ConsistencyError):
            fit_weighted_form(points, [1, 2, 3], 5, p)

    def test_empty_weight(self):
        assert fit_weighted_form([(1, 2)], [0], 1, 101).is_zero()
        with pytest.raises(ConsistencyError):
            fit_weighted_form([(1, 2)], [4], 1, 101)
