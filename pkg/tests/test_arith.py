import random
from fractions import Fraction

import mpmath
import pytest

from ccrpoly.arith import (
    QQ,
    ZZ,
    ConsistencyError,
    CycloElem,
    CyclotomicRing,
    FpPolynomial,
    LinearSystem,
    MatrixShape,
    MPField,
    PrecisionError,
    PrimeField,
    SingularMatrixError,
    crt_combine,
    is_odd_prime,
    make_context,
    random_primes,
    round_to_integer,
    solve_linear,
    solve_overdetermined,
    to_fraction,
)


class TestRings:

    @pytest.mark.parametrize("p", [0, 1, 2, 9, 1813])
    def test_prime_field_rejects(self, p):
        with pytest.raises(ValueError):
            PrimeField(p)

    def test_prime_field_arithmetic(self):
        field = PrimeField(1811)
        assert field(-1) == 1810
        assert field(Fraction(1, 3)) * 3 % 1811 == 1
        assert field.div(1, 2) == 906
        with pytest.raises(ZeroDivisionError):
            field.div(5, 1811)

    @pytest.mark.parametrize("p", [7, 13, 1811, 1000003])
    def test_sqrt(self, p):
        field = PrimeField(p)
        for a in range(1, 40):
            root = field.sqrt(a)
            if root is None:
                assert pow(a, (p - 1) // 2, p) == p - 1
            else:
                assert root * root % p == a % p

    def test_integer_ring_exact_division(self):
        assert ZZ.div(12, 4) == 3
        with pytest.raises(ArithmeticError):
            ZZ.div(7, 2)
        with pytest.raises(ValueError):
            ZZ(Fraction(1, 2))

    def test_rationals_keep_ints(self):
        assert QQ(Fraction(6, 3)) == 2
        assert isinstance(QQ(Fraction(6, 3)), int)
        assert QQ.div(1, 3) == Fraction(1, 3)

    def test_mp_field_uses_own_context(self):
        field = MPField(200)
        assert field.ctx.prec == 200
        assert make_context(100).prec == 100


class TestCyclotomic:

    def test_sum_of_powers_is_minus_one(self):
        ell = 5
        total = sum((CycloElem.zeta_power(k, ell) for k in range(1, ell)), CycloElem([0], ell))
        assert total == -1

    def test_zeta_order(self):
        zeta = CycloElem.zeta_power(1, 7)
        assert zeta ** 7 == 1
        assert zeta ** 3 != 1

    def test_rational_part(self):
        ring = CyclotomicRing(5, QQ)
        assert ring(4).rational_part() == 4
        with pytest.raises(ConsistencyError):
            CycloElem.zeta_power(2, 5, QQ).rational_part()


class TestRounding:

    @pytest.mark.parametrize("value,expected", [(Fraction(7, 1), 7), (3, 3), (Fraction(-21, 2) + Fraction(1, 2), -10)])
    def test_exact_values(self, value, expected):
        assert round_to_integer(value) == expected

    def test_mp_value(self):
        ctx = make_context(128)
        assert round_to_integer(ctx.mpf(1000320) + ctx.mpf(2) ** -60) == 1000320
        assert round_to_integer(ctx.mpc(-534159360, 3)) == -534159360

    @pytest.mark.parametrize("value,expected", [("-7224", -7224), ("-1.0000001", -1), ("-534159360.00000003", -534159360)])
    def test_negative_mp_value(self, value, expected):
        ctx = make_context(128)
        assert round_to_integer(ctx.mpf(value)) == expected

    @pytest.mark.parametrize("value,expected", [
        ("-2.5", Fraction(-5, 2)),
        ("2.5", Fraction(5, 2)),
        ("-0.375", Fraction(-3, 8)),
        ("0", Fraction(0)),
    ])
    def test_to_fraction_keeps_sign(self, value, expected):
        assert to_fraction(make_context(64).mpf(value)) == expected

    def test_to_fraction_rejects_infinity(self):
        with pytest.raises(ValueError):
            to_fraction(mpmath.inf)

    def test_far_from_integer(self):
        ctx = make_context(128)
        with pytest.raises(PrecisionError) as err:
            round_to_integer(ctx.mpf("0.25"))
        assert err.value.value == ctx.mpf("0.25")


class TestLinearSystems:

    def test_lower_triangular(self):
        system = LinearSystem([[1, 0, 0], [2, 1, 0], [3, 4, 1]], [1, 4, 15], ZZ, MatrixShape.LOWER)
        assert solve_linear(system) == [1, 2, 4]

    def test_upper_triangular_rational(self):
        system = LinearSystem([[2, 1], [0, 3]], [1, 1], QQ, MatrixShape.UPPER)
        assert solve_linear(system) == [Fraction(1, 3), Fraction(1, 3)]

    def test_general_rational(self):
        system = LinearSystem([[0, 1], [3, 1]], [2, 5], QQ)
        assert solve_linear(system) == [1, 2]

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            solve_linear(LinearSystem([[1, 2], [2, 4]], [1, 2], QQ))
        with pytest.raises(SingularMatrixError) as err:
            solve_linear(LinearSystem([[1, 0], [1, 0]], [1, 1], QQ, MatrixShape.UPPER))
        assert err.value.pivot == 1

    def test_overdetermined_consistent(self):
        rows = [[1, 1], [1, -1], [2, 3], [5, 7]]
        rhs = [3, -1, 8, 19]
        assert solve_overdetermined(LinearSystem(rows, rhs, QQ)) == [1, 2]

    def test_overdetermined_inconsistent(self):
        rows = [[1, 1], [1, -1], [2, 3]]
        with pytest.raises(ConsistencyError):
            solve_overdetermined(LinearSystem(rows, [3, -1, 9], QQ))
        with pytest.raises(ConsistencyError):
            solve_overdetermined(LinearSystem(rows, [3, -1, 9], PrimeField(101)))

    def test_mod_p(self):
        field = PrimeField(1811)
        solution = solve_overdetermined(LinearSystem([[2, 1], [1, 1], [3, 2]], [5, 3, 8], field))
        assert solution == [2, 1]

    def test_float(self):
        field = MPField(128)
        solution = solve_linear(LinearSystem([[2, 1], [1, 3]], [3, 4], field))
        assert mpmath.almosteq(solution[0], 1, 1e-30)
        assert mpmath.almosteq(solution[1], 1, 1e-30)

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            LinearSystem([[1, 2], [3]], [1, 2])
        with pytest.raises(ValueError):
            LinearSystem([[1, 2]], [1, 2])
        with pytest.raises(ValueError):
            solve_linear(LinearSystem([[1, 2]], [1]))


class TestChineseRemainder:

    def test_symmetric_range(self):
        assert crt_combine([2, 3], [5, 7]) == 17
        assert crt_combine([4, 6], [5, 7]) == -1
        assert crt_combine([-80 % 101, -80 % 103], [101, 103]) == -80

    def test_round_trip(self):
        primes = random_primes(10, 30, seed=11)
        modulus = 1
        for p in primes:
            modulus *= p
        rng = random.Random(12)
        for _ in range(1000):
            x = rng.randrange(-(modulus // 2) + 1, modulus // 2)
            assert crt_combine([x % p for p in primes], primes) == x

    def test_s6_coefficient(self):
        primes = random_primes(10, 30, seed=13)
        assert crt_combine([-534159360 % p for p in primes], primes) == -534159360

    @pytest.mark.parametrize("moduli", [[5, 5], [6, 9]])
    def test_bad_moduli(self, moduli):
        with pytest.raises(ValueError):
            crt_combine([1, 1], moduli)

    def test_random_primes(self):
        primes = random_primes(5, 20, exclude=[5], seed=3)
        assert len(set(primes)) == 5
        assert all(p.bit_length() == 20 and is_odd_prime(p) for p in primes)
        assert primes == random_primes(5, 20, exclude=[5], seed=3)

    @pytest.mark.parametrize("n,expected", [(2, False), (3, True), (9, False), (1811, True)])
    def test_is_odd_prime(self, n, expected):
        assert is_odd_prime(n) is expected


class TestFpPolynomial:

    def test_divmod(self):
        p = 13
        a = FpPolynomial([1, 2, 3, 4], p)
        b = FpPolynomial([5, 1], p)
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.degree < b.degree

    def test_inverse_mod(self):
        p = 1811
        g = FpPolynomial([3, 7, 1], p)
        modulus = g * FpPolynomial([0, 0, 1, 1], p) + 1
        assert (g * g.inverse_mod(modulus)) % modulus == 1

    def test_roots(self):
        p = 1811
        poly = FpPolynomial([1], p)
        for r in (5, 77, 1000):
            poly = poly * FpPolynomial([-r, 1], p)
        poly = poly * FpPolynomial([1, 0, 1], p)
        assert poly.roots() == [5, 77, 1000]
        assert all(poly(r) == 0 for r in poly.roots())

    def test_gcd_is_monic(self):
        p = 101
        a = FpPolynomial([-2, 1], p) * FpPolynomial([-3, 1], p) * 5
        b = FpPolynomial([-2, 1], p) * FpPolynomial([7, 1], p) * 3
        assert a.gcd(b) == FpPolynomial([-2, 1], p)
