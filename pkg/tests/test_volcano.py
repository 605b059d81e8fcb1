import random

import pytest

from ccrpoly.arith import ConsistencyError, PrimeField
from ccrpoly.ccr import compute_ccr_series
from ccrpoly.polynomials import Kind, MalformedFileError, SparsePoly, WeightedPoly
from ccrpoly.volcano import (
    DATA_DIR_ENV,
    INFINITY,
    ClassPolynomial,
    CraterRow,
    CurveFp,
    IsogenyTriple,
    PointFp,
    VolcanoPrime,
    class_poly_roots,
    check_one_crater,
    class_polynomial_path,
    compute_u_mod_p,
    curve_from_j,
    explore_crater,
    find_volcano_prime,
    interpolate_power_sums,
    load_class_polynomial,
    neighbors,
    parse_class_polynomial,
    point_of_order_ell,
    velu,
    volcano_prime,
)

P = 1811
ELL = 5
D = -71
M = 1800
CRATER_ROOTS = [313, 1073, 1288, 1312, 1402, 1767, 1808]
U5_TERMS = {(6, 0, 0): 1, (4, 1, 0): 20, (3, 0, 1): 160, (2, 2, 0): -80, (1, 1, 1): -128, (0, 0, 2): -80}


@pytest.fixture
def curve():
    return CurveFp(1582, 902, P)


@pytest.fixture(scope="module")
def rows():
    prime = volcano_prime(ELL, D, P)
    return explore_crater(prime, load_class_polynomial(D), seed=1)


class TestCurves:

    @pytest.mark.parametrize("a,b,p", [(0, 0, P), (1, 1, 3), (1, 1, 1813)])
    def test_rejects(self, a, b, p):
        with pytest.raises(ValueError):
            CurveFp(a, b, p)

    def test_reduces_coefficients(self):
        assert CurveFp(1582 + P, 902 - P, P) == CurveFp(1582, 902, P)
        assert str(CurveFp(1582, 902, P)) == "[1582, 902]"

    def test_group_law(self, curve):
        rng = random.Random(3)
        first = curve.random_point(rng)
        second = curve.random_point(rng)
        assert curve.contains(first)
        assert curve.contains(curve.add(first, second))
        assert curve.add(first, curve.neg(first)) == INFINITY
        assert curve.add(first, second) == curve.add(second, first)
        assert curve.mul(3, first) == curve.add(first, curve.add(first, first))
        assert curve.mul(-1, first) == curve.neg(first)

    def test_order(self, curve):
        rng = random.Random(4)
        assert all(curve.mul(M, curve.random_point(rng)).is_infinity for _ in range(10))

    def test_crater_j(self, curve):
        assert curve.j_invariant in CRATER_ROOTS

    def test_twist_keeps_j(self, curve):
        assert curve.twist(3).j_invariant == curve.j_invariant


class TestVolcanoPrimes:

    def test_known_prime(self):
        prime = volcano_prime(ELL, D, P)
        assert (prime.t, prime.v, prime.m) == (12, 2, M)

    def test_search(self):
        assert find_volcano_prime(ELL, D, start=P).p == P

    def test_search_from_below_is_valid(self):
        prime = find_volcano_prime(ELL, D)
        assert prime.p <= P
        assert 4 * prime.p == prime.t ** 2 - ELL ** 2 * prime.v ** 2 * D
        assert (prime.t - 2) % ELL == 0

    @pytest.mark.parametrize("ell,disc,p", [(ELL, D, 1823), (ELL, -70, P), (ELL, 71, P), (4, D, P)])
    def test_rejects(self, ell, disc, p):
        with pytest.raises(ValueError):
            volcano_prime(ell, disc, p)

    def test_invalid_data(self):
        with pytest.raises(ValueError):
            VolcanoPrime(P, ELL, D, 12, 3)
        with pytest.raises(ValueError):
            VolcanoPrime(P, ELL, D, 12, 5)

    def test_empty_range(self):
        with pytest.raises(ValueError):
            find_volcano_prime(ELL, D, start=2, stop=20)


class TestClassPolynomials:

    def test_packaged_h71(self):
        poly = load_class_polynomial(D)
        assert poly.class_number == 7
        assert poly.coeffs[-1] == 1

    def test_roots_mod_1811(self):
        assert class_poly_roots(load_class_polynomial(D).coeffs, P) == CRATER_ROOTS

    def test_no_split(self):
        with pytest.raises(ValueError):
            class_poly_roots(load_class_polynomial(D).coeffs, 7)

    def test_parse(self):
        poly = parse_class_polynomial("# H_-3\nD=-3 h=1\n0\n1\n")
        assert poly == ClassPolynomial(-3, (0, 1))

    @pytest.mark.parametrize("text,line", [
        ("D=-71\n1\n", 1),
        ("D=-7 h=1\n3375\nx\n", 3),
        ("D=-7 h=1\n3375\n2\n", 0),
        ("D=-7 h=2\n3375\n1\n", 0),
        ("# nothing\n", 0),
    ])
    def test_malformed(self, text, line):
        with pytest.raises(MalformedFileError) as err:
            parse_class_polynomial(text, "classpoly_7.txt")
        assert err.value.line == line

    def test_data_dir(self, tmp_path):
        (tmp_path / "classpoly_7.txt").write_text("D=-7 h=1\n3375\n1\n")
        assert load_class_polynomial(-7, tmp_path).coeffs == (3375, 1)
        with pytest.raises(FileNotFoundError):
            load_class_polynomial(-71, tmp_path)

    def test_env_data_dir(self, tmp_path, monkeypatch):
        (tmp_path / "classpoly_7.txt").write_text("D=-3 h=1\n0\n1\n")
        monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
        assert class_polynomial_path(-7) == tmp_path / "classpoly_7.txt"
        with pytest.raises(MalformedFileError):
            load_class_polynomial(-7)

    def test_package_path(self, monkeypatch):
        monkeypatch.delenv(DATA_DIR_ENV, raising=False)
        assert class_polynomial_path(D).name == "classpoly_71.txt"

    def test_bad_discriminant(self):
        with pytest.raises(ValueError):
            load_class_polynomial(-70)


class TestIsogenies:

    def test_curve_from_j(self):
        rng = random.Random(5)
        curve = curve_from_j(1073, M, P, rng)
        assert curve.j_invariant == 1073
        assert all(curve.mul(M, curve.random_point(rng)).is_infinity for _ in range(5))

    @pytest.mark.parametrize("j", [0, 1728])
    def test_curve_from_special_j(self, j):
        with pytest.raises(ValueError):
            curve_from_j(j, M, P)

    def test_curve_from_j_wrong_order(self):
        with pytest.raises(ConsistencyError):
            curve_from_j(1073, M + 5, P)

    def test_point_of_order_ell(self, curve):
        point = point_of_order_ell(curve, ELL, M, random.Random(6))
        assert not point.is_infinity
        assert curve.mul(ELL, point).is_infinity

    def test_point_rejects_non_divisor(self, curve):
        with pytest.raises(ValueError):
            point_of_order_ell(curve, 7, M)

    def test_velu_rejects(self, curve):
        with pytest.raises(ValueError):
            velu(curve, INFINITY, ELL)
        point = point_of_order_ell(curve, ELL, M, random.Random(7))
        with pytest.raises(ValueError):
            velu(curve, point, 3)
        with pytest.raises(ValueError):
            velu(curve, PointFp(0, 0), ELL)

    def test_velu_codomain(self, curve):
        triple = velu(curve, point_of_order_ell(curve, ELL, M, random.Random(8)), ELL)
        assert triple.kernel_sums[0] == 2
        assert CurveFp(triple.a_star, triple.b_star, P).j_invariant == triple.j_star

    def test_neighbors(self, curve):
        result = neighbors(curve, ELL, CRATER_ROOTS, M, random.Random(9))
        assert len(result) == ELL + 1
        assert {t.sigma1 for t in result} == {226, 1542, 1283, 1691, 1212, 1290}
        assert IsogenyTriple(226, 594, 422, CurveFp(594, 422, P).j_invariant) in result
        assert sum(1 for t in result if t.crater) == 2

    def test_neighbors_need_two_horizontal(self, curve):
        with pytest.raises(ConsistencyError):
            neighbors(curve, ELL, [], M, random.Random(9))
        with pytest.raises(ConsistencyError):
            neighbors(curve, ELL, list(range(P)), M, random.Random(9))

    def test_row_power_sums(self, curve):
        row = CraterRow(curve, tuple(neighbors(curve, ELL, CRATER_ROOTS, M, random.Random(10))))
        assert row.power_sums(Kind.U, 6) == [0, 105, 1680, 1379, 756, 772]

    def test_triple_values(self):
        triple = IsogenyTriple(226, 594, 422, 0)
        assert [triple.value(kind) for kind in Kind] == [226, 594, -422]


class TestInterpolation:

    def test_rows(self, rows):
        assert len(rows) == 7
        assert all(len(row.neighbors) == ELL + 1 for row in rows)
        assert all(sum(1 for t in row.neighbors if t.crater) == 2 for row in rows)

    def test_power_sums(self, rows):
        field = PrimeField(P)
        sums = interpolate_power_sums(Kind.U, ELL, rows, P)
        assert sums[0].is_zero()
        assert sums[1] == SparsePoly({(1, 0): 1771}, 2, field)
        assert sums[2] == SparsePoly({(0, 1): 1331}, 2, field)
        assert sums[3] == SparsePoly({(2, 0): 1120}, 2, field)
        assert sums[4] == SparsePoly({(1, 1): 341}, 2, field)
        assert sums[5] == SparsePoly({(3, 0): 1565, (0, 2): 1218}, 2, field)

    def test_one_crater(self, rows):
        check_one_crater(CRATER_ROOTS, rows)
        with pytest.raises(ConsistencyError):
            check_one_crater(CRATER_ROOTS, rows[:1])

    def test_too_few_rows(self, rows):
        with pytest.raises(ValueError):
            interpolate_power_sums(Kind.W, ELL, rows[:3], P)

    def test_foreign_curves(self):
        prime = volcano_prime(ELL, D, P)
        with pytest.raises(ValueError):
            explore_crater(prime, load_class_polynomial(D), curves=[CurveFp(1, 1, P)])


class TestComputeModP:

    def test_u5(self):
        expected = WeightedPoly.ccr(Kind.U, ELL, U5_TERMS).reduce_mod(P)
        assert compute_u_mod_p(Kind.U, ELL, D, P, seed=2) == expected

    @pytest.mark.parametrize("kind", [Kind.V, Kind.W])
    def test_v5_w5(self, kind):
        expected = compute_ccr_series(kind, ELL).reduce_mod(P)
        assert compute_u_mod_p(kind, ELL, D, P, seed=3) == expected

    def test_small_class_number(self):
        with pytest.raises(ValueError):
            compute_u_mod_p(Kind.U, ELL, D, P, class_poly=ClassPolynomial(D, (1, 2, 1)))

    def test_not_a_volcano_prime(self):
        with pytest.raises(ValueError):
            compute_u_mod_p(Kind.U, ELL, D, 1823)
