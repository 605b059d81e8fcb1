"""
Division polynomials f_n of y^2 = x^3 + Ax + B and the direct computation of
the power sums t_k of the abscissas of a cyclic kernel.

f_n is psi_n for odd n and psi_n/(2y) for even n; even-index values therefore
carry a factor 4R = 4(x^3 + Ax + B) whenever psi^2 is needed.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

from .arith import ZZ, FpPolynomial, PrimeField, is_odd_prime
from .polynomials import SparsePoly, power_sums_from_coeffs

logger = logging.getLogger(__name__)

#: Variable indices of the symbolic ring Z[X, A, B].
X, A, B = 0, 1, 2


def _var(index: int) -> SparsePoly:
    return SparsePoly.variable(index, 3, ZZ)


def _recurrence(n: int, f: Callable[[int], Any], r_squared_16: Any) -> Any:
    m = n // 2
    if n % 2:
        if m % 2 == 0:
            return r_squared_16 * f(m + 2) * f(m) ** 3 - f(m - 1) * f(m + 1) ** 3
        return f(m + 2) * f(m) ** 3 - r_squared_16 * f(m - 1) * f(m + 1) ** 3
    return f(m) * (f(m + 2) * f(m - 1) ** 2 - f(m - 2) * f(m + 1) ** 2)


def _small_cases(x: Any, a: Any, b: Any, one: Any) -> dict:
    return {
        -1: -one,
        0: one * 0,
        1: one,
        2: one,
        3: x ** 4 * 3 + a * x ** 2 * 6 + b * x * 12 - a ** 2,
        4: (x ** 6 + a * x ** 4 * 5 + b * x ** 3 * 20 - a ** 2 * x ** 2 * 5 - a * b * x * 4 - b ** 2 * 8 - a ** 3) * 2,
    }


@lru_cache(maxsize=None)
def _symbolic(n: int) -> SparsePoly:
    if n <= 4:
        x, a, b = _var(X), _var(A), _var(B)
        return _small_cases(x, a, b, SparsePoly.constant(1, 3, ZZ))[n]
    x, a, b = _var(X), _var(A), _var(B)
    r = x ** 3 + a * x + b
    return _recurrence(n, _symbolic, r * r * 16)


@dataclass(frozen=True)
class DivPoly:
    """The division polynomial f_n in Z[A, B][X]."""

    #: Index n.
    n: int

    #: f_n as a polynomial in (X, A, B).
    poly: SparsePoly

    @property
    def degree(self) -> int:
        return self.poly.degree(X)

    @property
    def weighted_degrees(self) -> set[int]:
        """Weighted degrees of the monomials for weights (1, 2, 3) on (X, A, B)."""
        return self.poly.weighted_degrees((1, 2, 3))

    def specialize(self, a: int, b: int, p: int) -> FpPolynomial:
        """f_n at the curve (a, b) over GF(p)."""
        coeffs = [0] * (self.degree + 1)
        for (i, j, k), c in self.poly.terms.items():
            coeffs[i] += c * pow(a, j, p) * pow(b, k, p)
        return FpPolynomial(coeffs, p)


def expected_degree(n: int) -> int:
    """deg f_n: (n^2-1)/2 for odd n, (n^2-4)/2 for even n > 0."""
    if n <= 0:
        return -1 if n == 0 else 0
    return (n * n - 1) // 2 if n % 2 else (n * n - 4) // 2


def division_fn(n: int) -> DivPoly:
    """
    The division polynomial f_n over Z[A, B].

    Parameters
    ----------
    n : int
        Index, at least -1.

    """
    if n < -1:
        raise ValueError(f"'n' must be >= -1, got {n}")
    return DivPoly(n, _symbolic(n))


@lru_cache(maxsize=256)
def division_fn_at(n: int, a: int, b: int, p: int) -> FpPolynomial:
    """f_n at the curve y^2 = x^3 + ax + b over GF(p), by the same recurrence."""
    if n < -1:
        raise ValueError(f"'n' must be >= -1, got {n}")
    if n <= 4:
        x = FpPolynomial.x(p)
        return _small_cases(x, a, b, FpPolynomial([1], p))[n]
    x = FpPolynomial.x(p)
    r = x ** 3 + x * a + b
    return _recurrence(n, lambda k: division_fn_at(k, a, b, p), r * r * 16)


def phi_polynomial(n: int) -> SparsePoly:
    """phi_n = X psi_n^2 - psi_{n+1} psi_{n-1}, expressed through the f's."""
    if n < 1:
        raise ValueError(f"'n' must be >= 1, got {n}")
    x = _var(X)
    r4 = (x ** 3 + _var(A) * x + _var(B)) * 4
    f = _symbolic
    if n % 2:
        return x * f(n) ** 2 - r4 * f(n + 1) * f(n - 1)
    return x * r4 * f(n) ** 2 - f(n + 1) * f(n - 1)


def abscissa_multiples(ell: int, a: int, b: int, p: int) -> tuple[FpPolynomial, list[FpPolynomial]]:
    """
    x([j]P) for 1 <= j <= (ell-1)/2 as residues modulo f_ell, where P = (x, y)
    is a generic point of order ell on y^2 = x^3 + ax + b over GF(p).

    Returns
    -------
    modulus : FpPolynomial
        The monic f_ell.
    abscissas : list of FpPolynomial
        x_1 = x, ..., x_d reduced modulo ``modulus``.

    """
    f_ell = division_fn_at(ell, a, b, p).monic()
    x = FpPolynomial.x(p)
    r4 = (x ** 3 + x * a + b) * 4
    d = (ell - 1) // 2
    abscissas = [x % f_ell]
    for j in range(2, d + 1):
        num = division_fn_at(j - 1, a, b, p) * division_fn_at(j + 1, a, b, p)
        den = division_fn_at(j, a, b, p) ** 2
        if j % 2:
            num = num * r4
        else:
            den = den * r4
        try:
            inv = den.inverse_mod(f_ell)
        except ArithmeticError as err:
            raise ArithmeticError(f"psi_{j}^2 is not invertible modulo f_{ell} over GF({p})") from err
        abscissas.append((x - num * inv) % f_ell)
    return f_ell, abscissas


def tk_direct(ell: int, kmax: int, a: int, b: int, p: int) -> list[FpPolynomial]:
    """
    Power sums t_k = x_1^k + ... + x_d^k of the kernel abscissas, 0 <= k <= kmax,
    as residues modulo f_ell at the curve (a, b) over GF(p).

    t_0 = d = (ell-1)/2 and t_1 is a root of U_ell(X, a, b).
    """
    if not is_odd_prime(ell):
        raise ValueError(f"'ell' must be an odd prime, got {ell}")
    f_ell, abscissas = abscissa_multiples(ell, a, b, p)
    sums = [FpPolynomial([len(abscissas)], p)]
    powers = [FpPolynomial([1], p)] * len(abscissas)
    for _ in range(kmax):
        powers = [(u * x) % f_ell for u, x in zip(powers, abscissas)]
        total = FpPolynomial([], p)
        for u in powers:
            total = total + u
        sums.append(total)
    return sums


def trace_mod(g: FpPolynomial, modulus: FpPolynomial) -> int:
    """Trace of g in GF(p)[x]/(modulus): the sum of g over the roots of the monic modulus."""
    field = PrimeField(modulus.p)
    n = modulus.degree
    root_sums = power_sums_from_coeffs(list(modulus.coeffs), n - 1, field) if n > 1 else []
    traces = [n] + root_sums
    g = g % modulus
    return sum(c * traces[i] for i, c in enumerate(g.coeffs)) % modulus.p


def direct_power_sums(ell: int, rmax: int, a: int, b: int, p: int) -> list[int]:
    """
    Power sums p_1..p_rmax of the ell+1 roots of U_ell(X, a, b) over GF(p).

    Each cyclic subgroup contributes d = (ell-1)/2 roots of f_ell with the same
    t_1, so p_r = Tr(t_1^r)/d.
    """
    if p <= ell + 1:
        raise ValueError(f"'p' must exceed ell+1, got {p}")
    if (4 * a ** 3 + 27 * b ** 2) % p == 0:
        raise ValueError(f"singular curve ({a}, {b}) over GF({p})")
    modulus, abscissas = abscissa_multiples(ell, a, b, p)
    t1 = FpPolynomial([], p)
    for x in abscissas:
        t1 = t1 + x
    d_inv = pow((ell - 1) // 2, -1, p)
    result = []
    power = FpPolynomial([1], p)
    for _ in range(rmax):
        power = (power * t1) % modulus
        result.append(trace_mod(power, modulus) * d_inv % p)
    logger.debug("direct power sums ell=%d at (%d, %d) mod %d: %s", ell, a, b, p, result)
    return result
