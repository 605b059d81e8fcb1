"""
Truncated q-expansions: Eisenstein series, the discriminant, j, the
multiplier E2(q) - ell E2(q^ell) and the power sums of the conjugate roots
of the CCR polynomials.
"""

import logging
from dataclasses import dataclass
from math import isqrt
from typing import Any, Callable, Iterator, Optional

from .arith import ZZ, ConsistencyError, CycloElem, CyclotomicRing, Ring
from .polynomials import Kind

logger = logging.getLogger(__name__)

# Scalars of the normalized Eisenstein series E_k = 1 + c_k sum sigma_{k-1}(n) q^n
EISENSTEIN_SCALARS = {2: -24, 4: 240, 6: -504}


class TruncatedSeries:
    """
    Power series sum c_n q^(n/e) for valuation <= n < order.

    Parameters
    ----------
    coeffs : list
        Coefficients of q^(valuation/e), q^((valuation+1)/e), ...
    ring : Ring
        Coefficient ring.
    valuation : int
        Exponent index of the first stored coefficient.
    order : int
        Exponent index of the first unknown coefficient.
        Default is ``valuation + len(coeffs)``.
    denominator : int
        Exponent denominator e: 1 for q-series, ell for series in w = q^(1/ell).

    """

    __slots__ = ("coeffs", "ring", "valuation", "order", "denominator")

    def __init__(
            self,
            coeffs: list,
            ring: Ring = ZZ,
            valuation: int = 0,
            order: Optional[int] = None,
            denominator: int = 1,
    ) -> None:
        if order is None:
            order = valuation + len(coeffs)
        if order < valuation:
            raise ValueError(f"'order' ({order}) must be >= 'valuation' ({valuation})")
        length = order - valuation
        coeffs = list(coeffs[:length])
        coeffs.extend([ring.zero] * (length - len(coeffs)))
        self.coeffs = coeffs
        self.ring = ring
        self.valuation = valuation
        self.order = order
        self.denominator = denominator

    @classmethod
    def constant(cls, value: Any, order: int, ring: Ring = ZZ, denominator: int = 1) -> "TruncatedSeries":
        return cls([ring(value)], ring, 0, order, denominator)

    def _like(self, coeffs: list, valuation: int, order: int) -> "TruncatedSeries":
        return TruncatedSeries(coeffs, self.ring, valuation, order, self.denominator)

    def coefficient(self, n: int) -> Any:
        """Coefficient of q^(n/e)."""
        if n >= self.order:
            raise IndexError(f"coefficient {n} is beyond the truncation order {self.order}")
        if n < self.valuation:
            return self.ring.zero
        return self.coeffs[n - self.valuation]

    def __getitem__(self, n: int) -> Any:
        return self.coefficient(n)

    def __iter__(self) -> Iterator[tuple[int, Any]]:
        for i, c in enumerate(self.coeffs):
            yield self.valuation + i, c

    def _check(self, other: "TruncatedSeries") -> None:
        if other.denominator != self.denominator:
            raise ValueError("series with different exponent denominators")

    def __add__(self, other: Any) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.order, self.ring, self.denominator)
        self._check(other)
        v = min(self.valuation, other.valuation)
        n = min(self.order, other.order)
        coeffs = [self.ring.normalize(self.coefficient(k) + other.coefficient(k)) for k in range(v, n)]
        return self._like(coeffs, v, n)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return self._like([self.ring.normalize(-c) for c in self.coeffs], self.valuation, self.order)

    def __sub__(self, other: Any) -> "TruncatedSeries":
        return self + (-other)

    def __rsub__(self, other: Any) -> "TruncatedSeries":
        return (-self) + other

    def __mul__(self, other: Any) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return self._like([self.ring.normalize(c * other) for c in self.coeffs], self.valuation, self.order)
        self._check(other)
        v = self.valuation + other.valuation
        n = min(self.order + other.valuation, other.order + self.valuation)
        length = n - v
        result = [self.ring.zero] * max(length, 0)
        b = other.coeffs
        for i, a in enumerate(self.coeffs):
            if i >= length:
                break
            if a == 0:
                continue
            for j in range(min(len(b), length - i)):
                result[i + j] += a * b[j]
        return self._like([self.ring.normalize(c) for c in result], v, n)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "TruncatedSeries":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return TruncatedSeries.constant(1, self.order - self.valuation, self.ring, self.denominator)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def trimmed(self) -> "TruncatedSeries":
        """Same series with leading zero coefficients moved into the valuation."""
        k = 0
        while k < len(self.coeffs) and self.ring.is_zero(self.coeffs[k]):
            k += 1
        return self._like(self.coeffs[k:], self.valuation + k, self.order)

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; the leading coefficient must be a unit."""
        s = self.trimmed()
        if not s.coeffs:
            raise ZeroDivisionError("inverse of a series that vanishes to its truncation order")
        ring = self.ring
        u = s.coeffs
        lead_inv = ring.inv(u[0])
        inv = [lead_inv]
        for n in range(1, len(u)):
            acc = sum((u[k] * inv[n - k] for k in range(1, n + 1)), ring.zero)
            inv.append(ring.normalize(-acc * lead_inv))
        return self._like(inv, -s.valuation, s.order - 2 * s.valuation)

    def __truediv__(self, other: Any) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return self._like([self.ring.div(c, other) for c in self.coeffs], self.valuation, self.order)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by q^(k/e)."""
        return self._like(self.coeffs, self.valuation + k, self.order + k)

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        return self._like(self.coeffs[:max(order - self.valuation, 0)], self.valuation, order)

    def substitute_power(self, k: int) -> "TruncatedSeries":
        """The series f(q^k)."""
        coeffs = [self.ring.zero] * ((self.order - self.valuation) * k)
        for i, c in enumerate(self.coeffs):
            coeffs[i * k] = c
        return self._like(coeffs, self.valuation * k, self.order * k)

    def with_denominator(self, denominator: int) -> "TruncatedSeries":
        """Reinterpret the exponent indices with another exponent denominator."""
        return TruncatedSeries(self.coeffs, self.ring, self.valuation, self.order, denominator)

    def map_coefficients(self, fn: Callable[[Any], Any], ring: Ring) -> "TruncatedSeries":
        return TruncatedSeries([fn(c) for c in self.coeffs], ring, self.valuation, self.order, self.denominator)

    def evaluate(self, x: Any) -> Any:
        """Numerical value at q^(1/e) = x (exponent denominator 1 means x is q)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * x ** self.valuation

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.denominator != other.denominator or self.order != other.order:
            return False
        low = min(self.valuation, other.valuation)
        return all(
            self.ring.normalize(self.coefficient(n) - other.coefficient(n)) == 0
            for n in range(low, self.order)
        )

    def __str__(self) -> str:
        return f"{self.valuation}:{self.order}: " + " ".join(str(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self})"


@dataclass(frozen=True)
class SigmaTable:
    """Divisor sums sigma_r(n) for 0 <= n < len(values); values[0] is 0."""
    r: int
    values: tuple[int, ...]

    @classmethod
    def build(cls, r: int, size: int, coprime_to: Optional[int] = None) -> "SigmaTable":
        """
        Sieve the table.

        Parameters
        ----------
        r : int
            Power of the divisors.
        size : int
            Number of entries.
        coprime_to : int, optional
            Only divisors prime to this integer are summed.

        """
        values = [0] * size
        for d in range(1, size):
            if coprime_to is not None and d % coprime_to == 0:
                continue
            power = d ** r
            for m in range(d, size, d):
                values[m] += power
        return cls(r, tuple(values))

    def __getitem__(self, n: int) -> int:
        return self.values[n]


def divisor_sigma(r: int, n: int) -> int:
    """Sum of the r-th powers of the divisors of n."""
    if n < 1:
        raise ValueError(f"'n' must be >= 1, got {n}")
    if r < 0:
        raise ValueError(f"'r' must be >= 0, got {r}")
    total = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            total += d ** r
            if d * d != n:
                total += (n // d) ** r
    return total


def eisenstein_qexp(k: int, order: int, ring: Ring = ZZ) -> TruncatedSeries:
    """
    Eisenstein series E_k(q) = 1 + c_k sum sigma_{k-1}(n) q^n.

    Parameters
    ----------
    k : int
        Weight, one of 2, 4, 6.
    order : int
        Truncation order.
    ring : Ring
        Coefficient ring.

    """
    if k not in EISENSTEIN_SCALARS:
        raise ValueError(f"'k' must be 2, 4 or 6, got {k}")
    if order < 1:
        raise ValueError(f"'order' must be >= 1, got {order}")
    scalar = EISENSTEIN_SCALARS[k]
    table = SigmaTable.build(k - 1, order)
    coeffs = [ring(1)] + [ring(scalar * table[n]) for n in range(1, order)]
    return TruncatedSeries(coeffs, ring)


def delta_qexp(order: int, ring: Ring = ZZ) -> TruncatedSeries:
    """Discriminant (E4^3 - E6^2)/1728 = q - 24 q^2 + ..."""
    if order < 1:
        raise ValueError(f"'order' must be >= 1, got {order}")
    e4 = eisenstein_qexp(4, order, ring)
    e6 = eisenstein_qexp(6, order, ring)
    return ((e4 ** 3 - e6 ** 2) / ring(1728)).trimmed()


def eta_product_qexp(order: int, ring: Ring = ZZ) -> TruncatedSeries:
    """The product prod_{n >= 1} (1 - q^n), from Euler's pentagonal theorem."""
    coeffs = [ring.zero] * order
    coeffs[0] = ring(1)
    k = 1
    while k * (3 * k - 1) // 2 < order:
        sign = ring(-1 if k % 2 else 1)
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < order:
                coeffs[e] = sign
        k += 1
    return TruncatedSeries(coeffs, ring)


def j_qexp(order: int, ring: Ring = ZZ) -> TruncatedSeries:
    """Modular invariant E4^3/Delta = 1/q + 744 + 196884 q + ..., coefficients up to q^(order-1)."""
    e4 = eisenstein_qexp(4, order + 2, ring)
    return ((e4 ** 3) * delta_qexp(order + 2, ring).inverse()).truncate(order)


def multiplier_qexp(ell: int, order: int, ring: Ring = ZZ) -> TruncatedSeries:
    """Ramanujan multiplier F_ell(q) = E2(q) - ell E2(q^ell)."""
    e2 = eisenstein_qexp(2, order, ring)
    e2_ell = eisenstein_qexp(2, -(-order // ell), ring).substitute_power(ell)
    return (e2 - e2_ell * ring(ell)).truncate(order)


def sigma1_qexp(ell: int, order: int, ring: Ring = ZZ) -> TruncatedSeries:
    """
    Trace of the kernel polynomial at the cusp,
    ell(ell-1)/2 + 12 ell sum sigma_1'(n) q^n with divisors prime to ell.
    """
    table = SigmaTable.build(1, order, coprime_to=ell)
    coeffs = [ring(ell * (ell - 1) // 2)] + [ring(12 * ell * table[n]) for n in range(1, order)]
    return TruncatedSeries(coeffs, ring)


def root_series(kind: Kind, ell: int, order: int, ring: Ring = ZZ) -> tuple[TruncatedSeries, TruncatedSeries]:
    """
    Series of the roots of the CCR polynomial of the given kind.

    The W roots are -B*: 2 ell^6 E6(q^ell) and 2 E6(w zeta^k).

    Returns
    -------
    cusp : TruncatedSeries
        The root attached to the cusp, a q-series to ``order``.
    conjugate : TruncatedSeries
        The generic conjugate root as a series in w = q^(1/ell) (exponent
        denominator ell) to w-order ``ell * order``; the other conjugates are
        obtained by w -> zeta^k w.

    """
    kind = Kind(kind)
    w_order = ell * order
    short = -(-order // ell)
    if kind is Kind.U:
        cusp = sigma1_qexp(ell, order, ring)
        conjugate = multiplier_qexp(ell, w_order, ring) / ring(2)
    elif kind is Kind.V:
        cusp = (eisenstein_qexp(4, short, ring).substitute_power(ell) * ring(-3 * ell ** 4)).truncate(order)
        conjugate = eisenstein_qexp(4, w_order, ring) * ring(-3)
    else:
        cusp = (eisenstein_qexp(6, short, ring).substitute_power(ell) * ring(2 * ell ** 6)).truncate(order)
        conjugate = eisenstein_qexp(6, w_order, ring) * ring(2)
    return cusp, conjugate.with_denominator(ell)


def conjugate_trace(series: TruncatedSeries, ell: int) -> TruncatedSeries:
    """
    Sum of f(zeta^k w) over 0 <= k < ell for a w-series f, as a q-series.

    The sum is formed with cyclotomic coefficients; every coefficient must come
    out rational and vanish at exponents not divisible by ell.
    """
    if series.denominator != ell:
        raise ValueError("expected a series in w = q^(1/ell)")
    if series.valuation < 0:
        raise ValueError("expected a series without negative powers")
    base = series.ring
    cyclo = CyclotomicRing(ell, base)
    residue_sums = []
    for e in range(ell):
        total = CycloElem([base.zero], ell, base)
        for k in range(ell):
            total = total + CycloElem.zeta_power(k * e, ell, base)
        residue_sums.append(total)

    traced = TruncatedSeries(
        [residue_sums[n % ell] * c for n, c in series], cyclo, series.valuation, series.order, ell,
    )
    q_order = -(-series.order // ell)
    coeffs = [base.zero] * q_order
    for n, c in traced:
        value = c.rational_part()
        if n % ell:
            if not base.is_zero(value):
                raise ConsistencyError(f"conjugate sum has a nonzero coefficient at w^{n}")
            continue
        coeffs[n // ell] = base.normalize(value)
    return TruncatedSeries(coeffs, base, 0, q_order)


def powersum_series(ell: int, rmax: int, order: int, ring: Ring = ZZ, kind: Kind = Kind.U) -> list[TruncatedSeries]:
    """
    Power sums sigma_r(q) of the ell+1 roots of a CCR polynomial.

    Parameters
    ----------
    ell : int
        Odd prime.
    rmax : int
        Largest power, at most ell+1.
    order : int
        q-adic truncation order of the results.
    ring : Ring
        Coefficient ring.
    kind : Kind
        Which polynomial the roots belong to.

    Returns
    -------
    list of TruncatedSeries
        Entry r-1 holds sigma_r(q), for r = 1..rmax.

    """
    if rmax > ell + 1:
        raise ValueError(f"'rmax' must be <= ell+1 = {ell + 1}, got {rmax}")
    cusp, conjugate = root_series(kind, ell, order, ring)
    logger.debug("power sums: kind=%s ell=%d rmax=%d order=%d over %r", Kind(kind).name, ell, rmax, order, ring)
    sums = []
    cusp_power = None
    conjugate_power = None
    for _ in range(rmax):
        cusp_power = cusp if cusp_power is None else cusp_power * cusp
        conjugate_power = conjugate if conjugate_power is None else conjugate_power * conjugate
        sums.append((cusp_power + conjugate_trace(conjugate_power, ell)).truncate(order))
    return sums
