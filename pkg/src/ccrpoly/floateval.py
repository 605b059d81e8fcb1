"""
Multiprecision evaluation of the Eisenstein series through the pentagonal
sums T_2k(q), at single points and at all conjugates w zeta^j at once.
"""

import logging
from dataclasses import dataclass, field
from math import ceil, log
from typing import Any, Optional

import mpmath
from scipy.optimize import brentq

from .arith import make_context

logger = logging.getLogger(__name__)

#: Largest k for which T_2k is needed (E2, E4 and E6).
KMAX = 3

#: Extra bits required of the truncation bound beyond the working precision.
TRUNCATION_GUARD_BITS = 8


class CombinationMissError(ArithmeticError):
    """Raised when an exponent is not a short combination of the tabulated ones."""

    def __init__(self, exponent: int) -> None:
        self.exponent = exponent
        super().__init__(f"exponent {exponent} is not c=1, 2a, a+b or 2a+b of tabulated exponents")


@dataclass
class PowerTable:
    """
    Cached powers of a base point, keyed by exponent.

    Parameters
    ----------
    base : mpf or mpc
        The base point.

    """
    base: Any

    #: Exponent -> base ** exponent.
    powers: dict = field(default_factory=dict)

    #: Multiplications performed so far.
    multiplications: int = 0

    def __post_init__(self) -> None:
        self.powers.setdefault(1, self.base)

    @property
    def exponents(self) -> set[int]:
        return set(self.powers)


def find_power_in_table(table: PowerTable, c: int) -> Any:
    """
    base ** c as Q[a]^2, Q[a] Q[b] or Q[a]^2 Q[b] for tabulated a, b.

    The table gains the exponent c.

    Raises
    ------
    CombinationMissError
        If no such decomposition exists.

    """
    q = table.powers
    if c in q:
        return q[c]
    if c % 2 == 0 and c // 2 in q:
        value = q[c // 2] * q[c // 2]
        table.multiplications += 1
    else:
        value = None
        for a in sorted(q, reverse=True):
            if c - a in q:
                value = q[a] * q[c - a]
                table.multiplications += 1
                break
        if value is None:
            for a in sorted(q, reverse=True):
                if c - 2 * a in q:
                    value = q[a] * q[a] * q[c - 2 * a]
                    table.multiplications += 2
                    break
        if value is None:
            raise CombinationMissError(c)
    q[c] = value
    return value


def pentagonal_exponents(terms: int) -> list[tuple[int, int, int]]:
    """The triples (n, n(3n-1)/2, n(3n+1)/2) for 1 <= n < terms."""
    return [(n, n * (3 * n - 1) // 2, n * (3 * n + 1) // 2) for n in range(1, terms)]


def truncation_bound_log2(terms: float, abs_q: Any, k: int = KMAX) -> float:
    """
    log2 of ((6N-1)^2k + (6N+1)^2k) |q|^(N(3N-1)/2) for N = ``terms``,
    the error of T_2k(q) summed for n < N.
    """
    n = terms
    log2_q = float(mpmath.log(abs_q, 2))
    head = log((6 * n - 1) ** (2 * k) + (6 * n + 1) ** (2 * k), 2)
    return head + n * (3 * n - 1) / 2 * log2_q


def truncation_order(abs_q: Any, prec: int, k: int = KMAX) -> int:
    """
    Number of pentagonal terms N needed to evaluate T_2k(q) to ``prec`` bits.

    Parameters
    ----------
    abs_q : float or mpf
        |q|, in (0, 1).
    prec : int
        Target precision in bits.
    k : int
        Largest index of T_2k to be evaluated.

    Returns
    -------
    int
        Smallest N >= 1 with truncation bound below 2^(-prec-8).

    """
    if not 0 < abs_q < 1:
        raise ValueError(f"'abs_q' must be in (0, 1), got {abs_q}")
    if prec < 1:
        raise ValueError(f"'prec' must be >= 1, got {prec}")

    target = -(prec + TRUNCATION_GUARD_BITS)

    def excess(n: float) -> float:
        return truncation_bound_log2(n, abs_q, k) - target

    if excess(1) < 0:
        return 1
    hi = 2.0
    while excess(hi) >= 0:
        hi *= 2
    n = max(1, ceil(brentq(excess, hi / 2, hi)))
    while n > 1 and excess(n - 1) < 0:
        n -= 1
    while excess(n) >= 0:
        n += 1
    return n


def evaluate_many_T(q: Any, terms: int, kmax: int = KMAX) -> list:
    """
    T_2k(q) = 1 + sum (-1)^n {(6n-1)^2k q^(n(3n-1)/2) + (6n+1)^2k q^(n(3n+1)/2)}
    for 0 <= k <= kmax, summed for n < ``terms``.

    All k share one :class:`PowerTable`; the constant 1 is added last.
    """
    sums = [0] * (kmax + 1)
    if q == 0:
        return [t + 1 for t in sums]
    table = PowerTable(q)
    s = 1
    for n, low, high in pentagonal_exponents(terms):
        s = -s
        for c, factor in ((low, (6 * n - 1) ** 2), (high, (6 * n + 1) ** 2)):
            # w' = s q^c carries the sign for every k
            term = find_power_in_table(table, c)
            if s < 0:
                term = -term
            for k in range(kmax + 1):
                sums[k] = sums[k] + term
                if k < kmax:
                    term = term * factor
    return [t + 1 for t in sums]


def evaluate_conjugate_values(ell: int, w: Any, terms: int, xi: list, kmax: int = KMAX) -> list[list]:
    """
    T_2k(w zeta^j) for 0 <= k <= kmax and 0 <= j < ell.

    Parameters
    ----------
    ell : int
        Order of zeta.
    w : mpf or mpc
        Base point; powers of w are shared across all j.
    terms : int
        Number of pentagonal terms.
    xi : list
        xi[j] = zeta^j.
    kmax : int
        Largest k.

    Returns
    -------
    list of lists
        ``values[k][j]``.

    """
    sums = [[0] * ell for _ in range(kmax + 1)]
    table = PowerTable(w)
    s = 1
    for n, low, high in pentagonal_exponents(terms):
        s = -s
        for c, factor in ((low, (6 * n - 1) ** 2), (high, (6 * n + 1) ** 2)):
            term = find_power_in_table(table, c)
            if s < 0:
                term = -term
            twists = [xi[(j * c) % ell] for j in range(ell)]
            for k in range(kmax + 1):
                row = sums[k]
                row[0] = row[0] + term
                if c % ell == 0:
                    for j in range(1, ell):
                        row[j] = row[j] + term
                else:
                    for j in range(1, ell):
                        row[j] = row[j] + twists[j] * term
                if k < kmax:
                    term = term * factor
    return [[t + 1 for t in row] for row in sums]


@dataclass(frozen=True)
class EisensteinValues:
    """Values of the Eisenstein series and related forms at one point."""
    q: Any
    e2: Any
    e4: Any
    e6: Any
    delta: Any

    @property
    def j(self) -> Any:
        return self.e4 ** 3 / self.delta

    @property
    def a(self) -> Any:
        """Curve coefficient A = -3 E4."""
        return -3 * self.e4

    @property
    def b(self) -> Any:
        """Curve coefficient B = -2 E6."""
        return -2 * self.e6


def e_values_from_T(T: list, q: Any) -> EisensteinValues:
    """
    E2, E4, E6 from T_0..T_6 via
    T_2/T_0 = E2, T_4/T_0 = 3E2^2 - 2E4, T_6/T_0 = 15E2^3 - 30E2E4 + 16E6,
    and Delta = q T_0^24.
    """
    t0 = T[0]
    if t0 == 0:
        raise ZeroDivisionError("T_0 vanishes")
    e2 = T[1] / t0
    e4 = (3 * e2 ** 2 - T[2] / t0) / 2
    e6 = (T[3] / t0 - 15 * e2 ** 3 + 30 * e2 * e4) / 16
    return EisensteinValues(q, e2, e4, e6, q * t0 ** 24)


def tau_to_q(tau: Any, ctx: Optional[mpmath.MPContext] = None) -> Any:
    """q = exp(2 pi i tau); real when tau is purely imaginary."""
    ctx = ctx or mpmath.mp
    tau = ctx.mpmathify(tau)
    if ctx.re(tau) == 0:
        return ctx.exp(-2 * ctx.pi * ctx.im(tau))
    return ctx.exp(2j * ctx.pi * tau)


def evaluate_eisenstein(tau: Any, prec: int = 256) -> EisensteinValues:
    """
    E2, E4, E6 and Delta at tau in the upper half plane.

    Parameters
    ----------
    tau : complex, mpc or str
        Point with Im(tau) > 0.
    prec : int
        Working precision in bits.

    """
    ctx = make_context(prec)
    tau = ctx.mpmathify(tau)
    if ctx.im(tau) <= 0:
        raise ValueError(f"'tau' must lie in the upper half plane, got {tau}")
    logger.debug("evaluating Eisenstein series at tau=%s", tau)
    return evaluate_at_q(tau_to_q(tau, ctx), prec)


def evaluate_at_q(q: Any, prec: int = 256) -> EisensteinValues:
    """E2, E4, E6 and Delta at a point q of the unit disc."""
    ctx = make_context(prec)
    q = ctx.mpmathify(q)
    if not 0 < abs(q) < 1:
        raise ValueError(f"'q' must satisfy 0 < |q| < 1, got {q}")
    terms = truncation_order(abs(q), prec)
    logger.debug("%d pentagonal terms at %d bits", terms, prec)
    return e_values_from_T(evaluate_many_T(q, terms), q)


def multiplier_value(ell: int, tau: Any, prec: int = 256) -> Any:
    """The multiplier F_ell(tau) = E2(tau) - ell E2(ell tau)."""
    ctx = make_context(prec)
    tau = ctx.mpmathify(tau)
    return evaluate_eisenstein(tau, prec).e2 - ell * evaluate_eisenstein(ell * tau, prec).e2


@dataclass(frozen=True)
class ThetaValues:
    """Jacobi theta constants a = theta_2, b = theta_3, c = theta_4 at q1."""
    theta2: Any
    theta3: Any
    theta4: Any


def theta_eval(q1: Any, terms: int, ctx: Optional[mpmath.MPContext] = None) -> ThetaValues:
    """
    Theta constants at q1 = exp(i pi tau) by direct summation of ``terms`` terms.

    theta_2 = 2 q1^(1/4) sum_{n>=0} q1^(n(n+1)), theta_3 = 1 + 2 sum q1^(n^2),
    theta_4 = 1 + 2 sum (-1)^n q1^(n^2).
    """
    ctx = ctx or mpmath.mp
    q1 = ctx.mpmathify(q1)
    if abs(q1) >= 1:
        raise ValueError(f"'q1' must satisfy |q1| < 1, got {q1}")
    theta2 = 0
    theta3 = 0
    theta4 = 0
    for n in range(terms):
        theta2 += q1 ** (n * (n + 1))
        if n:
            square = q1 ** (n * n)
            theta3 += square
            theta4 += -square if n % 2 else square
    return ThetaValues(
        2 * ctx.power(q1, ctx.mpf(1) / 4) * theta2,
        1 + 2 * theta3,
        1 + 2 * theta4,
    )


def e4_e6_from_theta(theta: ThetaValues) -> tuple[Any, Any, Any]:
    """
    (E4, E6, Delta) from the theta constants:
    E4 = (a^8+b^8+c^8)/2, E6 = (a^4+b^4)(b^4+c^4)(c^4-a^4)/2, Delta = (abc/2)^8.
    """
    a4 = theta.theta2 ** 4
    b4 = theta.theta3 ** 4
    c4 = theta.theta4 ** 4
    e4 = (a4 ** 2 + b4 ** 2 + c4 ** 2) / 2
    e6 = (a4 + b4) * (b4 + c4) * (c4 - a4) / 2
    delta = (theta.theta2 * theta.theta3 * theta.theta4 / 2) ** 8
    return e4, e6, delta
