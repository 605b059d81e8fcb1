"""
Computation of the CCR polynomials U, V, W and the isogeny numerators.

Methods
-------
series
    Exact q-expansions of the power sums of the roots, triangular systems in
    the (E4, E6, Delta) basis, Newton's identities.
float
    The same systems instantiated at numerical points tau = rho i.
crt
    The series method modulo random primes, Chinese remaindering.
linear
    One linear system in all unknown coefficients (small ell only).
direct
    Traces of the kernel abscissa sum t_1 modulo division polynomials at
    random curves over GF(p) (ell = 3, 5).
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log, log2
from typing import Any, Optional, Sequence

from .arith import (
    QQ,
    ZZ,
    ConsistencyError,
    LinearSystem,
    MatrixShape,
    MPField,
    PrecisionError,
    PrimeField,
    Ring,
    crt_combine,
    is_odd_prime,
    random_primes,
    round_to_integer,
    solve_linear,
    solve_overdetermined,
)
from .divpoly import direct_power_sums
from .floateval import (
    EisensteinValues,
    e_values_from_T,
    evaluate_conjugate_values,
    evaluate_many_T,
    truncation_order,
)
from .polynomials import (
    Kind,
    SparsePoly,
    WeightedPoly,
    count_N23,
    fit_weighted_form,
    newton_to_coeffs,
    pippenger_batch,
    xyz_monomials,
)
from .qseries import TruncatedSeries, delta_qexp, eisenstein_qexp, powersum_series, root_series

logger = logging.getLogger(__name__)

#: Guard bits added to the precision estimate of the float method.
DEFAULT_GUARD_BITS = 64

#: Extra q-coefficients used to check the series systems.
CHECK_TERMS = 4

#: Safety factor on the height estimate 2k(ell+1) log(ell) used by the CRT budget.
HEIGHT_MARGIN = 1.25

#: Scale clearing the denominators of the ell = 3 polynomials.
ELL3_SCALE = 27


class InsufficientPrimesError(ValueError):
    """Raised when the product of the CRT primes cannot cover the coefficient size."""

    def __init__(self, available_bits: float, needed_bits: float) -> None:
        self.available_bits = available_bits
        self.needed_bits = needed_bits
        super().__init__(f"primes provide {available_bits:.0f} bits, {needed_bits:.0f} are needed")


def _check_ell(ell: int) -> None:
    if not is_odd_prime(ell):
        raise ValueError(f"'ell' must be an odd prime, got {ell}")


def _check_ring(ring: Ring, ell: int) -> None:
    if isinstance(ring, PrimeField) and ring.p <= max(ell + 1, 3):
        raise ValueError(f"prime field GF({ring.p}) is too small for ell = {ell}")


# ---------------------------------------------------------------- S_r systems

@dataclass(frozen=True)
class BasisElement:
    """The modular form E4^e4 E6^e6 Delta^delta."""
    e4: int
    e6: int
    delta: int

    @property
    def valuation(self) -> int:
        return self.delta


def basis_for_weight(weight: int) -> list[BasisElement]:
    """
    Basis of the forms of (Y, Z)-weight ``weight`` (modular weight 2 weight),
    element k having q-valuation k.

    Even weight 2m: E4^(m-3k) Delta^k; odd weight 2m+3: E6 E4^(m-3k) Delta^k.
    """
    if weight < 0:
        raise ValueError(f"'weight' must be >= 0, got {weight}")
    if weight == 1:
        return []
    if weight % 2 == 0:
        m, e6 = weight // 2, 0
    else:
        m, e6 = (weight - 3) // 2, 1
    return [BasisElement(m - 3 * k, e6, k) for k in range(m // 3 + 1)]


class _BasisSeries:
    """q-expansions of basis elements, sharing powers of E4 and Delta."""

    def __init__(self, order: int, ring: Ring) -> None:
        self.ring = ring
        self.order = order
        self.e4 = eisenstein_qexp(4, order, ring)
        self.e6 = eisenstein_qexp(6, order, ring)
        self.delta = delta_qexp(order + 1, ring).truncate(order)
        self._e4_powers = {0: TruncatedSeries.constant(1, order, ring)}
        self._delta_powers = {0: TruncatedSeries.constant(1, order, ring)}

    def _power(self, table: dict, base: TruncatedSeries, e: int) -> TruncatedSeries:
        if e not in table:
            table[e] = self._power(table, base, e - 1) * base
        return table[e]

    def series(self, element: BasisElement) -> TruncatedSeries:
        s = self._power(self._e4_powers, self.e4, element.e4) * self._power(self._delta_powers, self.delta, element.delta)
        if element.e6:
            s = s * self.e6
        return s.truncate(self.order)


@dataclass
class SrSystem:
    """
    The triangular system expressing one power sum in the basis of its weight.

    Parameters
    ----------
    r : int
        Power.
    weight : int
        (Y, Z)-weight of the power sum, kind * r.
    basis : list of BasisElement
        Basis of that weight.
    solution : list
        Coefficients u_{r,k}.

    """
    r: int
    weight: int
    basis: list[BasisElement]
    solution: list

    def to_yz(self, ring: Ring = QQ) -> SparsePoly:
        return e_basis_to_YZ(self.solution, self.basis, ring)


def _solve_sr(r: int, weight: int, power_sum: TruncatedSeries, basis_series: _BasisSeries) -> SrSystem:
    basis = basis_for_weight(weight)
    ring = basis_series.ring
    size = len(basis)
    columns = [basis_series.series(element) for element in basis]
    if size == 0:
        solution: list = []
    else:
        rows = [[col[i] for col in columns] for i in range(size)]
        rhs = [power_sum[i] for i in range(size)]
        solution = solve_linear(LinearSystem(rows, rhs, ring, MatrixShape.LOWER))
    for n in range(size, power_sum.order):
        value = power_sum[n] - sum((c * col[n] for c, col in zip(solution, columns)), ring.zero)
        if not ring.is_zero(ring.normalize(value)):
            raise ConsistencyError(f"power sum {r} is not a form of weight {weight}: residual at q^{n}")
    return SrSystem(r, weight, basis, solution)


def solve_Sr_series(
        ell: int,
        r: int,
        order: Optional[int] = None,
        kind: Kind = Kind.U,
        ring: Ring = ZZ,
) -> SrSystem:
    """
    Coefficients of the power sum sigma_r(q) of the roots in the (E4, E6, Delta) basis.

    Parameters
    ----------
    ell : int
        Odd prime.
    r : int
        Power, 1 <= r <= ell+1.
    order : int, optional
        q-adic order; the coefficients beyond the basis size check the solution.
    kind : Kind
        Polynomial whose roots are summed.
    ring : Ring
        Coefficient ring of the series.

    """
    _check_ell(ell)
    kind = Kind(kind)
    if not 1 <= r <= ell + 1:
        raise ValueError(f"'r' must be in [1, {ell + 1}], got {r}")
    weight = kind * r
    order = order or count_N23(weight) + CHECK_TERMS
    sums = powersum_series(ell, r, order, ring, kind)
    return _solve_sr(r, weight, sums[r - 1], _BasisSeries(order, ring))


def e_basis_to_YZ(solution: Sequence[Any], basis: Sequence[BasisElement], ring: Ring = QQ) -> SparsePoly:
    """
    Substitute E4 = -Y/3, E6 = -Z/2, Delta = (-Y^3/27 - Z^2/4)/1728.

    Returns
    -------
    SparsePoly
        Polynomial in (Y, Z) over ``ring``.

    """
    y = SparsePoly({(1, 0): ring.div(ring(-1), ring(3))}, 2, ring)
    z = SparsePoly({(0, 1): ring.div(ring(-1), ring(2))}, 2, ring)
    delta = SparsePoly(
        {(3, 0): ring.div(ring(-1), ring(27 * 1728)), (0, 2): ring.div(ring(-1), ring(4 * 1728))}, 2, ring,
    )
    total = SparsePoly({}, 2, ring)
    for c, element in zip(solution, basis):
        term = y ** element.e4 * delta ** element.delta
        if element.e6:
            term = term * z
        total = total + term * ring(c)
    return total


def _assemble(kind: Kind, ell: int, power_sums: list[SparsePoly], ring: Ring) -> WeightedPoly:
    coeffs = newton_to_coeffs(power_sums, ell + 1, ring)
    modulus = ring.p if isinstance(ring, PrimeField) else None
    return WeightedPoly.from_x_coefficients(kind, ell, coeffs, modulus)


# ---------------------------------------------------------------- series

def compute_ccr_series(kind: Kind, ell: int, ring: Ring = QQ, extra_terms: int = CHECK_TERMS) -> WeightedPoly:
    """
    CCR polynomial from exact q-expansions.

    Parameters
    ----------
    kind : Kind
        U, V or W.
    ell : int
        Odd prime.
    ring : Ring
        ``QQ`` for the polynomial over the rationals, or a :class:`PrimeField`
        with p > ell+1 for its reduction.
    extra_terms : int
        q-coefficients beyond the largest basis used to check every system.

    """
    _check_ell(ell)
    _check_ring(ring, ell)
    kind = Kind(kind)
    series_ring = ZZ if ring is QQ else ring
    order = count_N23(kind * (ell + 1)) + extra_terms
    logger.info("series method: kind=%s ell=%d order=%d over %r", kind.name, ell, order, ring)
    sums = powersum_series(ell, ell + 1, order, series_ring, kind)
    basis_series = _BasisSeries(order, series_ring)
    power_sums = [
        _solve_sr(r, kind * r, sums[r - 1], basis_series).to_yz(ring)
        for r in range(1, ell + 2)
    ]
    return _assemble(kind, ell, power_sums, ring)


# ---------------------------------------------------------------- float

def float_precision(kind: Kind, ell: int, guard_bits: int = DEFAULT_GUARD_BITS) -> int:
    """Working precision ceil(2k(ell+1) log2 ell) + guard bits."""
    return ceil(2 * Kind(kind) * (ell + 1) * log2(ell)) + guard_bits


@dataclass(frozen=True)
class FloatPoint:
    """Numerical data at tau = rho i: the roots and the Eisenstein values at q."""
    rho: Fraction
    roots: list
    values: EisensteinValues


def _float_point(kind: Kind, ell: int, rho: Fraction, field: MPField, xi: list) -> FloatPoint:
    ctx = field.ctx
    w = ctx.exp(-2 * ctx.pi * field(rho) / ell)
    q = w ** ell
    q_ell = q ** ell
    at_q = e_values_from_T(evaluate_many_T(q, truncation_order(q, field.prec)), q)
    at_q_ell = e_values_from_T(evaluate_many_T(q_ell, truncation_order(q_ell, field.prec)), q_ell)
    table = evaluate_conjugate_values(ell, w, truncation_order(w, field.prec), xi)
    conjugates = [
        e_values_from_T([table[k][j] for k in range(4)], w * xi[j])
        for j in range(ell)
    ]
    if kind is Kind.U:
        roots = [ell * (ell * at_q_ell.e2 - at_q.e2) / 2]
        roots += [(v.e2 - ell * at_q.e2) / 2 for v in conjugates]
    elif kind is Kind.V:
        roots = [-3 * ell ** 4 * at_q_ell.e4] + [-3 * v.e4 for v in conjugates]
    else:
        roots = [2 * ell ** 6 * at_q_ell.e6] + [2 * v.e6 for v in conjugates]
    return FloatPoint(rho, roots, at_q)


def _float_row(r: int, weight: int, point: FloatPoint) -> tuple[list, Any]:
    v = point.values
    row = []
    for element in basis_for_weight(weight):
        value = v.e4 ** element.e4 * v.delta ** element.delta
        if element.e6:
            value = value * v.e6
        row.append(value)
    rhs = sum(root ** r for root in point.roots)
    return row, rhs.real if hasattr(rhs, "real") else rhs


def _roots_of_unity(ell: int, field: MPField) -> list:
    ctx = field.ctx
    return [ctx.expjpi(ctx.mpf(2 * j) / ell) for j in range(ell)]


def float_equation(kind: Kind, ell: int, r: int, rho: Any, prec: Optional[int] = None) -> tuple[list, Any]:
    """
    One instantiated equation of the float system for sigma_r at tau = rho i.

    Returns
    -------
    row : list of mpf
        Basis values E4^a E6^b Delta^c at q = exp(-2 pi rho).
    rhs : mpf
        The power sum of the roots at that point.

    """
    _check_ell(ell)
    kind = Kind(kind)
    field = MPField(prec or float_precision(kind, ell))
    point = _float_point(kind, ell, Fraction(rho), field, _roots_of_unity(ell, field))
    return _float_row(r, kind * r, point)


def _compute_float_at(kind: Kind, ell: int, prec: int, rho_step: Fraction) -> WeightedPoly:
    field = MPField(prec)
    xi = _roots_of_unity(ell, field)
    pending = {r: basis_for_weight(kind * r) for r in range(1, ell + 2)}
    rows: dict[int, list] = {r: [] for r in pending}
    rhs: dict[int, list] = {r: [] for r in pending}
    solutions: dict[int, list] = {r: [] for r, basis in pending.items() if not basis}
    for r in solutions:
        del pending[r]

    rho = Fraction(1)
    while pending:
        rho += rho_step
        logger.debug("float method: rho=%s, %d systems pending", rho, len(pending))
        point = _float_point(kind, ell, rho, field, xi)
        for r in list(pending):
            row, value = _float_row(r, kind * r, point)
            rows[r].append(row)
            rhs[r].append(value)
            if len(rows[r]) == len(pending[r]):
                solution = solve_linear(LinearSystem(rows[r], rhs[r], field))
                solutions[r] = [round_to_integer(u) for u in solution]
                del pending[r]

    power_sums = [e_basis_to_YZ(solutions[r], basis_for_weight(kind * r), QQ) for r in range(1, ell + 2)]
    return _assemble(kind, ell, power_sums, QQ)


def compute_ccr_float(
        kind: Kind,
        ell: int,
        guard_bits: int = DEFAULT_GUARD_BITS,
        prec_cap: Optional[int] = None,
        rho_step: Fraction = Fraction(1, 10),
) -> WeightedPoly:
    """
    CCR polynomial from multiprecision evaluations at tau = rho i, rho = 1.1, 1.2, ...

    On a rounding failure the guard bits are doubled and the computation restarts.

    Parameters
    ----------
    kind : Kind
        U, V or W.
    ell : int
        Odd prime.
    guard_bits : int
        Bits added to ceil(2k(ell+1) log2 ell).
    prec_cap : int, optional
        Largest precision tried; default 8 times the initial precision.
    rho_step : Fraction
        Increment of rho between evaluation points.

    Raises
    ------
    PrecisionError
        If rounding still fails at ``prec_cap`` bits.

    """
    _check_ell(ell)
    kind = Kind(kind)
    if guard_bits < 0:
        raise ValueError(f"'guard_bits' must be >= 0, got {guard_bits}")
    if rho_step <= 0:
        raise ValueError(f"'rho_step' must be > 0, got {rho_step}")
    prec = float_precision(kind, ell, guard_bits)
    cap = prec_cap if prec_cap is not None else 8 * prec
    if cap < prec:
        raise ValueError(f"'prec_cap' ({cap}) is below the initial precision ({prec})")

    while True:
        logger.info("float method: kind=%s ell=%d at %d bits", kind.name, ell, prec)
        try:
            return _compute_float_at(kind, ell, prec, Fraction(rho_step))
        except PrecisionError as err:
            guard_bits = max(2 * guard_bits, 16)
            next_prec = float_precision(kind, ell, guard_bits)
            if next_prec > cap:
                raise
            logger.warning("rounding failed at %d bits (%s); retrying at %d bits", prec, err, next_prec)
            prec = next_prec


# ---------------------------------------------------------------- crt

def height_bits(kind: Kind, ell: int, margin: float = HEIGHT_MARGIN) -> float:
    """
    Bits needed to recover every coefficient in the symmetric range:
    the estimate 2k(ell+1) log(ell) with a safety margin, plus a sign bit
    (and the ell = 3 denominator scale).
    """
    nats = margin * 2 * Kind(kind) * (ell + 1) * log(ell)
    if ell == 3:
        nats += log(ELL3_SCALE)
    return nats / log(2) + 1


def _scale_for(ell: int) -> int:
    return ELL3_SCALE if ell == 3 else 1


def _crt_polynomials(kind: Kind, ell: int, residues: list[WeightedPoly], scale: int) -> WeightedPoly:
    moduli = [poly.modulus for poly in residues]
    monomials = set()
    for poly in residues:
        monomials.update(poly.terms)
    terms = {}
    for mono in monomials:
        values = [poly.coefficient(mono) * scale % poly.modulus for poly in residues]
        full = crt_combine(values, moduli)
        check = crt_combine(values[:-1], moduli[:-1])
        if full != check:
            raise ConsistencyError(f"coefficient of {mono} did not stabilize; more primes are needed")
        terms[mono] = Fraction(full, scale)
    return WeightedPoly.ccr(kind, ell, terms)


def _choose_primes(
        kind: Kind,
        ell: int,
        primes: Optional[Sequence[int]],
        prime_bits: int,
        seed: int,
) -> list[int]:
    needed = height_bits(kind, ell)
    if primes is not None:
        primes = list(primes)
        for p in primes:
            if not is_odd_prime(p) or p <= max(ell + 1, 3):
                raise ValueError(f"'primes' must be odd primes > {max(ell + 1, 3)}, got {p}")
        available = sum(log2(p) for p in primes[:-1])
        if len(primes) < 2 or available < needed:
            raise InsufficientPrimesError(available, needed)
        return primes
    if prime_bits < 8:
        raise ValueError(f"'prime_bits' must be >= 8, got {prime_bits}")
    count = ceil(needed / (prime_bits - 1)) + 1
    return random_primes(count, prime_bits, exclude=[ell], seed=seed)


def compute_ccr_crt(
        kind: Kind,
        ell: int,
        primes: Optional[Sequence[int]] = None,
        prime_bits: int = 30,
        seed: int = 0,
) -> WeightedPoly:
    """
    CCR polynomial over Q from its reductions modulo several primes.

    All but one prime must cover :func:`height_bits`; the last prime checks
    that every coefficient has stabilized.

    Parameters
    ----------
    kind : Kind
        U, V or W.
    ell : int
        Odd prime.
    primes : sequence of int, optional
        Primes to use; by default random ``prime_bits``-bit primes.
    prime_bits : int
        Size of the random primes.
    seed : int
        Seed for the random primes.

    Raises
    ------
    InsufficientPrimesError
        If the given primes are too few.

    """
    _check_ell(ell)
    kind = Kind(kind)
    chosen = _choose_primes(kind, ell, primes, prime_bits, seed)
    residues = []
    for i, p in enumerate(chosen, start=1):
        logger.info("crt method: kind=%s ell=%d prime %d/%d (%d)", kind.name, ell, i, len(chosen), p)
        residues.append(compute_ccr_series(kind, ell, PrimeField(p)))
    return _crt_polynomials(kind, ell, residues, _scale_for(ell))


# ---------------------------------------------------------------- linear

#: Largest ell accepted by the one-system method.
LINEAR_MAX_ELL = 7


def sturm_bound(weight: int, ell: int) -> int:
    """Vanishing order beyond which a form of (Y, Z)-weight ``weight`` on Gamma0(ell) is zero."""
    return 2 * weight * (ell + 1) // 12


def compute_ccr_linear(kind: Kind, ell: int, extra_terms: int = 8) -> WeightedPoly:
    """
    CCR polynomial from one exact linear system: P(root(q), A(q), B(q)) = 0
    for the cusp root, with every non-leading coefficient unknown.

    Only for ell <= 7; the system grows like ell^2 unknowns.
    """
    _check_ell(ell)
    kind = Kind(kind)
    if ell > LINEAR_MAX_ELL:
        raise ValueError(f"'ell' must be <= {LINEAR_MAX_ELL} for the linear method, got {ell}")
    weight = kind * (ell + 1)
    unknowns = [m for m in xyz_monomials(weight, kind, ell) if not (kind is Kind.U and m[0] == ell)]
    order = max(len(unknowns) + extra_terms, sturm_bound(weight, ell) + 2)
    logger.info("linear method: kind=%s ell=%d, %d unknowns", kind.name, ell, len(unknowns))

    cusp, _ = root_series(kind, ell, order, ZZ)
    a = eisenstein_qexp(4, order, ZZ) * -3
    b = eisenstein_qexp(6, order, ZZ) * -2
    one = TruncatedSeries.constant(1, order, ZZ)
    x_powers = [one]
    for _ in range(ell + 1):
        x_powers.append((x_powers[-1] * cusp).truncate(order))
    yz = sorted({(m[1], m[2]) for m in unknowns})
    yz_values = dict(zip(yz, pippenger_batch(a, b, yz, one)))
    columns = [(x_powers[i1] * yz_values[(i2, i3)]).truncate(order) for i1, i2, i3 in unknowns]
    leading = x_powers[ell + 1]
    rows = [[col[n] for col in columns] for n in range(order)]
    rhs = [-leading[n] for n in range(order)]
    solution = solve_overdetermined(LinearSystem(rows, rhs, QQ))
    terms = dict(zip(unknowns, solution))
    terms[(ell + 1, 0, 0)] = 1
    return WeightedPoly.ccr(kind, ell, terms)


# ---------------------------------------------------------------- direct

#: ell accepted by the division-polynomial method.
DIRECT_ELLS = (3, 5)


def compute_ccr_direct(
        ell: int,
        primes: Optional[Sequence[int]] = None,
        prime_bits: int = 30,
        seed: int = 0,
        extra_points: int = 2,
) -> WeightedPoly:
    """
    U_ell for ell in {3, 5} from division polynomials.

    For each prime, the power sums of the roots of U_ell(X, a, b) are taken as
    traces at random curves (a, b), interpolated as forms in (Y, Z) and turned
    into U_ell mod p by Newton's identities; Chinese remaindering gives U_ell.
    """
    if ell not in DIRECT_ELLS:
        raise ValueError(f"'ell' must be one of {DIRECT_ELLS}, got {ell}")
    chosen = _choose_primes(Kind.U, ell, primes, prime_bits, seed)
    rng = random.Random(seed)
    residues = []
    for p in chosen:
        field = PrimeField(p)
        count = max(count_N23(r) for r in range(1, ell + 2)) + extra_points
        points: list[tuple[int, int]] = []
        while len(points) < count:
            a, b = rng.randrange(p), rng.randrange(p)
            if (4 * a ** 3 + 27 * b ** 2) % p:
                points.append((a, b))
        samples = [direct_power_sums(ell, ell + 1, a, b, p) for a, b in points]
        power_sums = [
            fit_weighted_form(points, [s[r - 1] for s in samples], r, p)
            for r in range(1, ell + 2)
        ]
        logger.debug("direct method: ell=%d mod %d from %d curves", ell, p, count)
        residues.append(_assemble(Kind.U, ell, power_sums, field))
    return _crt_polynomials(Kind.U, ell, residues, _scale_for(ell))


# ---------------------------------------------------------------- numerators

@dataclass(frozen=True)
class NumeratorPair:
    """The numerators N_A (weight ell+2) and N_B (weight ell+3)."""
    n_a: WeightedPoly
    n_b: WeightedPoly


def compute_numerators(ell: int, u_poly: Optional[WeightedPoly] = None, extra_terms: int = 8) -> NumeratorPair:
    """
    Numerators with A* = -N_A(-s, A, B)/U'(s) and B* = -N_B(-s, A, B)/U'(s)
    at a root s of U_ell(X, A, B).

    The unknown coefficients are fitted on the q-expansions of the cusp:
    s = sigma_1(q), A = -3E4(q), B = -2E6(q), A* = -3 ell^4 E4(q^ell),
    B* = -2 ell^6 E6(q^ell).

    Parameters
    ----------
    ell : int
        Odd prime.
    u_poly : WeightedPoly, optional
        U_ell; computed by the series method when omitted.
    extra_terms : int
        Equations beyond the number of unknowns.

    """
    _check_ell(ell)
    if u_poly is None:
        u_poly = compute_ccr_series(Kind.U, ell)
    elif u_poly.kind is not Kind.U or u_poly.ell != ell or u_poly.modulus is not None:
        raise ValueError(f"'u_poly' must be U_{ell} over the rationals")

    sizes = {which: len(xyz_monomials(ell + shift, 1, ell)) for which, shift in (("A", 2), ("B", 3))}
    order = max(max(sizes.values()) + extra_terms, sturm_bound(ell + 3, ell) + 2)
    short = -(-order // ell)
    one = TruncatedSeries.constant(1, order, QQ)
    cusp, _ = root_series(Kind.U, ell, order, QQ)
    a = eisenstein_qexp(4, order, QQ) * -3
    b = eisenstein_qexp(6, order, QQ) * -2
    derivative = u_poly.derivative_x().evaluate(cusp, a, b, one).truncate(order)
    targets = {
        "A": (eisenstein_qexp(4, short, QQ).substitute_power(ell) * (-3 * ell ** 4)).truncate(order),
        "B": (eisenstein_qexp(6, short, QQ).substitute_power(ell) * (-2 * ell ** 6)).truncate(order),
    }

    x = -cusp
    x_powers = [one]
    for _ in range(ell):
        x_powers.append((x_powers[-1] * x).truncate(order))

    result = {}
    for which, shift in (("A", 2), ("B", 3)):
        unknowns = xyz_monomials(ell + shift, 1, ell)
        yz = sorted({(m[1], m[2]) for m in unknowns})
        yz_values = dict(zip(yz, pippenger_batch(a, b, yz, one)))
        columns = [(x_powers[i1] * yz_values[(i2, i3)]).truncate(order) for i1, i2, i3 in unknowns]
        rhs_series = (-(derivative * targets[which])).truncate(order)
        rows = [[col[n] for col in columns] for n in range(order)]
        solution = solve_overdetermined(LinearSystem(rows, [rhs_series[n] for n in range(order)], QQ))
        result[which] = WeightedPoly.numerator(which, ell, dict(zip(unknowns, solution)))
        logger.debug("numerator N_%s for ell=%d: %d terms", which, ell, len(result[which]))
    return NumeratorPair(result["A"], result["B"])


# ---------------------------------------------------------------- checks

def verify_elkies(
        sigma: Sequence[Any],
        a: Any,
        b: Any,
        a_star: Any,
        b_star: Any,
        modulus: Optional[int] = None,
) -> bool:
    """
    Check A - A* = 5(6 s2 + 2A s0) and B - B* = 7(10 s3 + 6A s1 + 4B s0), where
    s_k are the power sums of the kernel abscissas.

    Parameters
    ----------
    sigma : sequence
        s_0, s_1, s_2, s_3.
    a, b : any
        Coefficients of the curve.
    a_star, b_star : any
        Coefficients of the isogenous curve.
    modulus : int, optional
        Compare modulo this prime.

    """
    if len(sigma) < 4:
        raise ValueError(f"'sigma' must hold s_0..s_3, got {len(sigma)} values")
    s0, s1, s2, s3 = sigma[:4]
    lhs_a = a - a_star - 5 * (6 * s2 + 2 * a * s0)
    lhs_b = b - b_star - 7 * (10 * s3 + 6 * a * s1 + 4 * b * s0)
    if modulus is not None:
        return lhs_a % modulus == 0 and lhs_b % modulus == 0
    return lhs_a == 0 and lhs_b == 0


def ccr_cusp_factorization(kind: Kind, ell: int) -> tuple[Fraction, Fraction]:
    """Roots of the CCR polynomial at q = 0: the cusp root (multiplicity 1) and the conjugate root (multiplicity ell)."""
    kind = Kind(kind)
    if kind is Kind.U:
        return Fraction(ell * (ell - 1), 2), Fraction(1 - ell, 2)
    if kind is Kind.V:
        return Fraction(-3 * ell ** 4), Fraction(-3)
    return Fraction(2 * ell ** 6), Fraction(2)
