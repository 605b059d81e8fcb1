"""
Coefficient rings, exact and multiprecision linear algebra, Chinese remaindering
and polynomial arithmetic over prime fields.
"""

import logging
import random
from abc import ABC, abstractmethod
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Any, Iterable, Optional, Sequence

import gmpy2
import mpmath

logger = logging.getLogger(__name__)

# Rounding tolerance used when floating point values are turned into integers
ROUNDING_TOLERANCE = Fraction(1, 2**20)


class PrecisionError(ArithmeticError):
    """Raised when a floating point value is not close enough to an integer."""

    def __init__(self, value: Any, tolerance: Any) -> None:
        self.value = value
        self.tolerance = tolerance
        shown = mpmath.nstr(value, 20) if hasattr(value, "_mpf_") or hasattr(value, "_mpc_") else str(value)
        super().__init__(f"value {shown} is not within {float(tolerance):g} of an integer")


class SingularMatrixError(ArithmeticError):
    """Raised when a linear system has no unique solution."""

    def __init__(self, pivot: Optional[int]) -> None:
        self.pivot = pivot
        where = "unknown pivot" if pivot is None else f"pivot {pivot}"
        super().__init__(f"singular matrix: zero {where}")


class ConsistencyError(ArithmeticError):
    """Raised when an internal cross-check fails."""


class Ring(ABC):
    """
    Coefficient domain used by series, polynomials and linear systems.

    Elements are plain Python numbers (or :class:`CycloElem` / mpmath numbers);
    the ring only knows how to coerce, normalize and divide them.
    """

    #: Characteristic of the ring (0 for rings containing Z).
    characteristic: int = 0

    #: True when arithmetic is exact.
    exact: bool = True

    @property
    def zero(self) -> Any:
        return self(0)

    @property
    def one(self) -> Any:
        return self(1)

    @abstractmethod
    def __call__(self, value: Any) -> Any:
        raise NotImplementedError

    def normalize(self, value: Any) -> Any:
        """Canonical representative of an element produced by Python arithmetic."""
        return value

    @abstractmethod
    def div(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def inv(self, a: Any) -> Any:
        return self.div(self.one, a)

    def is_zero(self, a: Any) -> bool:
        return a == 0


class IntegerRing(Ring):
    """The integers; division must be exact."""

    def __call__(self, value: Any) -> int:
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"{value} is not an integer")
            return value.numerator
        return int(value)

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in ZZ")
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"{a} is not divisible by {b} in ZZ")
        return q

    def __repr__(self) -> str:
        return "ZZ"


class RationalField(Ring):
    """The rationals, elements are ``int`` or ``Fraction`` (integral values kept as ``int``)."""

    def __call__(self, value: Any) -> Any:
        return self.normalize(Fraction(value))

    def normalize(self, value: Any) -> Any:
        if isinstance(value, Fraction) and value.denominator == 1:
            return value.numerator
        return value

    def div(self, a: Any, b: Any) -> Any:
        return self.normalize(Fraction(a) / Fraction(b))

    def __repr__(self) -> str:
        return "QQ"


class PrimeField(Ring):
    """
    The prime field GF(p), elements are integers in [0, p).

    Parameters
    ----------
    p : int
        Odd prime modulus.

    """

    def __init__(self, p: int) -> None:
        if p < 3 or not gmpy2.is_prime(p):
            raise ValueError(f"'p' must be an odd prime, got {p}")
        self.p = int(p)
        self.characteristic = self.p

    def __call__(self, value: Any) -> int:
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def normalize(self, value: Any) -> int:
        return value % self.p

    def div(self, a: int, b: int) -> int:
        b %= self.p
        if b == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return a * pow(b, -1, self.p) % self.p

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    def sqrt(self, a: int) -> Optional[int]:
        """Square root by Tonelli-Shanks, or None for non-residues."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if gmpy2.legendre(a, p) != 1:
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while gmpy2.legendre(z, p) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


class MPField(Ring):
    """
    Multiprecision real/complex numbers at a fixed working precision.

    Each instance owns a private :class:`mpmath.MPContext`, so evaluations at
    different precisions never share state.

    Parameters
    ----------
    prec : int
        Working precision in bits.

    """

    exact = False

    def __init__(self, prec: int) -> None:
        if prec < 16:
            raise ValueError(f"'prec' must be >= 16 bits, got {prec}")
        self.prec = prec
        self.ctx = make_context(prec)

    def __call__(self, value: Any) -> Any:
        if isinstance(value, Fraction):
            return self.ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, complex) or hasattr(value, "_mpc_"):
            return self.ctx.mpc(value)
        return self.ctx.mpf(value)

    def div(self, a: Any, b: Any) -> Any:
        return a / b

    def is_zero(self, a: Any) -> bool:
        return a == 0

    def __repr__(self) -> str:
        return f"MPField({self.prec})"


ZZ = IntegerRing()
QQ = RationalField()


def make_context(prec: int) -> mpmath.MPContext:
    """Fresh mpmath context working at ``prec`` bits."""
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


class CycloElem:
    """
    Element of R[x]/(1 + x + ... + x^(ell-1)), x standing for a primitive ell-th root of unity.

    Parameters
    ----------
    coeffs : iterable
        Coefficients of 1, x, x^2, ... ; any length, reduced on construction.
    ell : int
        Odd prime order of the root of unity.
    ring : Ring
        Base ring of the coefficients.

    """

    __slots__ = ("ell", "ring", "coeffs")

    def __init__(self, coeffs: Iterable[Any], ell: int, ring: Ring = ZZ) -> None:
        self.ell = ell
        self.ring = ring
        folded = [ring.zero] * ell
        for i, c in enumerate(coeffs):
            folded[i % ell] += c
        top = folded[ell - 1]
        self.coeffs = tuple(ring.normalize(c - top) for c in folded[:ell - 1])

    @classmethod
    def zeta_power(cls, k: int, ell: int, ring: Ring = ZZ) -> "CycloElem":
        """The element zeta^k."""
        coeffs = [ring.zero] * ell
        coeffs[k % ell] = ring.one
        return cls(coeffs, ell, ring)

    def _coerce(self, other: Any) -> "CycloElem":
        if isinstance(other, CycloElem):
            if other.ell != self.ell:
                raise ValueError("cyclotomic elements of different orders")
            return other
        return CycloElem([other], self.ell, self.ring)

    def __add__(self, other: Any) -> "CycloElem":
        other = self._coerce(other)
        return CycloElem([a + b for a, b in zip(self.coeffs, other.coeffs)], self.ell, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "CycloElem":
        return CycloElem([-a for a in self.coeffs], self.ell, self.ring)

    def __sub__(self, other: Any) -> "CycloElem":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "CycloElem":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "CycloElem":
        if not isinstance(other, CycloElem):
            return CycloElem([a * other for a in self.coeffs], self.ell, self.ring)
        other = self._coerce(other)
        prod = [self.ring.zero] * self.ell
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                prod[(i + j) % self.ell] += a * b
        return CycloElem(prod, self.ell, self.ring)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycloElem":
        result = CycloElem([self.ring.one], self.ell, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CycloElem):
            return self.ell == other.ell and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == CycloElem([other], self.ell, self.ring)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ell, self.coeffs))

    def is_rational(self) -> bool:
        """True when the element lies in the base ring."""
        return all(c == 0 for c in self.coeffs[1:])

    def rational_part(self) -> Any:
        if not self.is_rational():
            raise ConsistencyError(f"cyclotomic element {self.coeffs} has a nonzero irrational part")
        return self.coeffs[0]

    def __repr__(self) -> str:
        return f"CycloElem({list(self.coeffs)}, ell={self.ell})"


class CyclotomicRing(Ring):
    """Ring of :class:`CycloElem` over a base ring."""

    def __init__(self, ell: int, base: Ring = ZZ) -> None:
        self.ell = ell
        self.base = base
        self.characteristic = base.characteristic

    def __call__(self, value: Any) -> CycloElem:
        if isinstance(value, CycloElem):
            return value
        return CycloElem([self.base(value)], self.ell, self.base)

    def div(self, a: CycloElem, b: Any) -> CycloElem:
        if isinstance(b, CycloElem):
            b = b.rational_part()
        return CycloElem([self.base.div(c, b) for c in a.coeffs], self.ell, self.base)

    def is_zero(self, a: Any) -> bool:
        return a == 0


def round_to_integer(x: Any, tol: Any = ROUNDING_TOLERANCE) -> int:
    """
    Round a real multiprecision value to the nearest integer.

    Parameters
    ----------
    x : mpf, mpc, Fraction or int
        Value to round; the imaginary part of a complex value is ignored.
    tol : Fraction or float
        Maximum accepted distance to the nearest integer.

    Returns
    -------
    int
        Nearest integer.

    Raises
    ------
    PrecisionError
        If ``x`` is at distance ``>= tol`` from every integer.

    """
    exact = to_fraction(x)
    nearest = round(exact)
    if abs(exact - nearest) >= Fraction(tol):
        raise PrecisionError(x, tol)
    return int(nearest)


def to_fraction(x: Any) -> Fraction:
    """Exact rational value of an int, Fraction or (real part of an) mpmath number."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if hasattr(x, "_mpc_"):
        x = x.real
    sign, man, exp, bc = x._mpf_
    if not man and bc < 0:
        raise ValueError(f"cannot convert {x} to a fraction")
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


class MatrixShape(str, Enum):
    """Shape flag of a :class:`LinearSystem`."""
    GENERAL = "general"
    LOWER = "lower"
    UPPER = "upper"


class LinearSystem:
    """
    Linear system ``rows * x = rhs`` over a ring.

    Parameters
    ----------
    rows : sequence of sequences
        Matrix rows.
    rhs : sequence
        Right-hand side.
    ring : Ring
        Ring of the entries (``QQ``, ``ZZ``, a :class:`PrimeField` or an :class:`MPField`).
    shape : MatrixShape
        Triangular systems are solved by substitution.

    """

    def __init__(
            self,
            rows: Sequence[Sequence[Any]],
            rhs: Sequence[Any],
            ring: Ring = QQ,
            shape: MatrixShape = MatrixShape.GENERAL,
    ) -> None:
        self.rows = tuple(tuple(row) for row in rows)
        self.rhs = tuple(rhs)
        self.ring = ring
        self.shape = MatrixShape(shape)

        if len(self.rows) != len(self.rhs):
            raise ValueError("'rhs' must have one entry per row")
        if any(len(row) != self.num_unknowns for row in self.rows):
            raise ValueError("all rows must have the same length")

    @property
    def num_unknowns(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def is_square(self) -> bool:
        return len(self.rows) == self.num_unknowns

    def residual(self, solution: Sequence[Any]) -> list:
        """``rows * solution - rhs``."""
        return [
            self.ring.normalize(sum((a * x for a, x in zip(row, solution)), self.ring.zero) - b)
            for row, b in zip(self.rows, self.rhs)
        ]


def solve_linear(system: LinearSystem) -> list:
    """
    Solve a square linear system.

    Triangular systems use substitution; general systems use fraction-free
    elimination (rationals), Gaussian elimination (prime fields) or LU with
    partial pivoting (multiprecision floats).

    Parameters
    ----------
    system : LinearSystem
        Square system.

    Returns
    -------
    list
        Solution vector.

    Raises
    ------
    SingularMatrixError
        If a pivot vanishes.

    """
    if not system.is_square:
        raise ValueError(f"system is not square ({len(system.rows)} x {system.num_unknowns})")
    if system.shape is MatrixShape.LOWER:
        return _substitute(system, range(system.num_unknowns))
    if system.shape is MatrixShape.UPPER:
        return _substitute(system, range(system.num_unknowns - 1, -1, -1))
    if isinstance(system.ring, MPField):
        return _solve_float(system)
    return solve_overdetermined(system)


def solve_overdetermined(system: LinearSystem) -> list:
    """
    Solve an exact system with at least as many rows as unknowns.

    Rows beyond the rank must be consistent; this is how the q-series and
    interpolation systems check themselves.

    Raises
    ------
    SingularMatrixError
        If the matrix does not have full column rank.
    ConsistencyError
        If the extra rows contradict the solution.

    """
    if not system.ring.exact:
        raise ValueError("overdetermined systems are solved over exact rings only")
    if len(system.rows) < system.num_unknowns:
        raise SingularMatrixError(len(system.rows))
    if isinstance(system.ring, PrimeField):
        return _gauss_mod_p(system)
    return _bareiss(system)


def _substitute(system: LinearSystem, order: Iterable[int]) -> list:
    ring = system.ring
    n = system.num_unknowns
    x: list = [ring.zero] * n
    done: list[int] = []
    for i in order:
        row = system.rows[i]
        if ring.is_zero(row[i]):
            raise SingularMatrixError(i)
        acc = system.rhs[i] - sum((row[j] * x[j] for j in done), ring.zero)
        x[i] = ring.div(ring.normalize(acc), row[i])
        done.append(i)
    return x


def _bareiss(system: LinearSystem) -> list:
    n = system.num_unknowns
    matrix = []
    for row, b in zip(system.rows, system.rhs):
        entries = [Fraction(a) for a in row] + [Fraction(b)]
        scale = reduce(lcm, (e.denominator for e in entries), 1)
        matrix.append([int(e * scale) for e in entries])

    m = len(matrix)
    prev = 1
    for k in range(n):
        pivot = next((i for i in range(k, m) if matrix[i][k] != 0), None)
        if pivot is None:
            raise SingularMatrixError(k)
        matrix[k], matrix[pivot] = matrix[pivot], matrix[k]
        pk = matrix[k]
        for i in range(k + 1, m):
            row = matrix[i]
            factor = row[k]
            for j in range(k + 1, n + 1):
                row[j] = (row[j] * pk[k] - factor * pk[j]) // prev
            row[k] = 0
        prev = pk[k]

    for i in range(n, m):
        if matrix[i][n] != 0:
            raise ConsistencyError(f"overdetermined system is inconsistent at row {i}")

    x: list = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = Fraction(matrix[k][n]) - sum(matrix[k][j] * x[j] for j in range(k + 1, n))
        x[k] = acc / matrix[k][k]
    return [system.ring.normalize(v) if isinstance(system.ring, RationalField) else system.ring(v) for v in x]


def _gauss_mod_p(system: LinearSystem) -> list:
    p = system.ring.p
    n = system.num_unknowns
    matrix = [[a % p for a in row] + [b % p] for row, b in zip(system.rows, system.rhs)]
    m = len(matrix)
    for k in range(n):
        pivot = next((i for i in range(k, m) if matrix[i][k]), None)
        if pivot is None:
            raise SingularMatrixError(k)
        matrix[k], matrix[pivot] = matrix[pivot], matrix[k]
        inv = pow(matrix[k][k], -1, p)
        matrix[k] = [a * inv % p for a in matrix[k]]
        for i in range(m):
            if i != k and matrix[i][k]:
                factor = matrix[i][k]
                matrix[i] = [(a - factor * b) % p for a, b in zip(matrix[i], matrix[k])]
    for i in range(n, m):
        if matrix[i][n]:
            raise ConsistencyError(f"overdetermined system is inconsistent at row {i} mod {p}")
    return [matrix[k][n] for k in range(n)]


def _solve_float(system: LinearSystem) -> list:
    ctx = system.ring.ctx
    try:
        solution = ctx.lu_solve(ctx.matrix(system.rows), ctx.matrix(system.rhs))
    except ZeroDivisionError as err:
        raise SingularMatrixError(None) from err
    return [solution[i] for i in range(system.num_unknowns)]


def crt_combine(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """
    Chinese remaindering into the symmetric range (-M/2, M/2].

    Parameters
    ----------
    residues : sequence of int
        Value modulo each modulus.
    moduli : sequence of int
        Pairwise coprime moduli.

    Returns
    -------
    int
        Unique symmetric representative.

    """
    if len(residues) != len(moduli):
        raise ValueError("'residues' and 'moduli' must have the same length")
    if len(set(moduli)) != len(moduli):
        raise ValueError("duplicate moduli")

    x, modulus = 0, 1
    for r, p in zip(residues, moduli):
        try:
            t = (r - x) * pow(modulus, -1, p) % p
        except ValueError as err:
            raise ValueError("moduli are not pairwise coprime") from err
        x += modulus * t
        modulus *= p
    if x > modulus // 2:
        x -= modulus
    return x


def random_primes(count: int, bits: int = 30, exclude: Iterable[int] = (), seed: int = 0) -> list[int]:
    """
    Distinct random primes of ``bits`` bits.

    Parameters
    ----------
    count : int
        Number of primes.
    bits : int
        Bit length of each prime.
    exclude : iterable of int
        Primes that must not be returned.
    seed : int
        Seed of the generator.

    """
    rng = random.Random(seed)
    excluded = set(exclude)
    primes: list[int] = []
    while len(primes) < count:
        candidate = int(gmpy2.next_prime(rng.getrandbits(bits - 1) | (1 << (bits - 1))))
        if candidate.bit_length() == bits and candidate not in excluded and candidate not in primes:
            primes.append(candidate)
    return primes


def is_odd_prime(n: int) -> bool:
    return n > 2 and bool(gmpy2.is_prime(n))


class FpPolynomial:
    """
    Univariate polynomial over GF(p), coefficients from the constant term up.

    Parameters
    ----------
    coeffs : iterable of int
        Coefficients, constant first.
    p : int
        Prime modulus.

    """

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs: Iterable[int], p: int) -> None:
        self.p = p
        c = [int(a) % p for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls, p: int) -> "FpPolynomial":
        return cls([0, 1], p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _coerce(self, other: Any) -> "FpPolynomial":
        if isinstance(other, FpPolynomial):
            return other
        return FpPolynomial([other], self.p)

    def __add__(self, other: Any) -> "FpPolynomial":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return FpPolynomial([x + y for x, y in zip(a, b)], self.p)

    __radd__ = __add__

    def __neg__(self) -> "FpPolynomial":
        return FpPolynomial([-a for a in self.coeffs], self.p)

    def __sub__(self, other: Any) -> "FpPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "FpPolynomial":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "FpPolynomial":
        if not isinstance(other, FpPolynomial):
            return FpPolynomial([a * other for a in self.coeffs], self.p)
        if not self.coeffs or not other.coeffs:
            return FpPolynomial([], self.p)
        prod = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return FpPolynomial(prod, self.p)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FpPolynomial":
        result = FpPolynomial([1], self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: "FpPolynomial") -> tuple["FpPolynomial", "FpPolynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        dq = other.degree
        inv = pow(other.leading(), -1, p)
        quot = [0] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1 - dq, -1, -1):
            c = rem[i + dq] * inv % p
            quot[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i + j] = (rem[i + j] - c * b) % p
        return FpPolynomial(quot, p), FpPolynomial(rem[:dq], p)

    def __mod__(self, other: "FpPolynomial") -> "FpPolynomial":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "FpPolynomial") -> "FpPolynomial":
        return divmod(self, other)[0]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = FpPolynomial([other], self.p)
        if not isinstance(other, FpPolynomial):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def monic(self) -> "FpPolynomial":
        return self * pow(self.leading(), -1, self.p)

    def powmod(self, e: int, modulus: "FpPolynomial") -> "FpPolynomial":
        result = FpPolynomial([1], self.p) % modulus
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result

    def gcd(self, other: "FpPolynomial") -> "FpPolynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def inverse_mod(self, modulus: "FpPolynomial") -> "FpPolynomial":
        """Inverse modulo ``modulus`` by the extended Euclidean algorithm."""
        r0, r1 = modulus, self % modulus
        s0, s1 = FpPolynomial([], self.p), FpPolynomial([1], self.p)
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r0.degree != 0:
            raise ArithmeticError("polynomial is not invertible modulo the given modulus")
        return (s0 * pow(r0.leading(), -1, self.p)) % modulus

    def roots(self, rng: Optional[random.Random] = None) -> list[int]:
        """
        Distinct roots in GF(p), sorted, by equal-degree splitting.

        Parameters
        ----------
        rng : random.Random
            Source of the splitting elements.

        """
        rng = rng or random.Random(0)
        if self.degree < 1:
            return []
        x = FpPolynomial.x(self.p)
        split = (x.powmod(self.p, self) - x).gcd(self)
        found: list[int] = []
        self._split(split, rng, found)
        return sorted(found)

    def _split(self, g: "FpPolynomial", rng: random.Random, found: list[int]) -> None:
        if g.degree < 1:
            return
        if g.degree == 1:
            found.append(-g.coeffs[0] * pow(g.coeffs[1], -1, self.p) % self.p)
            return
        while True:
            a = rng.randrange(self.p)
            h = (FpPolynomial([a, 1], self.p).powmod((self.p - 1) // 2, g) - 1).gcd(g)
            if 0 < h.degree < g.degree:
                break
        self._split(h, rng, found)
        self._split(g // h, rng, found)

    def __repr__(self) -> str:
        return f"FpPolynomial({list(self.coeffs)}, p={self.p})"
