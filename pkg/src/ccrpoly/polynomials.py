"""
Weighted polynomials in (X, Y, Z): the CCR polynomials and the isogeny
numerators, their text/JSON formats, monomial counting, Newton's identities,
batched monomial products and height statistics.
"""

import json
import operator
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from math import lcm, log
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence, Union

from .arith import QQ, ConsistencyError, LinearSystem, PrimeField, Ring, solve_overdetermined

Monomial = tuple[int, ...]


class Kind(IntEnum):
    """CCR polynomial kind; the value is the weight of X."""
    U = 1
    V = 2
    W = 3


class MalformedFileError(ValueError):
    """Raised when a polynomial or class-polynomial file cannot be parsed."""

    def __init__(self, path: Union[str, Path], line: int, message: str) -> None:
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class SparsePoly:
    """
    Multivariate polynomial stored as ``{exponent tuple: coefficient}``.

    Parameters
    ----------
    terms : dict
        Nonzero coefficients keyed by exponent tuples.
    nvars : int
        Number of variables.
    ring : Ring
        Coefficient ring.

    """

    __slots__ = ("terms", "nvars", "ring")

    def __init__(self, terms: dict, nvars: int, ring: Ring = QQ) -> None:
        self.nvars = nvars
        self.ring = ring
        self.terms = {}
        for exps, c in terms.items():
            c = ring.normalize(c)
            if not ring.is_zero(c):
                self.terms[tuple(exps)] = c

    @classmethod
    def variable(cls, index: int, nvars: int, ring: Ring = QQ) -> "SparsePoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls({tuple(exps): ring.one}, nvars, ring)

    @classmethod
    def constant(cls, value: Any, nvars: int, ring: Ring = QQ) -> "SparsePoly":
        return cls({(0,) * nvars: ring(value)}, nvars, ring)

    def _coerce(self, other: Any) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return other
        return SparsePoly.constant(other, self.nvars, self.ring)

    def __add__(self, other: Any) -> "SparsePoly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            terms[exps] = terms.get(exps, 0) + c
        return SparsePoly(terms, self.nvars, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly({e: -c for e, c in self.terms.items()}, self.nvars, self.ring)

    def __sub__(self, other: Any) -> "SparsePoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "SparsePoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return SparsePoly({e: c * other for e, c in self.terms.items()}, self.nvars, self.ring)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                terms[exps] = terms.get(exps, 0) + c1 * c2
        return SparsePoly(terms, self.nvars, self.ring)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "SparsePoly":
        result = SparsePoly.constant(1, self.nvars, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divide_scalar(self, d: Any) -> "SparsePoly":
        return SparsePoly({e: self.ring.div(c, d) for e, c in self.terms.items()}, self.nvars, self.ring)

    def map_coefficients(self, fn: Callable[[Any], Any], ring: Ring) -> "SparsePoly":
        return SparsePoly({e: fn(c) for e, c in self.terms.items()}, self.nvars, ring)

    def is_zero(self) -> bool:
        return not self.terms

    def weighted_degrees(self, weights: Sequence[int]) -> set[int]:
        return {sum(w * a for w, a in zip(weights, e)) for e in self.terms}

    def degree(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=-1)

    def coefficient(self, exps: Monomial) -> Any:
        return self.terms.get(tuple(exps), 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SparsePoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"SparsePoly({dict(sorted(self.terms.items(), reverse=True))})"


class MultiplicationCounter:
    """Counts the multiplications performed by :func:`pippenger_batch`."""

    def __init__(self) -> None:
        self.count = 0


def naive_multiplication_count(monomials: Iterable[tuple[int, int]]) -> int:
    """Multiplications needed to form each Y^a Z^b separately by repeated multiplication."""
    return sum(max(a + b - 1, 0) for a, b in monomials)


def pippenger_batch(
        y: Any,
        z: Any,
        monomials: Sequence[tuple[int, int]],
        one: Any = 1,
        mul: Callable[[Any, Any], Any] = operator.mul,
        counter: Optional[MultiplicationCounter] = None,
) -> list:
    """
    All products Y^a Z^b for the requested exponent pairs from one shared
    vector addition chain.

    The requested pairs are built in increasing total degree. Each new pair
    is the product of two pairs already in the chain when such a split
    exists, a square when both exponents are even, and otherwise one step
    up from a smaller pair; intermediate pairs stay in the chain and are
    reused by later requests. Every pair in the chain costs exactly one
    multiplication, so the total never exceeds the cost of forming each
    monomial on its own.

    Parameters
    ----------
    y, z : any
        Values of Y and Z (numbers, series, residues).
    monomials : sequence of (a, b)
        Requested exponent pairs.
    one : any
        Multiplicative identity of the values.
    mul : callable
        Multiplication, e.g. multiplication modulo p.
    counter : MultiplicationCounter, optional
        Receives the number of multiplications used.

    Returns
    -------
    list
        Products in the order of ``monomials``.

    """
    counter = counter or MultiplicationCounter()
    chain: dict[tuple[int, int], Any] = {(0, 0): one, (1, 0): y, (0, 1): z}

    def split(target: tuple[int, int]) -> Optional[tuple[tuple[int, int], tuple[int, int]]]:
        a, b = target
        for u in chain:
            v = (a - u[0], b - u[1])
            if u != (0, 0) and v[0] >= 0 and v[1] >= 0 and v in chain:
                return u, v
        return None

    def build(target: tuple[int, int]) -> Any:
        if target in chain:
            return chain[target]
        a, b = target
        parts = split(target)
        if parts is None:
            if a % 2 == 0 and b % 2 == 0:
                half = (a // 2, b // 2)
                build(half)
                parts = (half, half)
            elif a >= b:
                build((a - 1, b))
                parts = ((a - 1, b), (1, 0))
            else:
                build((a, b - 1))
                parts = ((a, b - 1), (0, 1))
        chain[target] = mul(chain[parts[0]], chain[parts[1]])
        counter.count += 1
        return chain[target]

    for target in sorted(set(map(tuple, monomials)), key=lambda m: (m[0] + m[1], m)):
        build(target)
    return [chain[tuple(m)] for m in monomials]


def count_N123(n: int) -> int:
    """Number of solutions of i1 + 2 i2 + 3 i3 = n in nonnegative integers."""
    if n < 0:
        raise ValueError(f"'n' must be >= 0, got {n}")
    return ((n + 3) ** 2 + 6) // 12


def count_N23(n: int) -> int:
    """Number of solutions of 2 i2 + 3 i3 = n in nonnegative integers."""
    if n < 0:
        raise ValueError(f"'n' must be >= 0, got {n}")
    extra = {0: Fraction(2, 3), 1: Fraction(0), 2: Fraction(1, 3)}[n % 3]
    value = Fraction(n + 1, 6) + Fraction((-1) ** n, 4) - Fraction(1, 12) + extra
    return int(value)


def yz_monomials(weight: int) -> list[tuple[int, int]]:
    """Exponent pairs (i2, i3) with 2 i2 + 3 i3 = weight, i2 decreasing."""
    return [((weight - 3 * b) // 2, b) for b in range(weight // 3 + 1) if (weight - 3 * b) % 2 == 0]


def xyz_monomials(weight: int, x_weight: int = 1, max_x: Optional[int] = None) -> list[Monomial]:
    """Exponent triples with x_weight i1 + 2 i2 + 3 i3 = weight, canonical order."""
    top = weight // x_weight if max_x is None else min(max_x, weight // x_weight)
    result = []
    for i1 in range(top, -1, -1):
        for i2, i3 in yz_monomials(weight - x_weight * i1):
            result.append((i1, i2, i3))
    return result


def newton_to_coeffs(power_sums: Sequence[Any], degree: int, ring: Ring = QQ) -> list:
    """
    Monic polynomial with the given power sums of its roots.

    Parameters
    ----------
    power_sums : sequence
        p_1, ..., p_degree (numbers or :class:`SparsePoly`).
    degree : int
        Degree of the polynomial.
    ring : Ring
        Ring of the power sums (their coefficient ring for polynomials).

    Returns
    -------
    list
        Coefficients c_0, ..., c_degree (constant first, c_degree = 1).

    """
    if len(power_sums) < degree:
        raise ValueError(f"need {degree} power sums, got {len(power_sums)}")
    if 0 < ring.characteristic <= degree:
        raise ValueError(f"characteristic {ring.characteristic} is too small for degree {degree}")

    def divide(value: Any, d: int) -> Any:
        if isinstance(value, SparsePoly):
            return value.divide_scalar(d)
        return ring.div(value, ring(d))

    elementary: list = [ring.one]
    for i in range(1, degree + 1):
        acc: Any = ring.zero
        for j in range(1, i + 1):
            term = elementary[i - j] * power_sums[j - 1]
            acc = acc + term if j % 2 else acc - term
        elementary.append(divide(acc, i))

    coeffs: list = [None] * (degree + 1)
    for i, e in enumerate(elementary):
        coeffs[degree - i] = e if i % 2 == 0 else -e
    return coeffs


def power_sums_from_coeffs(coeffs: Sequence[Any], count: int, ring: Ring = QQ) -> list:
    """Power sums p_1, ..., p_count of the roots of the monic polynomial ``coeffs`` (constant first)."""
    degree = len(coeffs) - 1
    elementary = [(-1) ** i * coeffs[degree - i] for i in range(degree + 1)]
    sums: list = []
    for k in range(1, count + 1):
        acc: Any = ring.zero
        for i in range(1, min(k - 1, degree) + 1):
            term = elementary[i] * sums[k - i - 1]
            acc = acc + term if i % 2 else acc - term
        if k <= degree:
            term = elementary[k] * k
            acc = acc + term if k % 2 else acc - term
        sums.append(ring.normalize(acc) if not isinstance(acc, SparsePoly) else acc)
    return sums


def _format_coefficient(c: Any) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _parse_coefficient(text: str) -> Any:
    value = Fraction(text)
    return value.numerator if value.denominator == 1 else value


class WeightedPoly:
    """
    Polynomial in (X, Y, Z) homogeneous for the weights (x_weight, 2, 3).

    Y and Z stand for the curve coefficients A and B. CCR polynomials are
    built with :meth:`ccr`, numerators with :meth:`numerator`.

    Parameters
    ----------
    terms : dict
        ``{(i1, i2, i3): coefficient}``.
    ell : int
        Isogeny degree.
    weight : int
        Total weight of every monomial.
    x_weight : int
        Weight of X.
    kind : Kind, optional
        Set for CCR polynomials.
    which : str, optional
        ``"A"`` or ``"B"`` for numerators.
    modulus : int, optional
        Prime modulus when the coefficients are residues.

    """

    def __init__(
            self,
            terms: dict,
            ell: int,
            weight: int,
            x_weight: int = 1,
            kind: Optional[Kind] = None,
            which: Optional[str] = None,
            modulus: Optional[int] = None,
    ) -> None:
        self.ell = ell
        self.weight = weight
        self.x_weight = x_weight
        self.kind = None if kind is None else Kind(kind)
        self.which = which
        self.modulus = modulus
        self.ring: Ring = QQ if modulus is None else PrimeField(modulus)
        self.terms = {}
        for mono, c in terms.items():
            c = self.ring(c)
            if c != 0:
                self.terms[tuple(mono)] = c

        for mono in self.terms:
            if x_weight * mono[0] + 2 * mono[1] + 3 * mono[2] != weight:
                raise ValueError(f"monomial {mono} does not have weight {weight}")

    @classmethod
    def ccr(cls, kind: Kind, ell: int, terms: dict, modulus: Optional[int] = None) -> "WeightedPoly":
        """CCR polynomial of the given kind; checks monicity and, for kind U, the vanishing trace."""
        kind = Kind(kind)
        poly = cls(terms, ell, kind * (ell + 1), kind, kind=kind, modulus=modulus)
        if poly.coefficient((ell + 1, 0, 0)) != 1:
            raise ValueError("CCR polynomial must be monic in X of degree ell+1")
        if kind is Kind.U and poly.coefficient((ell, 0, 0)) != 0:
            raise ValueError("kind U polynomial must have no X^ell term")
        return poly

    @classmethod
    def numerator(cls, which: str, ell: int, terms: dict) -> "WeightedPoly":
        """Numerator N_A (weight ell+2) or N_B (weight ell+3) in (X, A, B)."""
        if which not in ("A", "B"):
            raise ValueError(f"'which' must be 'A' or 'B', got {which!r}")
        return cls(terms, ell, ell + (2 if which == "A" else 3), 1, which=which)

    @classmethod
    def from_x_coefficients(
            cls,
            kind: Kind,
            ell: int,
            coeffs: Sequence[Any],
            modulus: Optional[int] = None,
    ) -> "WeightedPoly":
        """Assemble a CCR polynomial from its X-coefficients, each a number or a (Y, Z) :class:`SparsePoly`."""
        terms: dict = {}
        for i1, c in enumerate(coeffs):
            if isinstance(c, SparsePoly):
                for (i2, i3), value in c.terms.items():
                    terms[(i1, i2, i3)] = value
            elif c != 0:
                terms[(i1, 0, 0)] = c
        return cls.ccr(kind, ell, terms, modulus)

    def coefficient(self, mono: Monomial) -> Any:
        return self.terms.get(tuple(mono), 0)

    def items(self) -> Iterator[tuple[Monomial, Any]]:
        """Terms in canonical order: (i1, i2, i3) lexicographically decreasing."""
        for mono in sorted(self.terms, reverse=True):
            yield mono, self.terms[mono]

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedPoly):
            return NotImplemented
        return (self.ell, self.weight, self.x_weight, self.kind, self.which, self.modulus, self.terms) == \
            (other.ell, other.weight, other.x_weight, other.kind, other.which, other.modulus, other.terms)

    @property
    def x_degree(self) -> int:
        return max((m[0] for m in self.terms), default=-1)

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.terms.values())

    def denominator(self) -> int:
        return lcm(*(Fraction(c).denominator for c in self.terms.values()))

    def reduce_mod(self, p: int) -> "WeightedPoly":
        """Reduction modulo a prime not dividing any denominator."""
        field = PrimeField(p)
        terms = {m: field(Fraction(c)) for m, c in self.terms.items()}
        return WeightedPoly(terms, self.ell, self.weight, self.x_weight, self.kind, self.which, p)

    def derivative_x(self) -> "WeightedPoly":
        """Partial derivative in X (a weighted polynomial of weight ``weight - x_weight``)."""
        terms = {(i1 - 1, i2, i3): c * i1 for (i1, i2, i3), c in self.terms.items() if i1}
        return WeightedPoly(terms, self.ell, self.weight - self.x_weight, self.x_weight, modulus=self.modulus)

    def evaluate(self, x: Any, y: Any, z: Any, one: Any = 1) -> Any:
        """
        Value at (x, y, z); the arguments may be numbers or series.

        Powers of Y and Z are shared through :func:`pippenger_batch`.
        """
        by_x: dict[int, list[tuple[tuple[int, int], Any]]] = {}
        for (i1, i2, i3), c in self.terms.items():
            by_x.setdefault(i1, []).append(((i2, i3), c))
        yz_needed = sorted({m for group in by_x.values() for m, _ in group})
        yz_values = dict(zip(yz_needed, pippenger_batch(y, z, yz_needed, one)))
        total: Any = None
        x_power: Any = one
        for i1 in range(max(by_x, default=0) + 1):
            if i1:
                x_power = x_power * x
            if i1 not in by_x:
                continue
            inner: Any = None
            for mono, c in by_x[i1]:
                term = yz_values[mono] * c
                inner = term if inner is None else inner + term
            term = inner * x_power if i1 else inner
            total = term if total is None else total + term
        return 0 if total is None else total

    def header(self) -> str:
        if self.which is not None:
            head = f"CCRNUM which={self.which} ell={self.ell}"
        else:
            kind = self.kind.name if self.kind is not None else "?"
            head = f"CCR kind={kind} ell={self.ell}"
        if self.modulus is not None:
            head += f" p={self.modulus}"
        return head

    def to_text(self) -> str:
        lines = [self.header()]
        lines.extend(f"{i1} {i2} {i3} {_format_coefficient(c)}" for (i1, i2, i3), c in self.items())
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data: dict[str, Any] = {"format": "CCRNUM" if self.which is not None else "CCR"}
        if self.which is not None:
            data["which"] = self.which
        else:
            data["kind"] = self.kind.name if self.kind is not None else None
        data["ell"] = self.ell
        data["modulus"] = self.modulus
        data["terms"] = [[i1, i2, i3, _format_coefficient(c)] for (i1, i2, i3), c in self.items()]
        return json.dumps(data, indent=1) + "\n"

    @classmethod
    def from_text(cls, text: str, path: Union[str, Path] = "<string>") -> "WeightedPoly":
        lines = [(n, line.strip()) for n, line in enumerate(text.splitlines(), start=1)]
        lines = [(n, line) for n, line in lines if line and not line.startswith("#")]
        if not lines:
            raise MalformedFileError(path, 1, "empty polynomial file")
        n, head = lines[0]
        fields = head.split()
        try:
            options = dict(item.split("=", 1) for item in fields[1:])
            ell = int(options["ell"])
            modulus = int(options["p"]) if "p" in options else None
        except (ValueError, KeyError) as err:
            raise MalformedFileError(path, n, f"bad header {head!r}") from err

        terms = {}
        for n, line in lines[1:]:
            parts = line.split()
            if len(parts) != 4:
                raise MalformedFileError(path, n, f"expected 'i1 i2 i3 coefficient', got {line!r}")
            try:
                mono = tuple(int(v) for v in parts[:3])
                terms[mono] = _parse_coefficient(parts[3])
            except (ValueError, ZeroDivisionError) as err:
                raise MalformedFileError(path, n, f"bad term {line!r}") from err

        try:
            if fields[0] == "CCR":
                return cls.ccr(Kind[options["kind"]], ell, terms, modulus)
            if fields[0] == "CCRNUM":
                return cls.numerator(options["which"], ell, terms)
        except (ValueError, KeyError) as err:
            raise MalformedFileError(path, lines[0][0], str(err)) from err
        raise MalformedFileError(path, lines[0][0], f"unknown format {fields[0]!r}")

    @classmethod
    def from_json(cls, text: str, path: Union[str, Path] = "<string>") -> "WeightedPoly":
        try:
            data = json.loads(text)
            terms = {tuple(t[:3]): _parse_coefficient(str(t[3])) for t in data["terms"]}
            if data["format"] == "CCRNUM":
                return cls.numerator(data["which"], data["ell"], terms)
            return cls.ccr(Kind[data["kind"]], data["ell"], terms, data.get("modulus"))
        except json.JSONDecodeError as err:
            raise MalformedFileError(path, err.lineno, err.msg) from err
        except (ValueError, KeyError, TypeError, IndexError) as err:
            raise MalformedFileError(path, 1, f"bad JSON polynomial: {err}") from err

    def __repr__(self) -> str:
        return f"WeightedPoly({self.header()!r}, {len(self.terms)} terms)"


def read_polynomial(path: Union[str, Path]) -> WeightedPoly:
    """Read a polynomial in text or JSON format."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        return WeightedPoly.from_json(text, path)
    return WeightedPoly.from_text(text, path)


def write_polynomial(poly: WeightedPoly, path: Union[str, Path], fmt: str = "text") -> None:
    """Write a polynomial in ``text`` or ``json`` format."""
    if fmt not in ("text", "json"):
        raise ValueError(f"'fmt' must be 'text' or 'json', got {fmt!r}")
    Path(path).write_text(poly.to_text() if fmt == "text" else poly.to_json())


@dataclass(frozen=True)
class HeightStats:
    """Size statistics of a polynomial."""

    #: Natural logarithm of the largest numerator magnitude.
    height: float

    #: Height divided by (ell+1) log ell.
    relative_height: float

    #: Sum of the bit lengths of the numerators of all coefficients.
    bits: int


def height_stats(poly: WeightedPoly) -> HeightStats:
    """
    Height H, relative height and bit size S of a polynomial.

    Only numerators count towards H and S; the leading coefficient 1 of a
    CCR polynomial contributes one bit.
    """
    if not poly.terms:
        raise ValueError("height of the zero polynomial")
    numerators = [abs(Fraction(c).numerator) for c in poly.terms.values()]
    height = log(max(numerators))
    return HeightStats(
        height=height,
        relative_height=height / ((poly.ell + 1) * log(poly.ell)),
        bits=sum(n.bit_length() for n in numerators),
    )


def fit_weighted_form(
        points: Sequence[tuple[int, int]],
        values: Sequence[int],
        weight: int,
        p: int,
        counter: Optional[MultiplicationCounter] = None,
) -> SparsePoly:
    """
    The form P(Y, Z) = sum c_ab Y^a Z^b over 2a + 3b = ``weight`` with
    P(y_i, z_i) = values[i] modulo p.

    More points than unknowns make the system check itself.

    Raises
    ------
    ConsistencyError
        If no such form fits all points.

    """
    field = PrimeField(p)
    monomials = yz_monomials(weight)
    if not monomials:
        if any(v % p for v in values):
            raise ConsistencyError(f"nonzero values for the empty weight {weight}")
        return SparsePoly({}, 2, field)
    rows = [
        pippenger_batch(y, z, monomials, 1, lambda u, v: u * v % p, counter)
        for y, z in points
    ]
    solution = solve_overdetermined(LinearSystem(rows, list(values), field))
    return SparsePoly(dict(zip(monomials, solution)), 2, field)
