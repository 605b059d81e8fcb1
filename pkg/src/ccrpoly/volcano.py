"""
CCR polynomials modulo a prime p through the crater of an isogeny volcano.

The j-invariants of the crater are the roots of the class polynomial H_D
modulo p. At each crater curve the ell+1 isogenies of degree ell are found
with Velu's formulas; the power sums of sigma_1 (or A*, -B*) over the
neighbours are forms in (A, B) that are interpolated from the curves and
turned into U_ell (or V_ell, W_ell) mod p by Newton's identities.
"""

import logging
import os
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import gmpy2

from .arith import ConsistencyError, FpPolynomial, PrimeField, is_odd_prime
from .ccr import verify_elkies
from .polynomials import (
    Kind,
    MalformedFileError,
    SparsePoly,
    WeightedPoly,
    count_N23,
    fit_weighted_form,
    newton_to_coeffs,
)

logger = logging.getLogger(__name__)

#: Environment variable overriding the class-polynomial directory.
DATA_DIR_ENV = "CCRPOLY_DATA_DIR"

#: Random points tested with m P = O before a twist is accepted.
TWIST_TRIALS = 20

#: Random draws allowed when looking for points of order ell.
POINT_TRIALS = 200


# ---------------------------------------------------------------- curves

@dataclass(frozen=True)
class PointFp:
    """Affine point (x, y), or the point at infinity when both are None."""
    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None


INFINITY = PointFp()


@dataclass(frozen=True)
class CurveFp:
    """
    The curve y^2 = x^3 + ax + b over GF(p).

    Parameters
    ----------
    a, b : int
        Coefficients, reduced modulo p.
    p : int
        Odd prime, greater than 3.

    """
    a: int
    b: int
    p: int

    def __post_init__(self) -> None:
        if self.p <= 3 or not gmpy2.is_prime(self.p):
            raise ValueError(f"'p' must be a prime > 3, got {self.p}")
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if self.discriminant == 0:
            raise ValueError(f"singular curve [{self.a}, {self.b}] over GF({self.p})")

    @property
    def discriminant(self) -> int:
        """4a^3 + 27b^2 mod p."""
        return (4 * self.a ** 3 + 27 * self.b ** 2) % self.p

    @property
    def j_invariant(self) -> int:
        p = self.p
        four_a3 = 4 * pow(self.a, 3, p)
        return 1728 * four_a3 * pow(self.discriminant, -1, p) % p

    def twist(self, c: int) -> "CurveFp":
        """The curve [a c^2, b c^3]; a quadratic twist when c is a non-residue."""
        return CurveFp(self.a * c * c, self.b * c ** 3, self.p)

    def contains(self, point: PointFp) -> bool:
        if point.is_infinity:
            return True
        x, y = point.x, point.y
        return (y * y - x ** 3 - self.a * x - self.b) % self.p == 0

    def neg(self, point: PointFp) -> PointFp:
        if point.is_infinity:
            return point
        return PointFp(point.x, -point.y % self.p)

    def add(self, first: PointFp, second: PointFp) -> PointFp:
        if first.is_infinity:
            return second
        if second.is_infinity:
            return first
        p = self.p
        x1, y1, x2, y2 = first.x, first.y, second.x, second.y
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return INFINITY
            slope = (3 * x1 * x1 + self.a) * pow(2 * y1, -1, p) % p
        else:
            slope = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (slope * slope - x1 - x2) % p
        return PointFp(x3, (slope * (x1 - x3) - y1) % p)

    def mul(self, k: int, point: PointFp) -> PointFp:
        """k P by double-and-add."""
        if k < 0:
            return self.mul(-k, self.neg(point))
        result = INFINITY
        addend = point
        while k:
            if k & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            k >>= 1
        return result

    def random_point(self, rng: random.Random) -> PointFp:
        """A uniformly drawn affine point."""
        field_ = PrimeField(self.p)
        while True:
            x = rng.randrange(self.p)
            y = field_.sqrt((x ** 3 + self.a * x + self.b) % self.p)
            if y is not None:
                return PointFp(x, y if rng.getrandbits(1) else -y % self.p)

    def __str__(self) -> str:
        return f"[{self.a}, {self.b}]"


# ---------------------------------------------------------------- primes

@dataclass(frozen=True)
class VolcanoPrime:
    """
    A prime p with 4p = t^2 - ell^2 v^2 D, p = 1 mod ell and v != 0 mod ell.

    The sign of t makes t = 2 mod ell, so that curves with m = p + 1 - t
    points carry their full ell-torsion on the crater.
    """
    p: int
    ell: int
    D: int
    t: int
    v: int

    def __post_init__(self) -> None:
        if 4 * self.p != self.t ** 2 - self.ell ** 2 * self.v ** 2 * self.D:
            raise ValueError(f"4p != t^2 - ell^2 v^2 D for p={self.p}, t={self.t}, v={self.v}")
        if self.p % self.ell != 1:
            raise ValueError(f"'p' must be 1 mod {self.ell}, got {self.p}")
        if self.v % self.ell == 0:
            raise ValueError(f"'v' must not be divisible by {self.ell}, got {self.v}")

    @property
    def m(self) -> int:
        """Number of points p + 1 - t of the crater curves."""
        return self.p + 1 - self.t


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"'D' must be a negative discriminant, got {D}")


def _trace_and_conductor(p: int, ell: int, D: int) -> Optional[tuple[int, int]]:
    v = 1
    while ell * ell * v * v * -D <= 4 * p:
        if v % ell:
            square = 4 * p + ell * ell * v * v * D
            if gmpy2.is_square(square):
                t = int(gmpy2.isqrt(square))
                if (t - 2) % ell:
                    t = -t
                if (t - 2) % ell == 0:
                    return t, v
        v += 1
    return None


def volcano_prime(ell: int, D: int, p: int) -> VolcanoPrime:
    """
    The volcano data (t, v) of a given prime.

    Raises
    ------
    ValueError
        If p does not satisfy the conditions for ell and D.

    """
    if not is_odd_prime(ell):
        raise ValueError(f"'ell' must be an odd prime, got {ell}")
    _check_discriminant(D)
    if not gmpy2.is_prime(p) or p % ell != 1:
        raise ValueError(f"'p' must be a prime = 1 mod {ell}, got {p}")
    found = _trace_and_conductor(p, ell, D)
    if found is None:
        raise ValueError(f"{p} is not of the form (t^2 - {ell}^2 v^2 ({D}))/4 with v != 0 mod {ell}")
    return VolcanoPrime(p, ell, D, *found)


def find_volcano_prime(ell: int, D: int, start: int = 3, stop: int = 10 ** 7) -> VolcanoPrime:
    """
    The smallest volcano prime for ell and D in [start, stop).

    Parameters
    ----------
    ell : int
        Odd prime isogeny degree.
    D : int
        Negative discriminant.
    start, stop : int
        Search range.

    """
    if not is_odd_prime(ell):
        raise ValueError(f"'ell' must be an odd prime, got {ell}")
    _check_discriminant(D)
    p = int(gmpy2.next_prime(max(start, 2) - 1))
    while p < stop:
        if p % ell == 1:
            found = _trace_and_conductor(p, ell, D)
            if found is not None:
                logger.debug("volcano prime for ell=%d, D=%d: p=%d (t, v) = %s", ell, D, p, found)
                return VolcanoPrime(p, ell, D, *found)
        p = int(gmpy2.next_prime(p))
    raise ValueError(f"no volcano prime for ell={ell}, D={D} in [{start}, {stop})")


# ---------------------------------------------------------------- class polynomials

@dataclass(frozen=True)
class ClassPolynomial:
    """The class polynomial H_D with coefficients constant term first."""
    D: int
    coeffs: tuple

    @property
    def class_number(self) -> int:
        return len(self.coeffs) - 1


def parse_class_polynomial(text: str, path: Union[str, Path] = "<string>") -> ClassPolynomial:
    """
    Parse ``D=<D> h=<h>`` followed by the h+1 integer coefficients of H_D,
    constant first. Lines starting with ``#`` are skipped.
    """
    header = None
    coeffs = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            fields = dict(item.split("=", 1) for item in line.split() if "=" in item)
            try:
                header = (int(fields["D"]), int(fields["h"]))
            except (KeyError, ValueError) as err:
                raise MalformedFileError(path, number, f"expected 'D=<D> h=<h>', got {line!r}") from err
            continue
        try:
            coeffs.append(int(line))
        except ValueError as err:
            raise MalformedFileError(path, number, f"expected an integer coefficient, got {line!r}") from err
    if header is None:
        raise MalformedFileError(path, 0, "missing 'D=<D> h=<h>' header")
    D, h = header
    if len(coeffs) != h + 1:
        raise MalformedFileError(path, 0, f"expected {h + 1} coefficients, got {len(coeffs)}")
    if coeffs[-1] != 1:
        raise MalformedFileError(path, 0, "class polynomial must be monic")
    return ClassPolynomial(D, tuple(coeffs))


def class_polynomial_path(D: int, data_dir: Optional[Union[str, Path]] = None) -> Path:
    """Location of the file for H_D: ``data_dir``, then $CCRPOLY_DATA_DIR, then the package data."""
    name = f"classpoly_{-D}.txt"
    directory = data_dir or os.environ.get(DATA_DIR_ENV)
    if directory:
        return Path(directory) / name
    return Path(str(resources.files("ccrpoly") / "data" / name))


def read_class_polynomial(path: Union[str, Path]) -> ClassPolynomial:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no class polynomial file at {path}")
    return parse_class_polynomial(path.read_text(), path)


def load_class_polynomial(D: int, data_dir: Optional[Union[str, Path]] = None) -> ClassPolynomial:
    """Read H_D from its data file."""
    _check_discriminant(D)
    path = class_polynomial_path(D, data_dir)
    if not path.is_file():
        raise FileNotFoundError(f"no class polynomial for D={D} at {path}")
    poly = read_class_polynomial(path)
    if poly.D != D:
        raise MalformedFileError(path, 1, f"file holds D={poly.D}, expected {D}")
    return poly


def class_poly_roots(coeffs: Sequence[int], p: int, rng: Optional[random.Random] = None) -> list[int]:
    """
    The roots of H_D modulo p, sorted.

    Raises
    ------
    ValueError
        If H_D does not split into distinct linear factors modulo p.

    """
    poly = FpPolynomial(coeffs, p)
    roots = poly.roots(rng)
    if len(roots) != poly.degree:
        raise ValueError(f"H_D does not split completely modulo {p}: {len(roots)} of {poly.degree} roots")
    return roots


# ---------------------------------------------------------------- isogenies

@dataclass(frozen=True)
class IsogenyTriple:
    """
    An isogeny of degree ell from a crater curve: sigma_1 of its kernel, the
    codomain [A*, B*] and its j-invariant.
    """
    sigma1: int
    a_star: int
    b_star: int
    j_star: int

    #: Power sums s_0..s_3 of the (ell-1)/2 kernel abscissas.
    kernel_sums: tuple = field(default=(), compare=False)

    #: Whether the codomain lies on the crater; None before classification.
    crater: Optional[bool] = field(default=None, compare=False)

    def value(self, kind: Kind) -> int:
        """sigma_1, A* or -B* for kind U, V or W; the value may be negative."""
        return {Kind.U: self.sigma1, Kind.V: self.a_star, Kind.W: -self.b_star}[Kind(kind)]


def _nonresidue(p: int) -> int:
    c = 2
    while gmpy2.legendre(c, p) != -1:
        c += 1
    return c


def curve_from_j(
        j: int,
        m: int,
        p: int,
        rng: Optional[random.Random] = None,
        trials: int = TWIST_TRIALS,
) -> CurveFp:
    """
    A curve with invariant j and m points: [3k, 2k] with k = j/(1728 - j),
    or its quadratic twist.

    Raises
    ------
    ConsistencyError
        If neither twist passes ``trials`` tests m P = O.

    """
    rng = rng or random.Random(0)
    j %= p
    if j in (0, 1728 % p):
        raise ValueError(f"'j' must differ from 0 and 1728, got {j}")
    k = j * pow(1728 - j, -1, p) % p
    base = CurveFp(3 * k, 2 * k, p)
    for curve in (base, base.twist(_nonresidue(p))):
        if all(curve.mul(m, curve.random_point(rng)).is_infinity for _ in range(trials)):
            return curve
    raise ConsistencyError(f"no twist with j={j} has {m} points over GF({p})")


def _valuation(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def point_of_order_ell(
        curve: CurveFp,
        ell: int,
        m: int,
        rng: Optional[random.Random] = None,
        trials: int = POINT_TRIALS,
) -> PointFp:
    """
    A random point of order ell: (m/ell^v) R for random R, multiplied by ell
    while the result stays nonzero.

    Parameters
    ----------
    curve : CurveFp
        Curve with m points.
    ell : int
        Odd prime dividing m.
    m : int
        Number of points.

    """
    if m % ell:
        raise ValueError(f"'ell' = {ell} must divide m = {m}")
    rng = rng or random.Random(0)
    v = _valuation(m, ell)
    cofactor = m // ell ** v
    for _ in range(trials):
        point = curve.mul(cofactor, curve.random_point(rng))
        if point.is_infinity:
            continue
        for _ in range(v):
            image = curve.mul(ell, point)
            if image.is_infinity:
                return point
            point = image
        raise ConsistencyError(f"curve {curve} does not have {m} points")
    raise ConsistencyError(f"no point of order {ell} on {curve} after {trials} draws")


def velu(curve: CurveFp, point: PointFp, ell: int) -> IsogenyTriple:
    """
    The isogeny with kernel <P> by Velu's formulas.

    With s_k the power sums of x(P), ..., x(dP), d = (ell-1)/2:
    A* = A - 5(6 s_2 + 2A s_0) and B* = B - 7(10 s_3 + 6A s_1 + 4B s_0).

    Raises
    ------
    ValueError
        If P does not have order ell.

    """
    if point.is_infinity or not curve.contains(point):
        raise ValueError(f"'point' must be an affine point of {curve}")
    if not curve.mul(ell, point).is_infinity:
        raise ValueError(f"'point' does not have order {ell}")
    p = curve.p
    abscissas = []
    multiple = point
    for _ in range((ell - 1) // 2):
        abscissas.append(multiple.x)
        multiple = curve.add(multiple, point)
    sums = tuple(sum(pow(x, k, p) for x in abscissas) % p for k in range(4))
    s0, s1, s2, s3 = sums
    a, b = curve.a, curve.b
    a_star = (a - 5 * (6 * s2 + 2 * a * s0)) % p
    b_star = (b - 7 * (10 * s3 + 6 * a * s1 + 4 * b * s0)) % p
    codomain = CurveFp(a_star, b_star, p)
    triple = IsogenyTriple(s1, a_star, b_star, codomain.j_invariant, sums)
    if not verify_elkies(sums, a, b, a_star, b_star, p):
        raise ConsistencyError(f"Elkies identities fail for the kernel of {point} on {curve}")
    return triple


def _subgroup_abscissas(curve: CurveFp, point: PointFp, ell: int) -> set[int]:
    xs = set()
    multiple = point
    for _ in range(ell - 1):
        xs.add(multiple.x)
        multiple = curve.add(multiple, point)
    return xs


def neighbors(
        curve: CurveFp,
        ell: int,
        roots: Sequence[int],
        m: int,
        rng: Optional[random.Random] = None,
        trials: int = POINT_TRIALS,
) -> list[IsogenyTriple]:
    """
    The ell+1 isogenies of degree ell from a crater curve, each marked as
    horizontal (codomain j among ``roots``) or descending.

    The kernels are <P1> and <P2 + i P1> for 0 <= i < ell, where P1, P2
    are independent points of order ell.

    Raises
    ------
    ConsistencyError
        If no second independent point of order ell turns up, or the
        number of horizontal neighbours is not two.

    """
    rng = rng or random.Random(0)
    first = point_of_order_ell(curve, ell, m, rng, trials)
    taken = _subgroup_abscissas(curve, first, ell)
    for _ in range(trials):
        second = point_of_order_ell(curve, ell, m, rng, trials)
        if second.x not in taken:
            break
    else:
        raise ConsistencyError(f"fewer than {ell + 1} kernels of order {ell} found on {curve}")

    generators = [first]
    multiple = INFINITY
    for _ in range(ell):
        generators.append(curve.add(second, multiple))
        multiple = curve.add(multiple, first)

    root_set = set(roots)
    result = []
    for generator in generators:
        triple = velu(curve, generator, ell)
        result.append(replace(triple, crater=triple.j_star in root_set))
    horizontal = sum(1 for t in result if t.crater)
    logger.debug("curve %s: sigma_1 = %s, %d horizontal", curve, [t.sigma1 for t in result], horizontal)
    if horizontal != 2:
        raise ConsistencyError(f"curve {curve} has {horizontal} horizontal {ell}-isogenies, expected 2")
    return result


# ---------------------------------------------------------------- interpolation

@dataclass(frozen=True)
class CraterRow:
    """A crater curve and its ell+1 neighbours."""
    curve: CurveFp
    neighbors: tuple

    def power_sums(self, kind: Kind, count: int) -> list[int]:
        """Power sums 1..count of sigma_1 (U), A* (V) or -B* (W) over the neighbours."""
        p = self.curve.p
        values = [t.value(kind) for t in self.neighbors]
        return [sum(pow(x, r, p) for x in values) % p for r in range(1, count + 1)]


def explore_crater(
        prime: VolcanoPrime,
        class_poly: ClassPolynomial,
        seed: int = 0,
        curves: Optional[Sequence[CurveFp]] = None,
) -> list[CraterRow]:
    """
    Neighbours of every crater curve.

    Parameters
    ----------
    prime : VolcanoPrime
        Prime and trace data.
    class_poly : ClassPolynomial
        H_D for ``prime.D``.
    seed : int
        Seed of the random choices.
    curves : sequence of CurveFp, optional
        Crater curves to use instead of one curve per root of H_D.

    Raises
    ------
    ConsistencyError
        If a curve does not have two horizontal neighbours, or the roots of
        H_D do not form one crater.

    """
    if class_poly.D != prime.D:
        raise ValueError(f"class polynomial is for D={class_poly.D}, expected {prime.D}")
    rng = random.Random(seed)
    p = prime.p
    roots = class_poly_roots(class_poly.coeffs, p, rng)
    explored_all = curves is None
    if curves is None:
        generic = [j for j in roots if j not in (0, 1728 % p)]
        curves = [curve_from_j(j, prime.m, p, rng) for j in generic]
    else:
        for curve in curves:
            if curve.p != p or curve.j_invariant not in roots:
                raise ValueError(f"curve {curve} is not on the crater of GF({p})")
    logger.info("exploring %d crater curves for ell=%d over GF(%d)", len(curves), prime.ell, p)
    rows = [CraterRow(curve, tuple(neighbors(curve, prime.ell, roots, prime.m, rng))) for curve in curves]
    if explored_all:
        check_one_crater(roots, rows)
    return rows


def check_one_crater(roots: Sequence[int], rows: Sequence[CraterRow]) -> None:
    """
    Check that the horizontal isogenies of ``rows`` join every root of H_D
    into a single cycle.

    Raises
    ------
    ConsistencyError
        If some root is not reachable from the first row.

    """
    if not rows:
        return
    edges: dict[int, set[int]] = {j: set() for j in roots}
    for row in rows:
        source = row.curve.j_invariant
        for t in row.neighbors:
            if t.crater:
                edges[source].add(t.j_star)
                edges[t.j_star].add(source)
    seen = {rows[0].curve.j_invariant}
    stack = list(seen)
    while stack:
        for j in edges[stack.pop()] - seen:
            seen.add(j)
            stack.append(j)
    missing = sorted(set(roots) - seen)
    if missing:
        raise ConsistencyError(f"roots {missing} of H_D lie on another crater")


def interpolate_power_sums(kind: Kind, ell: int, rows: Sequence[CraterRow], p: int) -> list[SparsePoly]:
    """
    The power sums P_1..P_{ell+1} of the roots of the CCR polynomial as
    forms in (Y, Z) over GF(p), fitted on the crater rows.

    Raises
    ------
    ValueError
        If there are fewer curves than unknowns of the largest weight.

    """
    kind = Kind(kind)
    needed = count_N23(kind * (ell + 1))
    if len(rows) < needed:
        raise ValueError(f"need at least {needed} crater curves, got {len(rows)}; choose D with larger h(D)")
    points = [(row.curve.a, row.curve.b) for row in rows]
    samples = [row.power_sums(kind, ell + 1) for row in rows]
    return [
        fit_weighted_form(points, [s[r - 1] for s in samples], kind * r, p)
        for r in range(1, ell + 2)
    ]


def compute_u_mod_p(
        kind: Kind,
        ell: int,
        D: int,
        p: int,
        class_poly: Optional[ClassPolynomial] = None,
        seed: int = 0,
        curves: Optional[Sequence[CurveFp]] = None,
        data_dir: Optional[Union[str, Path]] = None,
) -> WeightedPoly:
    """
    U_ell, V_ell or W_ell modulo a volcano prime.

    Parameters
    ----------
    kind : Kind
        Which polynomial.
    ell : int
        Odd prime.
    D : int
        Discriminant with h(D) >= ell + 2.
    p : int
        Volcano prime for ell and D.
    class_poly : ClassPolynomial, optional
        H_D; read with :func:`load_class_polynomial` when omitted.
    seed : int
        Seed of the random choices.
    curves : sequence of CurveFp, optional
        Crater curves to use.
    data_dir : str or Path, optional
        Directory of class-polynomial files.

    """
    kind = Kind(kind)
    prime = volcano_prime(ell, D, p)
    if class_poly is None:
        class_poly = load_class_polynomial(D, data_dir)
    if class_poly.class_number < ell + 2:
        raise ValueError(f"h({D}) = {class_poly.class_number} must be >= ell+2 = {ell + 2}")
    rows = explore_crater(prime, class_poly, seed, curves)
    sums = interpolate_power_sums(kind, ell, rows, p)
    coeffs = newton_to_coeffs(sums, ell + 1, PrimeField(p))
    return WeightedPoly.from_x_coefficients(kind, ell, coeffs, modulus=p)
