"""Arithmetic of a real quadratic field: integers, units, prime splitting,
narrow class data, narrow principality with explicit witnesses, and
enumeration of totally positive lattice elements by trace.

Conventions: the two real embeddings are ordered so that the first one
sends sqrt(d) to the positive square root.  "Totally positive" means
strictly positive under both embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import sympy


class RealQuadError(ArithmeticError):
    pass


class NotSquarefree(RealQuadError):
    pass


class UnitSearchOverflow(RealQuadError):
    pass


class NotSplit(RealQuadError):
    pass


class ClassNumberUnsupported(RealQuadError):
    pass


class RealQuadraticField:
    """Q(sqrt(d)) for squarefree d > 1, with integral basis (1, omega)."""

    def __init__(self, d: int, h_plus=None, height_bound: int = 10**4):
        if d <= 1:
            raise NotSquarefree("need d > 1")
        if any(e > 1 for e in sympy.factorint(d).values()):
            raise NotSquarefree("d = %d is not squarefree" % d)
        self.d = d
        if d % 4 == 1:
            self.discriminant = d
            self.omega_trace = 1
            self.omega_norm = (1 - d) // 4
        else:
            self.discriminant = 4 * d
            self.omega_trace = 0
            self.omega_norm = -d
        self.fundamental_unit = _fundamental_unit(self, height_bound)
        u = self.fundamental_unit
        if u.norm() == 1:
            self.totally_positive_fundamental_unit = u if u.is_totally_positive() else -u
        else:
            self.totally_positive_fundamental_unit = u * u
        eps = self.totally_positive_fundamental_unit
        assert eps.norm() == 1 and eps.is_totally_positive()
        # sqrt(D) in the (1, omega) basis: 2*omega - Tr(omega) = sqrt(disc(omega));
        # for d = 2,3 mod 4 that is 2*sqrt(d) = sqrt(D) directly, for d = 1 mod 4
        # it is sqrt(d) = sqrt(D).
        if d % 4 == 1:
            self.different_generator = QuadElement(self, Fraction(-1), Fraction(2))
        else:
            self.different_generator = QuadElement(self, Fraction(0), Fraction(2))
        if h_plus is not None:
            self.h_plus = int(h_plus)
        elif self.discriminant <= 400:
            self.h_plus = narrow_class_number(self.discriminant)
        else:
            self.h_plus = None  # must be supplied for large discriminants

    @property
    def integral_basis(self):
        return (self.one(), self.omega())

    def element(self, x, y=0) -> "QuadElement":
        return QuadElement(self, Fraction(x), Fraction(y))

    def one(self):
        return self.element(1, 0)

    def omega(self):
        return self.element(0, 1)

    def sqrt_d(self) -> "QuadElement":
        if self.d % 4 == 1:
            return QuadElement(self, Fraction(-1), Fraction(2))
        return QuadElement(self, Fraction(0), Fraction(1))

    def from_sqrt_basis(self, a, b) -> "QuadElement":
        """The element a + b*sqrt(d) for exact rationals a, b."""
        a, b = Fraction(a), Fraction(b)
        if self.d % 4 == 1:
            return QuadElement(self, a - b, 2 * b)
        return QuadElement(self, a, b)

    def __repr__(self):
        return "RealQuadraticField(d=%d)" % self.d

    def __eq__(self, other):
        return isinstance(other, RealQuadraticField) and other.d == self.d

    def __hash__(self):
        return hash(("RealQuadraticField", self.d))


class QuadElement:
    """x + y*omega with exact rational coordinates."""

    __slots__ = ("F", "x", "y")

    def __init__(self, F: RealQuadraticField, x: Fraction, y: Fraction):
        self.F = F
        self.x = Fraction(x)
        self.y = Fraction(y)

    # value = a + b*sqrt(d)
    def sqrt_basis(self):
        t = self.F.omega_trace
        if self.F.d % 4 == 1:
            return (self.x + self.y * Fraction(t, 2), self.y / 2)
        return (self.x, self.y)

    def trace(self) -> Fraction:
        return 2 * self.x + self.y * self.F.omega_trace

    def norm(self) -> Fraction:
        a, b = self.sqrt_basis()
        return a * a - b * b * self.F.d

    def conjugate(self) -> "QuadElement":
        return QuadElement(
            self.F, self.x + self.y * self.F.omega_trace, -self.y
        )

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_totally_positive(self) -> bool:
        a, b = self.sqrt_basis()
        if a <= 0:
            return False
        return a * a > b * b * self.F.d

    def is_integral_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def _check(self, other):
        if isinstance(other, QuadElement):
            if other.F.d != self.F.d:
                raise RealQuadError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElement(self.F, Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.F, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadElement(self.F, -self.x, -self.y)

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        t, n = self.F.omega_trace, self.F.omega_norm
        x = self.x * o.x - n * self.y * o.y
        y = self.x * o.y + self.y * o.x + t * self.y * o.y
        return QuadElement(self.F, x, y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in the quadratic field")
        num = self * o.conjugate()
        return QuadElement(self.F, num.x / n, num.y / n)

    def __pow__(self, e: int):
        if e < 0:
            return (self.F.one() / self) ** (-e)
        r = self.F.one()
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __eq__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.F.d, self.x, self.y))

    def __repr__(self):
        return "QuadElement(d=%d, %s + %s*w)" % (self.F.d, self.x, self.y)

    def approx(self, embedding: int = 1) -> float:
        a, b = self.sqrt_basis()
        s = self.F.d**0.5
        return float(a) + float(b) * (s if embedding == 1 else -s)


# ---------------------------------------------------------------------------
# fundamental unit by continued fractions


def _fundamental_unit(F: RealQuadraticField, height_bound: int) -> QuadElement:
    """Smallest unit > 1 of the maximal order, from the continued fraction
    of omega: the convergents h/k yield u = h - k*conj(omega), and the first
    convergent with |N(u)| = 1 is the fundamental unit."""
    d = F.d
    t, n = F.omega_trace, F.omega_norm
    if d % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    sq = isqrt(d)
    # height_bound caps the decimal-digit size of the convergents
    digit_cap = max(height_bound, 16)
    h0, h1 = 1, 0  # h_{-1}, h_{-2}
    k0, k1 = 0, 1
    for _ in range(10**6):
        a = (P + sq) // Q
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        nm = h0 * h0 - h0 * k0 * t + k0 * k0 * n
        if nm in (1, -1):
            u = QuadElement(F, Fraction(h0 - k0 * t), Fraction(k0))
            return u
        if h0.bit_length() > 4 * digit_cap:
            break
        P = a * Q - P
        Q = (d - P * P) // Q
    raise UnitSearchOverflow("no unit found below the height bound")


# ---------------------------------------------------------------------------
# prime splitting


def _lift_root(t: int, n: int, r: int, p: int, m: int) -> int:
    """Hensel-lift a simple root r of x^2 - t x + n from mod p to mod p^m."""
    x = r % p
    k = 1
    while k < m:
        k = min(2 * k, m)
        mod = p**k
        fx = (x * x - t * x + n) % mod
        dfx = (2 * x - t) % mod
        x = (x - fx * pow(dfx, -1, mod)) % mod
    return x


@dataclass(frozen=True)
class PrimeIdealData:
    """Splitting data of a rational prime in the quadratic field.

    For a split prime the two residue maps O_L -> Z/p^m are determined by
    the two roots of the minimal polynomial of omega mod p^m; root_1 is the
    smaller lift (a fixed, documented labeling)."""

    F: RealQuadraticField
    p: int
    m: int
    splitting_type: str  # "split" | "inert" | "ramified"
    roots: tuple = None  # (r1, r2) mod p^m when split
    totally_positive_generators: tuple = None

    def residue(self, z: QuadElement, which: int = 1) -> int:
        """Image of z under the residue map at prime ideal `which` (1 or 2),
        an integer mod p^m.  Requires coordinates p-integral."""
        if self.splitting_type != "split":
            raise NotSplit("residue maps are provided for split primes")
        pm = self.p**self.m
        r = self.roots[0] if which == 1 else self.roots[1]

        def frac_mod(q: Fraction) -> int:
            if q.denominator % self.p == 0:
                raise RealQuadError("coordinate not p-integral")
            return q.numerator * pow(q.denominator, -1, pm) % pm

        return (frac_mod(z.x) + frac_mod(z.y) * r) % pm


def split_prime(F: RealQuadraticField, p: int, m: int = 1) -> PrimeIdealData:
    D = F.discriminant
    t, n = F.omega_trace, F.omega_norm
    if D % p == 0:
        return PrimeIdealData(F, p, m, "ramified")
    if p == 2:
        # d = 1 mod 4 here (else 2 | D): split iff x^2 - x + n has a root
        # mod 2, i.e. n even, i.e. d = 1 mod 8.
        split = n % 2 == 0
        r0 = 0
    else:
        ls = sympy.legendre_symbol(D % p, p)
        split = ls == 1
        if split:
            s = sympy.sqrt_mod(D % p, p)
            r0 = (t + s) * pow(2, -1, p) % p
    if not split:
        return PrimeIdealData(F, p, m, "inert")
    r1 = _lift_root(t, n, r0, p, m)
    r2 = (t - r1) % p**m
    if r1 > r2:
        r1, r2 = r2, r1
    return PrimeIdealData(F, p, m, "split", (r1, r2))


# ---------------------------------------------------------------------------
# indefinite binary quadratic forms: reduction, cycles, narrow class number


def _is_reduced(a: int, b: int, c: int, D: int) -> bool:
    if b <= 0 or b * b >= D:
        return False
    # |sqrt(D) - 2|a|| < b
    ta = 2 * abs(a)
    if ta - b >= 0 and (ta - b) * (ta - b) >= D:
        return False
    if (ta + b) * (ta + b) <= D:
        return False
    return True


def _rho(a: int, b: int, c: int, D: int):
    """One reduction step (a,b,c) -> (c, r, (r^2-D)/(4c)) with the standard
    choice of r = -b mod 2|c|; returns the new form and the integer s with
    r = -b + 2*c*s (for transformation tracking)."""
    sq = isqrt(D)
    ac = abs(c)
    if ac > sq:
        # -|c| < r <= |c|
        r = (-b) % (2 * ac)
        if r > ac:
            r -= 2 * ac
    else:
        # sqrt(D) - 2|c| < r < sqrt(D)
        r = (-b) % (2 * ac)
        r += ((sq - r) // (2 * ac)) * (2 * ac)
    s = (r + b) // (2 * c)
    a2, b2, c2 = c, r, (r * r - D) // (4 * c)
    return (a2, b2, c2), s


def _reduce_form(a: int, b: int, c: int, D: int, max_steps: int = 10**5):
    """Reduce, tracking U in GL2(Z) with f_reduced(v) = f_original(U v)."""
    U = [[1, 0], [0, 1]]
    steps = 0
    while not _is_reduced(a, b, c, D):
        (a, b, c), s = _rho(a, b, c, D)
        # substitution x -> -y', y -> x' + s y'
        M = [[0, -1], [1, s]]
        U = [
            [U[0][0] * M[0][0] + U[0][1] * M[1][0], U[0][0] * M[0][1] + U[0][1] * M[1][1]],
            [U[1][0] * M[0][0] + U[1][1] * M[1][0], U[1][0] * M[0][1] + U[1][1] * M[1][1]],
        ]
        steps += 1
        if steps > max_steps:
            raise RealQuadError("form reduction did not terminate")
    return (a, b, c), U


def _cycle_of(form, D: int, max_steps: int = 10**6):
    """The rho-cycle through a reduced form, with transformations relative
    to the starting form."""
    out = []
    U = [[1, 0], [0, 1]]
    f = form
    for _ in range(max_steps):
        out.append((f, U))
        f2, s = _rho(*f, D)
        M = [[0, -1], [1, s]]
        U = [
            [U[0][0] * M[0][0] + U[0][1] * M[1][0], U[0][0] * M[0][1] + U[0][1] * M[1][1]],
            [U[1][0] * M[0][0] + U[1][1] * M[1][0], U[1][0] * M[0][1] + U[1][1] * M[1][1]],
        ]
        if f2 == form:
            return out
        f = f2
    raise RealQuadError("form cycle did not close")


def _all_reduced_forms(D: int):
    forms = []
    sq = isqrt(D)
    for b in range(1, sq + 1):
        if (b - D) % 2:
            continue
        prod4 = b * b - D  # = 4ac < 0
        if prod4 % 4:
            continue
        prod = prod4 // 4
        for a in sympy.divisors(-prod):
            for aa in (a, -a):
                c = prod // aa
                if _is_reduced(aa, b, c, D):
                    forms.append((aa, b, c))
    return forms


def narrow_class_number(D: int) -> int:
    """Number of rho-cycles of reduced indefinite forms of discriminant D
    (D a fundamental discriminant)."""
    forms = set(_all_reduced_forms(D))
    cycles = 0
    while forms:
        f = next(iter(forms))
        cycles += 1
        for g, _ in _cycle_of(f, D):
            forms.discard(g)
    return cycles


def principal_form(D: int):
    sq = isqrt(D)
    b = sq if (sq - D) % 2 == 0 else sq - 1
    return (1, b, (b * b - D) // 4)


# ---------------------------------------------------------------------------
# narrow principality with witnesses


@dataclass
class NarrowPrincipalityResult:
    status: str  # "found" | "not-principal" | "none-found-within-bound"
    generators: tuple = None  # (pi1, pi2) QuadElements when found
    certified: bool = False


def narrowly_principal_split(F: RealQuadraticField, p: int, height_bound: int = 10**5):
    """Totally positive generators (pi1, pi2) of the two primes above a
    split p, or a certified negative verdict.

    A prime ideal is narrowly principal iff its norm form properly
    represents +1, iff the principal form occurs in its reduction cycle;
    the tracked transformation yields an explicit generator of norm +p."""
    data = split_prime(F, p, 2)
    if data.splitting_type != "split":
        raise NotSplit("p = %d is not split in Q(sqrt(%d))" % (p, F.d))
    D = F.discriminant
    t = F.omega_trace
    r = data.roots[0] % p
    # form of the ideal [p, omega - r]: N(p x + (r - omega) y)/p
    g_r = r * r - t * r + F.omega_norm
    a, b, c = p, (2 * r - t), g_r // p
    try:
        f0, U0 = _reduce_form(a, b, c, D, max_steps=height_bound)
        cyc = _cycle_of(f0, D, max_steps=height_bound)
    except RealQuadError:
        return NarrowPrincipalityResult("none-found-within-bound")
    hit = None
    for g, U in cyc:
        if g[0] == 1:
            hit = U
            break
    if hit is None:
        return NarrowPrincipalityResult("not-principal", certified=True)
    # total transformation: f_hit(v) = f_ideal(U0 @ hit @ v); f_hit(1,0) = 1
    x0 = U0[0][0] * hit[0][0] + U0[0][1] * hit[1][0]
    y0 = U0[1][0] * hit[0][0] + U0[1][1] * hit[1][0]
    z = F.element(p, 0) * F.element(x0, 0) + (F.element(r, 0) - F.omega()) * F.element(y0, 0)
    assert z.norm() == p, "witness has wrong norm"
    if not z.is_totally_positive():
        z = -z
    assert z.is_totally_positive()
    # assign to the ideal whose residue map kills it
    if split_prime(F, p, 1).residue(z, 1) % p == 0:
        pi1, pi2 = z, z.conjugate()
    else:
        pi1, pi2 = z.conjugate(), z
    if not pi2.is_totally_positive():
        pi2 = -pi2
    return NarrowPrincipalityResult("found", generators=(pi1, pi2))


# ---------------------------------------------------------------------------
# totally positive elements by trace


def totally_positive_by_trace(F: RealQuadraticField, t: int, lattice: str):
    """All totally positive elements of the chosen lattice with trace t,
    sorted by (x, y) coordinates.  lattice is "O_L" or "inverse_different"."""
    if t < 1:
        return []
    d = F.d
    out = []
    if lattice == "O_L":
        # z = x + y*omega, trace 2x + y*Tr(omega) = t
        tw = F.omega_trace
        # sqrt-basis: a = t/2 fixed; enumerate y with b^2 d < a^2
        if d % 4 == 1:
            ybound = _floor_sqrt_frac(Fraction(t * t, d))  # |y| <= floor(t/sqrt d)
        else:
            ybound = _floor_sqrt_frac(Fraction(t * t, 4 * d))
        for y in range(-ybound, ybound + 1):
            if (t - y * tw) % 2:
                continue
            x = (t - y * tw) // 2
            z = F.element(x, y)
            if z.is_totally_positive():
                out.append(z)
    elif lattice == "inverse_different":
        # xi = (x + y*omega)/sqrt(D); trace(xi) = y, totally positive iff
        # the sqrt-coefficient of the numerator is positive and dominates.
        sqrtD = F.different_generator
        y = t
        if d % 4 == 1:
            # numerator a = x + y/2, b = y/2: need (2x+y)^2 < y^2 d
            lim = _floor_sqrt_frac(Fraction(y * y * d))
            for two_x_plus_y in range(-lim, lim + 1):
                if (two_x_plus_y - y) % 2:
                    continue
                x = (two_x_plus_y - y) // 2
                xi = F.element(x, y) / sqrtD
                if xi.is_totally_positive():
                    out.append(xi)
        else:
            lim = _floor_sqrt_frac(Fraction(y * y * d))
            for x in range(-lim, lim + 1):
                xi = F.element(x, y) / sqrtD
                if xi.is_totally_positive():
                    out.append(xi)
    else:
        raise ValueError("unknown lattice tag %r" % lattice)
    out.sort(key=lambda z: (z.x, z.y))
    return out


def _floor_sqrt_frac(q: Fraction) -> int:
    """floor(sqrt(q)) for a non-negative rational."""
    if q < 0:
        return 0
    # floor(sqrt(n/d)) = isqrt(n*d)//d
    return isqrt(q.numerator * q.denominator) // q.denominator


# ---------------------------------------------------------------------------
# unit order


def unit_order_mod(F: RealQuadraticField, prime_data: PrimeIdealData, u: QuadElement) -> int:
    """Multiplicative order of the image of a unit under the residue map at
    the first prime above a split p."""
    if prime_data.splitting_type != "split":
        raise NotSplit("unit order requires a split prime")
    if abs(u.norm()) != 1 or not u.is_integral_unit():
        raise RealQuadError("u must be a unit of the ring of integers")
    p = prime_data.p
    one_prec = split_prime(F, p, 1)
    a = one_prec.residue(u, 1) % p
    return int(sympy.ntheory.n_order(a, p))


# ---------------------------------------------------------------------------
# construction helpers


def make_field(d: int, h_plus=None, height_bound: int = 10**4) -> RealQuadraticField:
    return RealQuadraticField(d, h_plus=h_plus, height_bound=height_bound)


def field_from_json(record: dict) -> RealQuadraticField:
    F = make_field(int(record["d"]), h_plus=record.get("h_plus"))
    if "unit" in record:
        x, y = record["unit"]
        u = F.element(Fraction(x), Fraction(y))
        if not u.is_integral_unit():
            raise RealQuadError("supplied unit override is not a unit")
        F.fundamental_unit = u
        if u.norm() == 1:
            F.totally_positive_fundamental_unit = u if u.is_totally_positive() else -u
        else:
            F.totally_positive_fundamental_unit = u * u
    return F
