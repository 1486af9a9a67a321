"""Tensor induction of two-dimensional representations along an index-2
subgroup, with the quintic S5 specialization.

The coefficient ring for all matrices is the exact ring generated over the
rationals by i and sqrt(5).  An entry is stored as a 4-tuple of integers
(x, y, u, v) denoting ((x + y*sqrt5) + (u + v*sqrt5)*i) / ENTRY_SCALE, so
all arithmetic is integral and equality tests are exact.

Besides the matrix calculus the module provides the symbolic side of the
ordinary filtration: root-of-unity eigenvalue labels for Frobenius acting
through a degree-5 permutation action, Hodge-Tate weight tables, and the
graded characters of the three-step and four-step local filtrations as
monomials in opaque character tokens.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import sympy
from sympy.abc import x as _x

from .padic import PadicNumber, teichmuller


class AsaiError(Exception):
    pass


class NotHomomorphism(AsaiError):
    """Matrix assignment fails multiplicativity on some pair."""


class ThetaInSubgroup(AsaiError):
    """The distinguished coset representative lies in the subgroup."""


class RamifiedPrime(AsaiError):
    """The prime divides the discriminant of the quintic."""


# ---------------------------------------------------------------------------
# exact arithmetic in Q(i, sqrt5)

ENTRY_SCALE = 4

def _gg_mul(a, b):
    """Product of two ring elements given as integer 4-tuples (common
    denominator handled by the caller)."""
    x1, y1, u1, v1 = a
    x2, y2, u2, v2 = b
    return (
        x1 * x2 + 5 * y1 * y2 - u1 * u2 - 5 * v1 * v2,
        x1 * y2 + y1 * x2 - u1 * v2 - v1 * u2,
        x1 * u2 + 5 * y1 * v2 + u1 * x2 + 5 * v1 * y2,
        x1 * v2 + y1 * u2 + u1 * y2 + v1 * x2,
    )


def _gg_add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


_GG_ZERO = (0, 0, 0, 0)


def _mat2_mul(a, b):
    # entries at denominator ENTRY_SCALE; product entries at ENTRY_SCALE**2
    return tuple(
        tuple(
            _gg_add(_gg_mul(a[i][0], b[0][j]), _gg_mul(a[i][1], b[1][j]))
            for j in range(2)
        )
        for i in range(2)
    )


def _mat2_scaled(m, c):
    return tuple(tuple(tuple(c * t for t in e) for e in row) for row in m)


def _mat4_mul(a, b):
    # entries at denominator ENTRY_SCALE**2; product at ENTRY_SCALE**4
    out = []
    for i in range(4):
        row = a[i]
        out_row = []
        for j in range(4):
            acc = _GG_ZERO
            for k in range(4):
                acc = _gg_add(acc, _gg_mul(row[k], b[k][j]))
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def _mat4_scaled(m, c):
    return tuple(tuple(tuple(c * t for t in e) for e in row) for row in m)


# ---------------------------------------------------------------------------
# representations

class FiniteRep2:
    """A finite group together with an index-2 subgroup, a coset
    representative, and a 2x2 matrix assignment on the subgroup.

    elements: list of hashable element keys.
    multiply: callable (g, h) -> gh.
    identity: the identity key.
    in_subgroup: callable g -> bool; must cut out exactly half the elements.
    theta: coset representative outside the subgroup.
    matrices: dict mapping subgroup elements to 2x2 nested tuples whose
        entries are integer 4-tuples at denominator ENTRY_SCALE.
    """

    def __init__(self, elements, multiply, identity, in_subgroup, theta,
                 matrices):
        self.elements = list(elements)
        self.multiply = multiply
        self.identity = identity
        self.in_subgroup = in_subgroup
        self.theta = theta
        self.matrices = matrices
        self._inverse = None

    def subgroup_elements(self):
        return [g for g in self.elements if self.in_subgroup(g)]

    def inverse(self, g):
        if self._inverse is None:
            inv = {}
            for a in self.elements:
                for b in self.elements:
                    if self.multiply(a, b) == self.identity:
                        inv[a] = b
                        break
            self._inverse = inv
        return self._inverse[g]

    def verify_homomorphism(self):
        """Exact multiplicativity of the matrix table on every pair of
        subgroup elements."""
        sub = self.subgroup_elements()
        if set(self.matrices) != set(sub):
            raise NotHomomorphism("matrix table does not cover the subgroup")
        ident = self.matrices[self.identity]
        if _mat2_scaled(ident, 1) != (
            ((ENTRY_SCALE, 0, 0, 0), _GG_ZERO),
            (_GG_ZERO, (ENTRY_SCALE, 0, 0, 0)),
        ):
            raise NotHomomorphism("identity is not assigned the unit matrix")
        for a in sub:
            ma = self.matrices[a]
            for b in sub:
                prod = _mat2_mul(ma, self.matrices[b])
                if prod != _mat2_scaled(self.matrices[self.multiply(a, b)],
                                        ENTRY_SCALE):
                    raise NotHomomorphism(
                        "matrix table fails at the pair (%r, %r)" % (a, b))


BASIS_LABELS = ("e1*e1'", "e1*e2'", "e2*e1'", "e2*e2'")


class AsaiRep:
    """4x4 matrix assignment on the full group obtained by tensor induction;
    entries are integer 4-tuples at denominator ENTRY_SCALE**2."""

    def __init__(self, rep, matrices):
        self.rep = rep
        self.matrices = matrices
        self.basis_labels = BASIS_LABELS

    def matrix(self, g):
        return self.matrices[g]

    def character(self, g):
        """Trace of the induced matrix; the result must be a rational
        integer for the representations handled here."""
        m = self.matrices[g]
        acc = _GG_ZERO
        for i in range(4):
            acc = _gg_add(acc, m[i][i])
        scale = ENTRY_SCALE ** 2
        if acc[1] or acc[2] or acc[3] or acc[0] % scale:
            raise AsaiError("trace is not a rational integer")
        return acc[0] // scale

    def order_mod_center(self, g, center):
        """Order of g in the quotient by the given central subset."""
        h = g
        n = 1
        while h not in center:
            h = self.rep.multiply(h, g)
            n += 1
            if n > len(self.rep.elements):
                raise AsaiError("element order exceeds the group order")
        return n

    def verify_homomorphism(self):
        """Exact check that As(g)As(h) = As(gh) over every pair."""
        elems = self.rep.elements
        mats = self.matrices
        mult = self.rep.multiply
        for a in elems:
            ma = mats[a]
            for b in elems:
                prod = _mat4_mul(ma, mats[b])
                expect = _mat4_scaled(mats[mult(a, b)], ENTRY_SCALE ** 2)
                if prod != expect:
                    raise NotHomomorphism(
                        "induced matrices fail at the pair (%r, %r)" % (a, b))


def tensor_induce(rho, theta=None):
    """Tensor induction of a 2-dimensional subgroup representation to the
    full group, in the basis e_i (x) e_j' with the second slot moved through
    the coset representative."""
    if theta is None:
        theta = rho.theta
    if rho.in_subgroup(theta):
        raise ThetaInSubgroup("coset representative lies in the subgroup")
    rho.verify_homomorphism()
    theta_inv = rho.inverse(theta)
    matrices = {}
    for g in rho.elements:
        if rho.in_subgroup(g):
            m1 = rho.matrices[g]
            m2 = rho.matrices[
                rho.multiply(theta_inv, rho.multiply(g, theta))]
            rows = []
            for a in range(2):
                for b in range(2):
                    rows.append(tuple(
                        _gg_mul(m1[a][c], m2[b][d])
                        for c in range(2) for d in range(2)))
            matrices[g] = tuple(rows)
        else:
            m1 = rho.matrices[rho.multiply(g, theta)]
            m2 = rho.matrices[rho.multiply(theta_inv, g)]
            rows = []
            for a in range(2):
                for b in range(2):
                    # the two tensor slots are exchanged off the subgroup
                    rows.append(tuple(
                        _gg_mul(m1[a][d], m2[b][c])
                        for c in range(2) for d in range(2)))
            matrices[g] = tuple(rows)
    return AsaiRep(rho, matrices)


# ---------------------------------------------------------------------------
# the binary icosahedral model of the double cover of S5

def _z5_mul(a, b):
    return (a[0] * b[0] + 5 * a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _quat_mul(p, q):
    """Product of quaternions whose coordinates are (x, y) integer pairs
    denoting (x + y*sqrt5)/4."""
    a, b, c, d = p
    e, f, g, h = q
    comps = (
        ((1, a, e), (-1, b, f), (-1, c, g), (-1, d, h)),
        ((1, a, f), (1, b, e), (1, c, h), (-1, d, g)),
        ((1, a, g), (-1, b, h), (1, c, e), (1, d, f)),
        ((1, a, h), (1, b, g), (-1, c, f), (1, d, e)),
    )
    out = []
    for terms in comps:
        sx = sy = 0
        for sign, u, v in terms:
            px, py = _z5_mul(u, v)
            sx += sign * px
            sy += sign * py
        if sx % 4 or sy % 4:
            raise AsaiError("quaternion product left the lattice")
        out.append((sx // 4, sy // 4))
    return tuple(out)


def _quat_neg(q):
    return tuple((-c[0], -c[1]) for c in q)


_QUAT_ONE = ((4, 0), (0, 0), (0, 0), (0, 0))


def _icosian_units():
    """The 120 unit icosians: the 24 half-integer units together with the
    96 even coordinate rearrangements of (golden, 1, 1/golden, 0)/2."""
    units = set()
    for i in range(4):
        for s in (4, -4):
            coords = [(0, 0)] * 4
            coords[i] = (s, 0)
            units.add(tuple(coords))
    for sa in (2, -2):
        for sb in (2, -2):
            for sc in (2, -2):
                for sd in (2, -2):
                    units.add(((sa, 0), (sb, 0), (sc, 0), (sd, 0)))
    base = ((1, 1), (2, 0), (-1, 1), (0, 0))
    for perm in permutations(range(4)):
        inversions = sum(
            1 for i in range(4) for j in range(i + 1, 4)
            if perm[i] > perm[j])
        if inversions % 2:
            continue
        arranged = tuple(base[perm.index(i)] for i in range(4))
        for mask in range(8):
            coords = []
            bit = 0
            for c in arranged:
                if c == (0, 0):
                    coords.append(c)
                else:
                    sign = -1 if (mask >> bit) & 1 else 1
                    coords.append((sign * c[0], sign * c[1]))
                    bit += 1
            units.add(tuple(coords))
    if len(units) != 120:
        raise AsaiError("icosian construction produced %d units" % len(units))
    return sorted(units)


def _sigma(q):
    """Conjugate each coordinate over the quadratic subfield, then swap the
    last two quaternion coordinates with a sign flip on the second."""
    a, b, c, d = ((c0, -c1) for (c0, c1) in q)
    return (a, (-b[0], -b[1]), d, c)


def _rho_matrix(q):
    (xa, ya), (xb, yb), (xc, yc), (xd, yd) = q
    return (
        ((xa, ya, xb, yb), (xc, yc, xd, yd)),
        ((-xc, -yc, xd, yd), (xa, ya, -xb, -yb)),
    )


def s5_double_cover_rep():
    """A 240-element double cover of S5 realized on pairs (icosian, bit),
    with the nontrivial bit acting through the outer swap; the extension by
    the swap is split, which makes the induced character equal to the
    permutation character on 5 points minus its trivial summand."""
    icosians = _icosian_units()
    iset = set(icosians)
    for q in icosians:
        if _sigma(q) not in iset:
            raise AsaiError("outer swap does not preserve the icosians")
    elements = [(q, s) for s in (0, 1) for q in icosians]

    def multiply(g, h):
        q1, s1 = g
        q2, s2 = h
        return (_quat_mul(q1, _sigma(q2) if s1 else q2), s1 ^ s2)

    matrices = {(q, 0): _rho_matrix(q) for q in icosians}
    return FiniteRep2(
        elements=elements,
        multiply=multiply,
        identity=(_QUAT_ONE, 0),
        in_subgroup=lambda g: g[1] == 0,
        theta=(_QUAT_ONE, 1),
        matrices=matrices,
    )


def cover_center():
    """The two central elements of the double cover, for quotient orders."""
    return {(_QUAT_ONE, 0), (_quat_neg(_QUAT_ONE), 0)}


def rep_from_json(data):
    """Build a FiniteRep2 from JSON data: element names, a multiplication
    table, the subgroup member list, the coset representative, and matrix
    entries as integer 4-tuples at denominator ENTRY_SCALE."""
    elements = [tuple(e) if isinstance(e, list) else e
                for e in data["elements"]]

    def key(e):
        return tuple(e) if isinstance(e, list) else e

    table = {}
    for a, b, c in data["table"]:
        table[(key(a), key(b))] = key(c)
    subgroup = {key(e) for e in data["subgroup"]}
    matrices = {}
    for name, rows in data["matrices"]:
        matrices[key(name)] = tuple(
            tuple(tuple(entry) for entry in row) for row in rows)
    return FiniteRep2(
        elements=elements,
        multiply=lambda a, b: table[(a, b)],
        identity=key(data["identity"]),
        in_subgroup=lambda g: g in subgroup,
        theta=key(data["theta"]),
        matrices=matrices,
    )


# ---------------------------------------------------------------------------
# Frobenius classes of a quintic and their eigenvalue labels

@dataclass(frozen=True)
class S5FrobeniusClass:
    cycle_type: tuple

    def __post_init__(self):
        if sum(self.cycle_type) != 5:
            raise AsaiError("cycle type must partition 5")

    @property
    def fixed_points(self):
        return sum(1 for c in self.cycle_type if c == 1)

    @property
    def sign(self):
        return (-1) ** sum(c - 1 for c in self.cycle_type)


def quintic_discriminant(coeffs):
    return int(sympy.discriminant(sympy.Poly(coeffs, _x)))


def frobenius_class_quintic(coeffs, p):
    """Cycle type of Frobenius at p acting on the roots of a monic integer
    quintic, read off from the factor degrees modulo p."""
    if len(coeffs) != 6 or coeffs[0] != 1:
        raise AsaiError("expected a monic degree-5 coefficient list")
    if quintic_discriminant(coeffs) % p == 0:
        raise RamifiedPrime("p divides the quintic discriminant")
    poly = sympy.Poly(coeffs, _x, modulus=p)
    degrees = []
    for factor, mult in poly.factor_list()[1]:
        degrees.extend([factor.degree()] * mult)
    return S5FrobeniusClass(tuple(sorted(degrees, reverse=True)))


def _canonical_root(order, exponent):
    exponent %= order
    if exponent == 0:
        return (1, 0)
    g = math.gcd(order, exponent)
    return (order // g, exponent // g)


def _ratio_order(l1, l2):
    # order of the quotient of the two labelled roots of unity
    diff = Fraction(l1[1], l1[0]) - Fraction(l2[1], l2[0])
    return (diff % 1).denominator if diff % 1 else 1


@dataclass(frozen=True)
class AsaiEigenvalues:
    """Eigenvalue labels (order, exponent) of the permutation action on 5
    points with one trivial summand removed."""

    cycle_type: tuple
    labels: tuple

    def trace(self):
        return sum(1 for c in self.cycle_type if c == 1) - 1

    def product(self):
        total = sum(Fraction(j, m) for m, j in self.labels) % 1
        return _canonical_root(total.denominator, total.numerator)

    def distinct_mod(self, p):
        """Whether the four labels stay pairwise distinct after reduction
        to characteristic p: the quotient of two roots of unity reduces to
        1 exactly when its order is a power of p."""
        labels = self.labels
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                order = _ratio_order(labels[i], labels[j])
                while order % p == 0:
                    order //= p
                if order == 1:
                    return False
        return True

    def evaluate_padic(self, p, precision):
        """Teichmueller values of the labels, available when every label
        order divides p - 1."""
        values = []
        for m, j in self.labels:
            if m == 1:
                values.append(PadicNumber(p, precision, 1, 0))
                continue
            if (p - 1) % m:
                raise AsaiError("no root of order %d in the p-adic units" % m)
            g = sympy.primitive_root(p)
            root = teichmuller(pow(g, (p - 1) // m, p), p, precision)
            value = PadicNumber(p, precision, 1, 0)
            for _ in range(j):
                value = value * root
            values.append(value)
        return values


def asai_frobenius_eigenvalues(frob_class):
    labels = []
    for c in frob_class.cycle_type:
        labels.extend(_canonical_root(c, k) for k in range(c))
    labels.remove((1, 0))
    return AsaiEigenvalues(frob_class.cycle_type, tuple(sorted(labels)))


# ---------------------------------------------------------------------------
# Hodge-Tate weight tables

def ht_weight_table(ell):
    """Graded Hodge-Tate weights of the two local filtrations at parallel
    weight ell, plus the sign predicate for the middle step."""
    if ell < 1:
        raise AsaiError("weight must be at least 1")
    four_step = ((ell - 1,), (ell - 2, 0, 0), (-1, -1, 1 - ell), (-ell,))
    return {
        "three_step": ((ell - 2,), (-1, -1), (-ell,)),
        "four_step": four_step,
        "fil2_strictly_negative": all(
            w < 0 for piece in four_step[2:] for w in piece),
    }


# ---------------------------------------------------------------------------
# symbolic graded characters of the local filtrations

CHARACTER_TOKENS = (
    "frob1",      # unramified, Frobenius -> chosen unit root at the 1st prime
    "frob2",      # unramified, Frobenius -> chosen unit root at the 2nd prime
    "neb1",       # unramified local component of the central character, 1st
    "neb2",       # unramified local component of the central character, 2nd
    "unit_root",  # unramified unit-root character of the elliptic factor
    "cyc_wt",     # weight-direction cyclotomic token
    "cyc_tame",   # tame companion of the weight token
    "cyc_half",   # auxiliary square-root twist token
    "cyc",        # the cyclotomic character itself
)

# the cyclotomic character factors through the two companion tokens
_CYC_RELATION = {"cyc_tame": 1, "cyc_half": 1}


class CharacterMonomial:
    """Multiplicative monomial in the character tokens; exponents are
    integers and zero exponents are dropped."""

    def __init__(self, powers=None):
        powers = dict(powers or {})
        for token in powers:
            if token not in CHARACTER_TOKENS:
                raise AsaiError("unknown character token %r" % token)
        self.powers = {t: e for t, e in powers.items() if e}

    def __mul__(self, other):
        merged = dict(self.powers)
        for t, e in other.powers.items():
            merged[t] = merged.get(t, 0) + e
        return CharacterMonomial(merged)

    def inverse(self):
        return CharacterMonomial({t: -e for t, e in self.powers.items()})

    def __pow__(self, n):
        return CharacterMonomial({t: n * e for t, e in self.powers.items()})

    def normalized(self):
        """Rewrite the cyclotomic token through its two companions so that
        equal characters compare equal."""
        merged = {t: e for t, e in self.powers.items() if t != "cyc"}
        n = self.powers.get("cyc", 0)
        if n:
            for t, e in _CYC_RELATION.items():
                merged[t] = merged.get(t, 0) + n * e
        return tuple(sorted((t, e) for t, e in merged.items() if e))

    def __eq__(self, other):
        return (isinstance(other, CharacterMonomial)
                and self.normalized() == other.normalized())

    def __hash__(self):
        return hash(self.normalized())

    def __repr__(self):
        if not self.powers:
            return "CharacterMonomial(1)"
        parts = ["%s^%d" % (t, e) for t, e in sorted(self.powers.items())]
        return "CharacterMonomial(%s)" % " * ".join(parts)

    def evaluate(self, values):
        """Numeric value when each token is assigned an invertible scalar."""
        result = None
        for t, e in self.powers.items():
            v = values[t]
            if e < 0:
                v = 1 / v
                e = -e
            for _ in range(e):
                result = v if result is None else result * v
        if result is None:
            one = next(iter(values.values()), None)
            return 1 if one is None else one / one
        return result


def _mono(**powers):
    return CharacterMonomial(powers)


def filtration_characters(filtration, swap_primes=False):
    """Ordered graded pieces of the local filtration as lists of character
    monomials: "asai" gives the three-step filtration of the induced
    representation, "self_dual" the four-step filtration of its self-dual
    twist tensored with the elliptic factor.  swap_primes exchanges the
    stabilization roles of the two primes."""
    if filtration == "asai":
        graded = [
            [_mono(frob1=1, frob2=1)],
            [
                _mono(frob1=-1, frob2=1, neb1=-1, cyc_wt=1, cyc_tame=1),
                _mono(frob1=1, frob2=-1, neb2=-1, cyc_wt=1, cyc_tame=1),
            ],
            [_mono(frob1=-1, frob2=-1, neb1=-1, neb2=-1, cyc_wt=2,
                   cyc_tame=2)],
        ]
    elif filtration == "self_dual":
        graded = [
            [_mono(frob1=1, frob2=1, unit_root=1, cyc_wt=-1, cyc_tame=-1)],
            [
                _mono(frob1=1, frob2=1, unit_root=-1, cyc_wt=-1, cyc_half=1,
                      neb1=1, neb2=1),
                _mono(frob1=-1, frob2=1, unit_root=1, neb1=-1),
                _mono(frob1=1, frob2=-1, unit_root=1, neb2=-1),
            ],
            [
                _mono(frob1=-1, frob2=1, unit_root=-1, neb2=1, cyc=1),
                _mono(frob1=1, frob2=-1, unit_root=-1, neb1=1, cyc=1),
                _mono(frob1=-1, frob2=-1, unit_root=1, cyc_wt=1, cyc_tame=1,
                      neb1=-1, neb2=-1),
            ],
            [_mono(frob1=-1, frob2=-1, unit_root=-1, cyc_wt=1, cyc_tame=2,
                   cyc_half=1)],
        ]
    else:
        raise AsaiError("unknown filtration %r" % filtration)
    if swap_primes:
        swap = {"frob1": "frob2", "frob2": "frob1",
                "neb1": "neb2", "neb2": "neb1"}
        graded = [
            [CharacterMonomial({swap.get(t, t): e
                                for t, e in m.powers.items()})
             for m in piece]
            for piece in graded
        ]
    return graded


def ordinary_summand():
    """The distinguished rank-1 summand of the middle graded piece of the
    four-step filtration, used to cut out the ordinary local condition."""
    return _mono(frob1=-1, frob2=-1, unit_root=1, cyc_wt=1, cyc_tame=1,
                 neb1=-1, neb2=-1)


def induced_determinant():
    """Determinant character of the 4-dimensional induced representation:
    the square of the product of the two local determinants."""
    local = _mono(neb1=-1, neb2=-1, cyc_wt=2, cyc_tame=2)
    return local ** 2


def elliptic_graded_characters():
    """Graded characters of the two-step local filtration of the elliptic
    factor: the unramified unit-root line and the ramified quotient."""
    return [
        _mono(unit_root=1),
        _mono(unit_root=-1, cyc_tame=1, cyc_half=1, neb1=1, neb2=1),
    ]
