"""Finite-dimensional Hecke linear algebra: U_p matrices on supplied bases,
the ordinary projector, isotypic projection, p-stabilization, Euler-factor
reports, and the weight-2 L-value pipeline.

Spaces are certified by windows: a basis is validated through its leading
coefficient block, operator matrices are solved from that block and checked
against the next block of coefficients.  Inner products are never computed;
the projection onto a target eigensystem is realized by annihilating the
other systems with Hecke operators and reading off the first coefficient."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .padic import (
    NotOrdinary,
    PadicError,
    PadicNumber,
    PolynomialExact,
    bezout_projector,
    hensel_unit_root,
    int_valuation,
)
from .qexp import (
    EllipticQExp,
    HilbertQExp,
    diagonal_restrict,
    elliptic_twist,
    hecke_T,
    hilbert_deplete,
    padic_ring,
    ring_coerce,
    ring_zero,
    theta_d_inverse,
    twist_star,
    trivial_character,
    u_operator,
    v_operator,
)
from .realquad import PrimeIdealData, _lift_root


class HeckeError(ArithmeticError):
    pass


class NotInSpan(HeckeError):
    pass


class NotInvariant(HeckeError):
    pass


class NotSeparated(HeckeError):
    pass


class NotDerivative(HeckeError):
    pass


class WildCharacterUnsupported(HeckeError):
    pass


# ---------------------------------------------------------------------------
# eigensystems and stabilization


@dataclass(frozen=True)
class EigenSystem:
    """Hecke eigenvalue data for one newform or stabilization."""

    label: str
    weight: int
    level: int
    ap: dict  # prime (or prime index tag) -> eigenvalue
    character: Optional[dict] = None  # None = trivial
    up_eigenvalue: object = None
    field_tag: str = "elliptic"  # "elliptic" or "hilbert"
    up_pair: tuple = None  # Hilbert: the two chosen unit roots

    def chi(self, ell: int):
        if self.character is None:
            return 1
        return self.character[ell % self.level]

    def a(self, ell: int):
        if ell not in self.ap:
            raise HeckeError("no eigenvalue supplied at %d" % ell)
        return self.ap[ell]


def stabilize(system: EigenSystem, p: int, m: int):
    """Ordinary p-stabilization of an elliptic eigensystem of level prime
    to p: returns (stabilized system, alpha, beta) with alpha the unit root
    of X^2 - a_p X + chi(p) p^{k-1}."""
    if system.field_tag != "elliptic":
        raise HeckeError("use hilbert_stabilizations for Hilbert systems")
    if system.level % p == 0:
        raise HeckeError("level already divisible by %d" % p)
    a = Fraction(system.a(p))
    b = Fraction(system.chi(p)) * p ** (system.weight - 1)
    poly = PolynomialExact([b, -a, Fraction(1)])
    alpha = hensel_unit_root(poly, p, m)
    beta = PadicNumber.from_fraction(b, p, m) / alpha
    stabilized = EigenSystem(
        label=system.label + "-ordinary",
        weight=system.weight,
        level=system.level * p,
        ap=dict(system.ap),
        character=system.character,
        up_eigenvalue=alpha,
        field_tag="elliptic",
    )
    return stabilized, alpha, beta


def stabilized_expansion(f: EllipticQExp, beta, p: int) -> EllipticQExp:
    """The stabilization transformer f(q) - beta f(q^p); an eigenvector of
    U_p with the complementary root as eigenvalue."""
    shifted = v_operator(f, p, storage_cap=f.bound)
    return f + shifted.scale(ring_coerce(beta, f.ring) * (-1))


def _unit_roots(a: int, b: int, p: int, m: int):
    """Both roots of X^2 - aX + b when they are distinct units mod p,
    lifted to precision m."""
    if a % p == 0 and b % p == 0:
        raise NotOrdinary("no unit root")
    roots = sorted(
        r for r in range(p) if (r * r - a * r + b) % p == 0 and r % p != 0
    )
    if len(roots) != 2:
        raise NotSeparated("need two distinct unit roots modulo %d" % p)
    return tuple(
        PadicNumber(p, m, _lift_root(a, b, r, p, m), 0) for r in roots
    )


def hilbert_stabilizations(system: EigenSystem, p: int, m: int):
    """The four ordinary stabilizations of a Hilbert system at a split
    prime, indexed by the choice of unit root at each of the two primes.
    Requires the eigenvalue data under keys ("p1",) etc: a at each prime
    and the character value there, with both Hecke quadratics splitting
    into distinct unit roots (the weight-one setting)."""
    if system.field_tag != "hilbert":
        raise HeckeError("expected a Hilbert eigensystem")
    out = []
    pairs = []
    for tag in ("p1", "p2"):
        a = int(system.ap[tag])
        b = int(system.ap[tag + "_char"]) if tag + "_char" in system.ap else 1
        pairs.append(_unit_roots(a, b, p, m))
    for i, r1 in enumerate(pairs[0]):
        for j, r2 in enumerate(pairs[1]):
            out.append(
                EigenSystem(
                    label="%s-stab-%d%d" % (system.label, i, j),
                    weight=system.weight,
                    level=system.level * p,
                    ap=dict(system.ap),
                    character=system.character,
                    field_tag="hilbert",
                    up_pair=(r1, r2),
                )
            )
    return out


def expansion_from_eigensystem(
    system: EigenSystem, bound: int, ring
) -> EllipticQExp:
    """Normalized expansion (a_1 = 1) generated from prime eigenvalues by
    the standard recursion a_{l^{r+1}} = a_l a_{l^r} - chi(l) l^{k-1}
    a_{l^{r-1}} and multiplicativity."""
    import sympy

    coeffs = [ring_zero(ring), ring_coerce(1, ring)]
    vals = {1: Fraction(1)}
    for n in range(2, bound + 1):
        fac = sympy.factorint(n)
        if len(fac) > 1:
            v = Fraction(1)
            for q, e in fac.items():
                v *= vals[q**e]
            vals[n] = v
        else:
            (q, e), = fac.items()
            if e == 1:
                vals[n] = Fraction(system.a(q))
            else:
                back = Fraction(system.chi(q)) * q ** (system.weight - 1)
                vals[n] = (
                    Fraction(system.a(q)) * vals[q ** (e - 1)]
                    - back * vals[q ** (e - 2)]
                )
        coeffs.append(ring_coerce(vals[n], ring))
    return EllipticQExp(system.weight, system.level, bound, coeffs, ring)


# ---------------------------------------------------------------------------
# p-adic linear algebra helpers


def _solve_linear(A, b):
    """Solve A x = b over the p-adic coefficients by elimination with unit
    pivots; raises PadicError when the leading block is not invertible at
    precision."""
    n = len(A)
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            v = M[r][col].valuation()
            if v == 0:
                pivot = r
                break
        if pivot is None:
            raise PadicError("leading block not invertible at precision")
        M[col], M[pivot] = M[pivot], M[col]
        inv = M[col][col].inverse()
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _mat_vec(M, x):
    return [
        sum((M[i][j] * x[j] for j in range(len(x))), M[i][0] * 0)
        for i in range(len(M))
    ]


# ---------------------------------------------------------------------------
# Hecke spaces


class HeckeSpace:
    """Span of a supplied basis of expansions at common p-adic precision,
    certified through the leading dim x dim coefficient block (coefficients
    1..dim); membership and operator matrices are validated on the next dim
    coefficients."""

    def __init__(self, basis):
        if not basis:
            raise HeckeError("empty basis")
        ring = basis[0].ring
        if ring[0] != "padic":
            raise HeckeError("Hecke spaces need p-adic coefficients")
        if any(f.ring != ring for f in basis):
            raise HeckeError("mixed coefficient rings in basis")
        self.basis = list(basis)
        self.ring = ring
        self.p = ring[1]
        self.m = ring[2]
        self.dimension = len(basis)
        self.bound = min(f.bound for f in basis)
        if self.bound < 2 * self.dimension:
            raise HeckeError("basis bound below the certification window")
        self._block = [
            [basis[j][n] for j in range(self.dimension)]
            for n in range(1, self.dimension + 1)
        ]
        # certify invertibility of the leading block
        _solve_linear(self._block, [ring_zero(ring)] * self.dimension)
        self._matrices = {}

    def coordinates(self, phi: EllipticQExp):
        """Coordinates of phi in the basis, solved from the leading block
        and certified on the next dim coefficients."""
        d = self.dimension
        if phi.ring != self.ring:
            raise HeckeError("mixed coefficient rings")
        if phi.bound < 2 * d:
            raise HeckeError("expansion bound below the certification window")
        x = _solve_linear(self._block, [phi[n] for n in range(1, d + 1)])
        for n in range(d + 1, 2 * d + 1):
            recon = sum(
                (x[j] * self.basis[j][n] for j in range(d)),
                ring_zero(self.ring),
            )
            if not (recon - phi[n]).is_zero():
                raise NotInSpan("residual nonzero at coefficient %d" % n)
        return x

    def combine(self, x) -> EllipticQExp:
        out = [
            sum(
                (x[j] * self.basis[j][n] for j in range(self.dimension)),
                ring_zero(self.ring),
            )
            for n in range(self.bound + 1)
        ]
        f0 = self.basis[0]
        return EllipticQExp(f0.weight, f0.level, self.bound, out, self.ring)

    def register_matrix(self, descriptor, matrix):
        """Supply an operator matrix directly (e.g. diamond operators, which
        are not computable from bare expansions); write-once."""
        if descriptor in self._matrices:
            raise HeckeError("descriptor %r already cached" % (descriptor,))
        self._matrices[descriptor] = matrix

    def operator_matrix(self, descriptor):
        if descriptor in self._matrices:
            return self._matrices[descriptor]
        kind = descriptor[0]
        d = self.dimension
        columns = []
        for j in range(d):
            if kind == "U":
                img = u_operator(self.basis[j], descriptor[1])
            elif kind == "T":
                img = hecke_T(self.basis[j], descriptor[1])
            else:
                raise HeckeError(
                    "operator %r must be supplied via register_matrix" % kind
                )
            if img.bound < 2 * d:
                raise HeckeError("basis bound insufficient for %r" % (descriptor,))
            try:
                columns.append(self.coordinates(img))
            except NotInSpan as exc:
                raise NotInvariant(
                    "span not stable under %r: %s" % (descriptor, exc)
                ) from exc
        M = [[columns[j][i] for j in range(d)] for i in range(d)]
        self._matrices[descriptor] = M
        return M


def e_ord(space: HeckeSpace, phi: EllipticQExp) -> EllipticQExp:
    """Ordinary projection of an expansion in the span: the unit-root-space
    component of the U_p action."""
    x = space.coordinates(phi)
    E = bezout_projector(space.operator_matrix(("U", space.p)), space.p, space.m)
    return space.combine(_mat_vec(E, x))


def isotypic_project(space: HeckeSpace, phi: EllipticQExp, target: EigenSystem, annihilation):
    """Project onto the target eigensystem by annihilating the others:
    apply the product of (T_l - a_l(other)) / (a_l(target) - a_l(other))
    over the supplied (l, a_l(other)) pairs.  Returns (component, lambda1)
    where lambda1 is the first coefficient of the component (the
    coefficient of the normalized target eigenform)."""
    x = space.coordinates(phi)
    d = space.dimension
    for ell, a_other in annihilation:
        M = space.operator_matrix(("T", ell))
        diff = ring_coerce(Fraction(target.a(ell)) - Fraction(a_other), space.ring)
        if diff.valuation() != 0:
            raise NotSeparated(
                "eigenvalues at %d not separated at precision" % ell
            )
        a_o = ring_coerce(a_other, space.ring)
        y = _mat_vec(M, x)
        x = [(y[i] - a_o * x[i]) / diff for i in range(d)]
    component = space.combine(x)
    return component, component[1]


def ordinary_projection_of_derivative(h: EllipticQExp) -> EllipticQExp:
    """Certified ordinary projection of a q-derivative: verifies that h has
    the shape (q d/dq) c for some expansion c at working precision (each
    coefficient h_n divisible by n in Z_p) and returns zero.  This is the
    operator identity U_p (q d/dq) = p (q d/dq) U_p: iterating U_p makes a
    derivative divisible by arbitrarily large powers of p, so the ordinary
    projector kills it."""
    if h.ring[0] != "padic":
        raise HeckeError("certification needs p-adic coefficients")
    p = h.ring[1]
    if not h.coeffs[0].is_zero():
        raise NotDerivative("nonzero constant term")
    for n in range(1, h.bound + 1):
        v = h.coeffs[n].valuation()
        if v is not None and v < int_valuation(n, p):
            raise NotDerivative(
                "coefficient %d not divisible by its index" % n
            )
    return EllipticQExp.zero(h.weight, h.level, h.bound, h.ring)


# ---------------------------------------------------------------------------
# Euler factors and interpolation constants


@dataclass(frozen=True)
class EulerFactorReport:
    """All interpolation and correction scalars at one arithmetic point.
    Values are p-adic with exact (possibly negative) valuations.  Entries
    that multiply a Gauss-sum token are (value, token exponent) pairs; the
    token itself lives in a ramified extension and is never evaluated."""

    ordinary_factor: PadicNumber  # 1 - beta/alpha for the projected form
    special_factor: PadicNumber  # product over the four root pairings
    depth_one_factor: PadicNumber  # 1 - a1 b1 a2 b2 / beta^2
    interpolation_at_point: tuple  # ((value), gauss token exponent)
    interpolation_at_base: PadicNumber
    twisted_unit_root: PadicNumber  # unit root after the norm twist
    localization_factor: tuple  # (value, metadata dict)
    comparison_factor: tuple  # (value, metadata dict)
    nonzero: dict  # name -> bool verdict at precision

    def valuations(self):
        return {
            "ordinary_factor": self.ordinary_factor.valuation(),
            "special_factor": self.special_factor.valuation(),
            "depth_one_factor": self.depth_one_factor.valuation(),
        }


ARCHIMEDEAN_NOTE = (
    "assumed: token has complex absolute value 1 while the unit root has "
    "complex absolute value p^(1/2), so the factor cannot vanish; "
    "not machine-checkable"
)


def euler_report(
    alphas,
    f_roots,
    ell: int,
    alpha_exp: int,
    p: int,
    m: int,
    unit_tokens: dict = None,
) -> EulerFactorReport:
    """Evaluate the interpolation and correction factors from the four
    stabilization roots (a1, b1, a2, b2) of the weight-one system and the
    two roots (alpha, beta) of the weight-2 Hecke quadratic, at an
    arithmetic point of weight ell and conductor exponent alpha_exp.

    unit_tokens supplies p-adic unit stand-ins for the character values and
    Hecke-ratio tokens entering the localization and comparison factors;
    they default to 1."""

    def pn(x):
        if isinstance(x, PadicNumber):
            if (x.p, x.m) != (p, m):
                raise PadicError("mixed p-adic contexts")
            return x
        return PadicNumber.from_fraction(Fraction(x), p, m)

    a1, b1, a2, b2 = (pn(x) for x in alphas)
    alpha_f, beta_f = (pn(x) for x in f_roots)
    one = PadicNumber.one(p, m)
    tokens = {"chi_p1": 1, "chi_p2": 1, "ratio_12": 1, "ratio_21": 1}
    tokens.update(unit_tokens or {})
    tokens = {k: pn(v) for k, v in tokens.items()}

    ordinary = one - beta_f / alpha_f
    special = one
    for r1 in (a1, b1):
        for r2 in (a2, b2):
            special = special * (one - r1 * r2 / beta_f)
    depth_one = one - a1 * b1 * a2 * b2 / (beta_f * beta_f)

    point_value = (a1 * a2 / alpha_f * pn(p) ** (2 - ell)) ** alpha_exp
    interpolation_at_point = (point_value, -1)
    interpolation_at_base = (one - a1 * a2 / alpha_f) / (
        one - alpha_f / (a1 * a2 * pn(p))
    )

    twisted_unit_root = beta_f / pn(p)

    localization = (one - alpha_f * tokens["chi_p1"] * tokens["ratio_12"]) * (
        one - alpha_f * tokens["chi_p2"] * tokens["ratio_21"]
    )
    comparison = (-alpha_f) * (one - tokens["ratio_12"] / alpha_f)

    nonzero = {
        "ordinary_factor": not ordinary.is_zero(),
        "special_factor": not special.is_zero(),
        "depth_one_factor": not depth_one.is_zero(),
        "interpolation_at_base": not interpolation_at_base.is_zero(),
        "localization_factor": True,
        "comparison_factor": True,
    }
    return EulerFactorReport(
        ordinary_factor=ordinary,
        special_factor=special,
        depth_one_factor=depth_one,
        interpolation_at_point=interpolation_at_point,
        interpolation_at_base=interpolation_at_base,
        twisted_unit_root=twisted_unit_root,
        localization_factor=(localization, {"verdict": ARCHIMEDEAN_NOTE}),
        comparison_factor=(comparison, {"verdict": ARCHIMEDEAN_NOTE}),
        nonzero=nonzero,
    )


# ---------------------------------------------------------------------------
# weight-2 L-value pipeline


def lvalue_weight2(
    g: HilbertQExp,
    prime_data: PrimeIdealData,
    fstar: EigenSystem,
    fstar_roots,
    space: HeckeSpace,
    annihilation,
    chi: dict = None,
) -> PadicNumber:
    """The weight-2 crystalline L-value pipeline: deplete at both primes,
    invert the first theta operator, twist by the (trivial) character,
    restrict to the diagonal, apply the weight-1 tame twist, project to the
    ordinary part and onto the target eigensystem, then divide the first
    coefficient by the ordinary factor 1 - beta/alpha."""
    if chi is not None:
        raise WildCharacterUnsupported(
            "nontrivial wild characters need Gauss sums outside numeric scope"
        )
    p = prime_data.p
    depleted = hilbert_deplete(g, prime_data, "both")
    inverted = theta_d_inverse(depleted, 1, prime_data)
    twisted = twist_star(inverted, trivial_character(p), prime_data, which=1)
    restricted = diagonal_restrict(twisted)
    tame = elliptic_twist(restricted, j=1)
    ordinary = e_ord(space, tame)
    _, lambda1 = isotypic_project(space, ordinary, fstar, annihilation)
    alpha_f, beta_f = fstar_roots
    E = PadicNumber.one(p, space.m) - ring_coerce(beta_f, tame.ring) / ring_coerce(
        alpha_f, tame.ring
    )
    return lambda1 / E


# ---------------------------------------------------------------------------
# eigendata JSON


def eigensystem_to_json(system: EigenSystem) -> dict:
    return {
        "label": system.label,
        "weight": system.weight,
        "level": system.level,
        "ap_table": sorted([k, str(v)] for k, v in system.ap.items()),
        "field": system.field_tag,
        "character": None
        if system.character is None
        else sorted([k, str(v)] for k, v in system.character.items()),
    }


def eigensystem_from_json(obj: dict) -> EigenSystem:
    def parse(s):
        return Fraction(s) if "/" in s or s.lstrip("-").isdigit() else s

    ap = {}
    for k, v in obj["ap_table"]:
        ap[int(k) if str(k).isdigit() else k] = parse(v)
    character = None
    if obj.get("character") is not None:
        character = {int(k): parse(v) for k, v in obj["character"]}
    return EigenSystem(
        label=obj["label"],
        weight=obj["weight"],
        level=obj["level"],
        ap=ap,
        character=character,
        field_tag=obj.get("field", "elliptic"),
    )
