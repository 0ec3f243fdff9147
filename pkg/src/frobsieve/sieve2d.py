"""Relation collection on product surfaces.

Two sieves share the same skeleton: pick a surface S with two projections,
a curve (or pair of curves) on S cut out so that its residue field is the
target field L, then run through low-degree functions on S and keep those
whose restrictions to the two sides both factor into small places.  Each
kept function equates two factorizations in L^*.

The first instance is the rational one: S = P^1 x P^1 glued along the
correspondence y = f(x), x = g(y), with relations between univariate
factorizations on either side.  The second runs on E x E for an elliptic
curve with endomorphism ring bookkeeping: ample classes are checked with
the intersection form, function spaces are built from Riemann-Roch bases
and cut down by evaluation along the graph of an endomorphism, and both
restrictions live on copies of E where places group into translation
classes.
"""

import random

from .errors import (
    InsufficientPoints,
    NonInvertible,
    SearchFailed,
    SieveTimeout,
)
from .ffcore import (
    Poly,
    PrimeField,
    QuotientField,
    factor,
    find_irreducible,
    is_irreducible,
    kernel_basis,
    monic_irreducibles,
    poly_gcd,
    poly_sort_key,
)
from .elliptic import (
    Curve,
    EndomorphismElement,
    _monomial_basis,
    build_elliptic_residue,
    ec_add,
    ec_neg,
    ec_scalar,
    ec_sub,
)


def _mix(seed: int, i: int) -> int:
    return seed * 0x9E3779B1 + i


# ---------------------------------------------------------------------------
# The rational surface: bidegrees and the correspondence setup.


class NSClassP1P1:
    """A curve class on P^1 x P^1 is just its bidegree."""

    __slots__ = ("d_x", "d_y")

    def __init__(self, d_x: int, d_y: int):
        if d_x < 0 or d_y < 0:
            raise ValueError("bidegrees are nonnegative")
        self.d_x = d_x
        self.d_y = d_y

    def __repr__(self):
        return f"NSClassP1P1({self.d_x}, {self.d_y})"

    def __eq__(self, other):
        return (
            isinstance(other, NSClassP1P1)
            and (self.d_x, self.d_y) == (other.d_x, other.d_y)
        )


def intersection_form_p1p1(D: NSClassP1P1, E: NSClassP1P1) -> int:
    return E.d_x * D.d_y + D.d_x * E.d_y


class BivariatePoly:
    """Sparse polynomial in x, y over F_p, the sieving element lambda."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        self.p = p
        self.coeffs = {
            (i, j): c % p for (i, j), c in dict(coeffs).items() if c % p
        }

    def __repr__(self):
        return f"BivariatePoly({self.coeffs})"

    def __eq__(self, other):
        return (
            isinstance(other, BivariatePoly)
            and (self.p, self.coeffs) == (other.p, other.coeffs)
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self):
        if not self.coeffs:
            return (0, 0)
        return (
            max(i for i, _ in self.coeffs),
            max(j for _, j in self.coeffs),
        )

    def substitute_curve_x(self, f: Poly) -> Poly:
        """lambda(X, f(X)) as a univariate polynomial."""
        field = PrimeField(self.p)
        dy = max((j for _, j in self.coeffs), default=0)
        acc = field.poly([])
        for j in range(dy, -1, -1):
            layer = [0] * (max((i for i, jj in self.coeffs if jj == j), default=0) + 1)
            for (i, jj), c in self.coeffs.items():
                if jj == j:
                    layer[i] = c
            acc = acc * f + field.poly(layer)
        return acc

    def substitute_curve_y(self, g: Poly) -> Poly:
        """lambda(g(Y), Y) as a univariate polynomial."""
        field = PrimeField(self.p)
        dx = max((i for i, _ in self.coeffs), default=0)
        acc = field.poly([])
        for i in range(dx, -1, -1):
            layer = [0] * (max((j for ii, j in self.coeffs if ii == i), default=0) + 1)
            for (ii, j), c in self.coeffs.items():
                if ii == i:
                    layer[j] = c
            acc = acc * g + field.poly(layer)
        return acc

    def evaluate(self, ops, xv, yv):
        acc = ops.zero()
        for (i, j), c in self.coeffs.items():
            term = ops.mul(ops.pow(xv, i), ops.pow(yv, j))
            acc = ops.add(acc, ops.mul(ops.embed(c), term))
        return acc

    def to_json(self):
        return sorted([i, j, c] for (i, j), c in self.coeffs.items())

    @classmethod
    def from_json(cls, p, data):
        return cls(p, {(i, j): c for i, j, c in data})


class JLSetup:
    """The glued correspondence: y = f(x) and x = g(y) meet in d_f*d_g
    points; h cuts out a Galois orbit of them of size d, and the residue
    field of that orbit is the target L = F_p[X]/h."""

    def __init__(self, p: int, f: Poly, g: Poly, h: Poly):
        self.p = p
        self.f = f
        self.g = g
        self.h = h.monic()
        if not is_irreducible(self.h):
            raise ValueError("h must be irreducible")
        rem = (g.compose(f) - Poly([0, 1], p)) % self.h
        if not rem.is_zero():
            raise ValueError("h does not divide g(f(X)) - X")
        self.ring = QuotientField(self.h)
        self.y_image = f % self.h

    @property
    def d(self) -> int:
        return self.h.degree

    def __repr__(self):
        return (
            f"JLSetup(p={self.p}, d_f={self.f.degree}, "
            f"d_g={self.g.degree}, d={self.d})"
        )

    def to_json(self):
        return {
            "p": self.p,
            "f": self.f.to_list(),
            "g": self.g.to_list(),
            "h": self.h.to_list(),
        }

    @classmethod
    def from_json(cls, data):
        p = int(data["p"])
        field = PrimeField(p)
        return cls(
            p,
            field.poly([int(c) for c in data["f"]]),
            field.poly([int(c) for c in data["g"]]),
            field.poly([int(c) for c in data["h"]]),
        )


def jl_setup(
    p: int, d_f: int, d_g: int, d: int, seed: int = 0, max_trials: int = 500
) -> JLSetup:
    """Sample f, g until g(f(X)) - X has a simple irreducible factor of
    degree d; that factor is the target field modulus."""
    if not 1 <= d <= d_f * d_g:
        raise ValueError("need 1 <= d <= d_f*d_g intersection points")
    field = PrimeField(p)
    x = field.poly([0, 1])
    for trial in range(max_trials):
        rng = random.Random(_mix(seed, trial))
        f = field.random_poly(rng, d_f)
        g = field.random_poly(rng, d_g)
        if f.degree != d_f or g.degree != d_g:
            continue
        r = g.compose(f) - x
        if r.degree != d_f * d_g:
            continue
        _, facs = factor(r)
        for q, mult in facs:
            if q.degree == d and mult == 1:
                return JLSetup(p, f, g, q)
    raise SieveTimeout(f"no degree-{d} simple factor in {max_trials} samples")


class JLRelation:
    """lambda restricted to both rulings, factored, with the F_p^* ratio.

    side_a is the factorization of lambda(X, f(X)), side_b that of
    lambda(g(Y), Y); both are (unit, [(monic irreducible, multiplicity)]).
    Modulo h the two products agree up to the unit ratio, so the relation
    lives in F_q^*/F_p^* exactly as the sieve wants it.
    """

    __slots__ = ("lam", "side_a", "side_b")

    def __init__(self, lam: BivariatePoly, side_a, side_b):
        self.lam = lam
        self.side_a = side_a
        self.side_b = side_b

    def __repr__(self):
        return (
            f"JLRelation(|a|={len(self.side_a[1])}, |b|={len(self.side_b[1])})"
        )

    def ratio(self, setup: JLSetup) -> int:
        """Constant in F_p^* relating the two monic products mod h."""
        ring = setup.ring
        prod_a = ring.one()
        for q, e in self.side_a[1]:
            prod_a = ring.mul(prod_a, ring.pow(ring.el(q), e))
        prod_b = ring.one()
        yv = setup.y_image
        for q, e in self.side_b[1]:
            val = _horner(ring, q, yv)
            prod_b = ring.mul(prod_b, ring.pow(val, e))
        quot = ring.mul(prod_a, ring.inv(prod_b))
        if quot.degree > 0:
            raise ValueError("sides disagree beyond a constant")
        c = quot.constant_value()
        if c == 0:
            raise ValueError("degenerate relation")
        return c

    def verify(self, setup: JLSetup) -> bool:
        """Both factorizations reproduce their restriction, and the two
        restrictions agree on the curve."""
        field = PrimeField(setup.p)
        a_poly = self.lam.substitute_curve_x(setup.f)
        b_poly = self.lam.substitute_curve_y(setup.g)
        for (unit, facs), target in ((self.side_a, a_poly), (self.side_b, b_poly)):
            prod = field.poly([unit])
            for q, e in facs:
                for _ in range(e):
                    prod = prod * q
            if prod != target:
                return False
        ring = setup.ring
        va = ring.el(a_poly)
        vb = _horner(ring, b_poly, setup.y_image)
        if va != vb:
            return False
        try:
            self.ratio(setup)
        except (ValueError, NonInvertible):
            return False
        return True

    def to_json(self):
        def side(s):
            unit, facs = s
            return {
                "unit": unit,
                "factors": [[q.to_list(), e] for q, e in facs],
            }

        return {
            "lam": self.lam.to_json(),
            "side_a": side(self.side_a),
            "side_b": side(self.side_b),
        }


def _horner(ring, q: Poly, val):
    acc = ring.zero()
    for c in reversed(q.coeffs):
        acc = ring.add(ring.mul(acc, val), ring.embed(c))
    return acc


def jl_relation(setup: JLSetup, lam: BivariatePoly, kappa: int):
    """The relation carried by one lambda, or None if either side fails
    the smoothness bound."""
    if lam.is_zero():
        return None
    a_poly = lam.substitute_curve_x(setup.f)
    b_poly = lam.substitute_curve_y(setup.g)
    if a_poly.is_zero() or b_poly.is_zero():
        return None
    unit_a, facs_a = factor(a_poly)
    unit_b, facs_b = factor(b_poly)
    if any(q.degree > kappa for q, _ in facs_a):
        return None
    if any(q.degree > kappa for q, _ in facs_b):
        return None
    rel = JLRelation(lam, (unit_a, facs_a), (unit_b, facs_b))
    if not rel.verify(setup):
        raise ValueError("relation failed verification; setup inconsistent")
    return rel


def jl_sieve(
    setup: JLSetup,
    u_x: int,
    u_y: int,
    kappa: int,
    budget: int,
    seed: int = 0,
    target: int = None,
):
    """Run through random lambda of bidegree <= (u_x, u_y) and keep the
    smooth ones.  Trials are keyed by (seed, index) so partitions of the
    trial range merge into the same result set."""
    if u_x < 0 or u_y < 0 or (u_x == 0 and u_y == 0):
        raise ValueError("bidegree must be nonzero")
    relations = []
    seen = set()
    for trial in range(budget):
        rng = random.Random(_mix(seed, trial))
        coeffs = {
            (i, j): rng.randrange(setup.p)
            for i in range(u_x + 1)
            for j in range(u_y + 1)
        }
        lam = BivariatePoly(setup.p, coeffs)
        if lam.is_zero() or lam.degrees() == (0, 0):
            continue
        key = tuple(sorted(lam.coeffs.items()))
        if key in seen:
            continue
        seen.add(key)
        rel = jl_relation(setup, lam, kappa)
        if rel is not None:
            relations.append(rel)
            if target is not None and len(relations) >= target:
                return relations
    if target is not None and len(relations) < target:
        raise SieveTimeout(
            f"{len(relations)}/{target} relations in {budget} trials", relations
        )
    return relations


# ---------------------------------------------------------------------------
# Rational functions and the function field of an elliptic curve.


class RationalFunction:
    """num/den over F_p[x], kept reduced with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = None):
        if den is None:
            den = Poly([1], num.p)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly([1], num.p)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = (num // g)
                den = (den // g)
            lc = den.lc()
            if lc != 1:
                inv = pow(lc, -1, num.p)
                num = num * inv
                den = den * inv
        self.num = num
        self.den = den

    def __repr__(self):
        return f"({self.num!r})/({self.den!r})"

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunction)
            and (self.num, self.den) == (other.num, other.den)
        )

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other):
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other):
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def evaluate(self, ring, xv):
        num = _horner(ring, self.num, xv)
        den = _horner(ring, self.den, xv)
        return ring.mul(num, ring.inv(den))


def _rf_const(p: int, c: int) -> RationalFunction:
    return RationalFunction(Poly([c], p))


class FuncFieldOps:
    """Field adapter for F_p(x)[y] / (y^2 - f): elements are (u, v) pairs
    of rational functions standing for u + y*v.  Plugging the generic
    point (x, y) through the curve group law happens entirely here."""

    def __init__(self, p: int, f: Poly):
        self.p = p
        self.f = f
        self._f_rf = RationalFunction(f)

    def embed(self, c: int):
        return (_rf_const(self.p, c), _rf_const(self.p, 0))

    def zero(self):
        return self.embed(0)

    def one(self):
        return self.embed(1)

    def x(self):
        return (RationalFunction(Poly([0, 1], self.p)), _rf_const(self.p, 0))

    def y(self):
        return (_rf_const(self.p, 0), _rf_const(self.p, 1))

    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def sub(self, a, b):
        return (a[0] - b[0], a[1] - b[1])

    def neg(self, a):
        return (-a[0], -a[1])

    def mul(self, a, b):
        # (u1 + y v1)(u2 + y v2) with y^2 = f
        u = a[0] * b[0] + self._f_rf * a[1] * b[1]
        v = a[0] * b[1] + a[1] * b[0]
        return (u, v)

    def norm(self, a) -> RationalFunction:
        return a[0] * a[0] - self._f_rf * a[1] * a[1]

    def inv(self, a):
        n = self.norm(a)
        if n.is_zero():
            raise NonInvertible("zero divisor in the function field layer")
        return (a[0] / n, -(a[1] / n))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        acc = self.one()
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def is_zero(self, a) -> bool:
        return a[0].is_zero() and a[1].is_zero()

    def eq(self, a, b) -> bool:
        return a[0] == b[0] and a[1] == b[1]

    def evaluate(self, ring, a, xv, yv):
        """Value of u + y*v at a point with coordinates in a ring."""
        out = a[0].evaluate(ring, xv)
        if not a[1].is_zero():
            out = ring.add(out, ring.mul(yv, a[1].evaluate(ring, xv)))
        return out


# ---------------------------------------------------------------------------
# Néron-Severi classes on E x E and the intersection form.


class NSClassEE:
    """(d1, d2, xi): fiber multiplicities plus an endomorphism component."""

    __slots__ = ("d1", "d2", "xi")

    def __init__(self, d1: int, d2: int, xi: EndomorphismElement):
        self.d1 = d1
        self.d2 = d2
        self.xi = xi

    def __repr__(self):
        return f"NSClassEE({self.d1}, {self.d2}, {self.xi!r})"


def class_of_side_a(alpha: EndomorphismElement) -> NSClassEE:
    return NSClassEE(alpha.norm(), 1, alpha)


def class_of_side_b(beta: EndomorphismElement) -> NSClassEE:
    return NSClassEE(1, beta.norm(), beta.conj())


def intersection_degrees_ee(c: NSClassEE, alpha, beta):
    """Intersection numbers of the class with the two parametrized curves."""
    da = c.d1 + c.d2 * alpha.norm() - (c.xi * alpha.conj()).trace()
    db = c.d1 * beta.norm() + c.d2 - (c.xi * beta.conj()).trace()
    return da, db


def effectivity_check(c: NSClassEE) -> bool:
    """Whether the class admits the sections the sieve needs."""
    if c.d1 < 1 or c.d2 < 1:
        raise ValueError("need d1, d2 >= 1")
    return c.d1 * c.d2 >= c.xi.norm() + 1


def expected_dimension(c: NSClassEE) -> int:
    n = c.xi.norm()
    full = (c.d1 + n) * (c.d2 + 1)
    conditions = c.d1 + n + (c.d2 + 1) * n
    return full - conditions


# ---------------------------------------------------------------------------
# Linear systems cut out by vanishing along the graph of an endomorphism.


class SurfaceFunction:
    """Element of the product space L(k1*O) x L(k2*O) on E x E, stored as
    coefficients over the monomial-pair basis."""

    __slots__ = ("basis1", "basis2", "coeffs")

    def __init__(self, basis1, basis2, coeffs):
        self.basis1 = basis1
        self.basis2 = basis2
        self.coeffs = list(coeffs)

    def evaluate(self, ops, P, Q):
        x1, y1 = P
        x2, y2 = Q
        acc = ops.zero()
        idx = 0
        for (i1, j1) in self.basis1:
            b1 = ops.mul(ops.pow(x1, i1), ops.pow(y1, j1))
            for (i2, j2) in self.basis2:
                c = self.coeffs[idx]
                idx += 1
                if c:
                    b2 = ops.mul(ops.pow(x2, i2), ops.pow(y2, j2))
                    acc = ops.add(acc, ops.mul(ops.embed(c), ops.mul(b1, b2)))
        return acc

    def is_zero(self) -> bool:
        return not any(self.coeffs)


class LinearSystemEE:
    """Kernel basis of the graph-vanishing conditions, with the evaluation
    data kept around for holdout checks."""

    def __init__(self, cls, basis1, basis2, kernel, rows_used, holdout):
        self.cls = cls
        self.basis1 = basis1
        self.basis2 = basis2
        self.kernel = kernel
        self.rows_used = rows_used
        self.holdout = holdout  # (field adapter, P, Q) triples, unused in solve

    def __repr__(self):
        return (
            f"LinearSystemEE(dim={len(self.kernel)}, "
            f"space={len(self.basis1)}x{len(self.basis2)})"
        )

    def function(self, vec) -> SurfaceFunction:
        return SurfaceFunction(self.basis1, self.basis2, vec)


def _extension_points(curve: Curve, e: int):
    """Affine points of E over F_{p^e} in canonical order, one per
    Frobenius orbit, skipping points defined over smaller fields."""
    p = curve.p
    if e == 1:
        return [(curve.ops, P) for P in curve.points()]
    fq = QuotientField(find_irreducible(p, e))
    squares = {}
    for yv in fq.elements():
        squares.setdefault(fq.mul(yv, yv).coeffs, []).append(yv)
    out = []
    for xv in fq.elements():
        rhs = fq.add(
            fq.mul(fq.mul(xv, xv), xv),
            fq.add(fq.mul(fq.embed(curve.a4), xv), fq.embed(curve.a6)),
        )
        for yv in squares.get(rhs.coeffs, ()):
            if xv.degree <= 0 and yv.degree <= 0:
                continue  # rational point, already seen at e = 1
            conj = (fq.pow(xv, p), fq.pow(yv, p))
            key = (xv.coeffs, yv.coeffs)
            ckey = (conj[0].coeffs, conj[1].coeffs)
            if ckey < key:
                continue  # keep one representative per conjugate pair
            out.append((fq, (xv, yv)))
    return out


def _graph_points(curve: Curve, xi: EndomorphismElement, max_degree: int = 2):
    """Deterministic stream of (ops, P, -xi(P), degree) along the graph.

    Rational points come first, walked as k*G0 from a fixed generator;
    when the base field cannot furnish enough conditions the stream
    continues with points over small extensions, one representative per
    Frobenius orbit."""
    p = curve.p
    levels = []
    rational = curve.points()
    if rational:
        g0 = rational[0]
        walk = []
        P = g0
        while P is not None:
            walk.append(P)
            P = ec_add(curve.ops, curve.a4, P, g0)
        levels.append((1, [(curve.ops, P) for P in walk]))
    for e in range(2, max_degree + 1):
        levels.append((e, _extension_points(curve, e)))
    out = []
    for e, pts in levels:
        for ops, P in pts:
            frob = lambda R: (ops.pow(R[0], p), ops.pow(R[1], p))
            Q = ec_neg(ops, xi.apply(ops, curve.a4, P, frob))
            if Q is None:
                continue  # kernel of xi; second factor has a pole here
            out.append((ops, P, Q, e))
    return out


def linear_system_ee(setup, c: NSClassEE, holdout_count: int = 20) -> LinearSystemEE:
    """Sections of the class c vanishing on the graph of -xi.

    Conditions are imposed at graph points over F_p and F_{p^2}; a point
    of degree e contributes e rows.  Once the row count passes the
    intersection bound, vanishing at the sampled points forces vanishing
    along the whole graph, which is what makes the kernel a genuine
    linear system and not an artifact of the sample.
    """
    if not effectivity_check(c):
        raise ValueError("class fails the effectivity inequality")
    curve = setup.curve
    n = c.xi.norm()
    if n == 0:
        raise InsufficientPoints(
            "xi = 0 degenerates the graph; translate the class instead"
        )
    k1 = c.d1 + n
    k2 = c.d2 + 1
    basis1 = _monomial_basis(k1)
    basis2 = _monomial_basis(k2)
    ncols = len(basis1) * len(basis2)
    needed = k1 + k2 * n + 1

    stream = _graph_points(curve, c.xi)
    rows = []
    used = 0
    holdout = []
    for ops, P, Q, e in stream:
        if len(rows) >= needed + 4:
            if len(holdout) < holdout_count:
                holdout.append((ops, P, Q))
                continue
            break
        used += 1
        vals = []
        for (i1, j1) in basis1:
            b1 = ops.mul(ops.pow(P[0], i1), ops.pow(P[1], j1))
            for (i2, j2) in basis2:
                b2 = ops.mul(ops.pow(Q[0], i2), ops.pow(Q[1], j2))
                vals.append(ops.mul(b1, b2))
        for k in range(e):
            row = []
            for v in vals:
                if e == 1:
                    row.append(v % curve.p)
                else:
                    cs = v.coeffs
                    row.append(cs[k] if k < len(cs) else 0)
            rows.append(row)
    if len(rows) < needed:
        raise InsufficientPoints(
            f"only {len(rows)} usable graph conditions; need {needed}"
        )
    if len(holdout) < holdout_count:
        raise InsufficientPoints(
            f"only {len(holdout)} graph points left for holdout checks"
        )
    kernel = kernel_basis(rows, ncols, curve.p)
    return LinearSystemEE(c, basis1, basis2, kernel, len(rows), holdout)


# ---------------------------------------------------------------------------
# The elliptic-square setup: alpha, beta, and the intersection point.


class EESetup:
    """Everything the E x E sieve needs: the residue-field construction,
    the endomorphism pair with 1 - beta*alpha = phi - 1, the offset
    points, and the distinguished intersection point over L."""

    def __init__(self, ext, alpha, beta, a, b, m0, p_int, q_int):
        self.ext = ext
        self.curve = ext.curve
        self.alpha = alpha
        self.beta = beta
        self.a = a
        self.b = b
        self.m0 = m0
        self.p_int = p_int  # intersection point on side A, coords in L
        self.q_int = q_int  # its partner on side B

    def __repr__(self):
        return (
            f"EESetup(p={self.curve.p}, d={self.ext.rep.d}, "
            f"alpha={self.alpha!r}, beta={self.beta!r})"
        )

    @property
    def ring(self):
        return self.ext.ring

    def to_json(self):
        return {
            "p": self.curve.p,
            "d": self.ext.rep.d,
            "curve": self.curve.to_json(),
            "alpha": [self.alpha.m, self.alpha.n],
            "beta": [self.beta.m, self.beta.n],
            "a": list(self.a),
            "b": list(self.b) if self.b is not None else None,
            "m0": list(self.m0),
        }


def _endomorphism_pair(t: int, p: int, bound: int = 50):
    """alpha, beta in Z[phi] with beta*alpha = 2 - phi, minimizing the
    larger norm.  alpha = 1 always works, so the search cannot fail
    unless the bound is made silly."""
    target = EndomorphismElement(2, -1, t, p)
    best = None
    for m in range(-bound, bound + 1):
        for nn in range(-bound, bound + 1):
            alpha = EndomorphismElement(m, nn, t, p)
            if alpha.norm() == 0:
                continue
            beta = target.exact_divide(alpha)
            if beta is None:
                continue
            score = (
                max(alpha.norm(), beta.norm()),
                abs(m) + abs(nn),
                -m,
                -nn,
            )
            if best is None or score < best[0]:
                best = (score, alpha, beta)
    if best is None:
        raise SearchFailed(f"no factorization of 2 - phi within |m|,|n| <= {bound}")
    return best[1], best[2]


def ee_setup(p: int, d: int, seed: int = 0, bound: int = 50) -> EESetup:
    """Build the E x E sieve context over F_{p^d}.

    The residue-field construction fixes the curve and the order-d
    translation m0 = t*.  The offsets are then forced: a is the first
    rational point, b = m0 + beta(a), which puts the distinguished fiber
    point on the intersection of the two parametrized curves.
    """
    ext = build_elliptic_residue(p, d, seed=seed)
    curve = ext.curve
    alpha, beta = _endomorphism_pair(curve.trace(), p, bound)

    one = EndomorphismElement(1, 0, curve.trace(), p)
    phi = EndomorphismElement(0, 1, curve.trace(), p)
    if one - beta * alpha != phi - one:
        raise SearchFailed("endomorphism pair does not satisfy the defining relation")

    ops = curve.ops
    a = curve.points()[0]
    beta_a = ec_scalar(ops, curve.a4, beta.m + beta.n, a)  # phi fixes rational points
    b = ec_add(ops, curve.a4, ext.t_star, beta_a)
    m0 = ext.t_star

    ring = ext.ring
    p_int = ext.point()
    frob_l = lambda R: (ring.pow(R[0], p), ring.pow(R[1], p))
    a_l = (ring.embed(a[0]), ring.embed(a[1]))
    q_int = ec_sub(ring, curve.a4, alpha.apply(ring, curve.a4, p_int, frob_l), a_l)
    if q_int is None:
        raise SearchFailed("intersection point degenerates; alpha(B) = a")

    # the defining identity: beta(Q) + b recovers P on the fiber
    b_l = None if b is None else (ring.embed(b[0]), ring.embed(b[1]))
    back = ec_add(ring, curve.a4, beta.apply(ring, curve.a4, q_int, frob_l), b_l)
    if back != p_int:
        raise SearchFailed("intersection identity failed; check the sign of m0")
    return EESetup(ext, alpha, beta, a, b, m0, p_int, q_int)


# ---------------------------------------------------------------------------
# Places on a copy of E, grouped by kernel translation.


class PlaceClasses:
    """x-places of degree <= kappa, merged when translation by a point of
    the distinguished subgroup links them.  The classes are the factor
    base columns of the E x E sieve.

    Orbits are resolved lazily: translating a place by every nonzero
    subgroup element in one pass already yields its whole class, because
    the translated polynomial covers both sheets over the place.  That
    keeps large kappa usable; the full enumeration only happens when a
    count over the whole base is asked for.
    """

    def __init__(self, curve: Curve, kappa: int, t):
        self.curve = curve
        self.kappa = kappa
        self.translates = []
        tk = t
        while tk is not None:
            self.translates.append(tk)
            tk = ec_add(curve.ops, curve.a4, tk, t)
        self._canonical = {}

    def class_of(self, q: Poly) -> Poly:
        """Canonical representative of the translation class of q."""
        if q.degree > self.kappa:
            raise ValueError("place exceeds the smoothness bound")
        got = self._canonical.get(q.coeffs)
        if got is not None:
            return got
        members = {q.coeffs: q}
        for tk in self.translates:
            for out in self._translate_factors(q, tk):
                members[out.coeffs] = out
        rep = min(members.values(), key=poly_sort_key)
        for mem in members.values():
            self._canonical[mem.coeffs] = rep
        return rep

    def _translate_factors(self, q: Poly, tk):
        p = self.curve.p
        if q.degree == 1 and (-q.coeffs[0]) % p == tk[0] % p:
            # the place of +/-tk itself: one sheet translates to the
            # origin, the other to [2]tk
            double = ec_add(self.curve.ops, self.curve.a4, tk, tk)
            if double is None:
                return []
            return [Poly([-double[0], 1], p)]
        h_t = translate_place(self.curve, q, tk)
        _, facs = factor(h_t)
        return [fq for fq, _ in facs if fq.degree <= self.kappa]

    def class_count(self) -> int:
        reps = {self.class_of(q).coeffs for q in monic_irreducibles(self.curve.p, self.kappa)}
        return len(reps)

    def members(self, rep: Poly):
        return [
            q
            for q in monic_irreducibles(self.curve.p, self.kappa)
            if self.class_of(q) == rep
        ]


def translate_place(curve: Curve, q: Poly, t) -> Poly:
    """The degree-2e polynomial whose roots are x(P +/- sheets + t) for P
    running over the points above the x-place q."""
    p = curve.p
    xt, yt = t
    if yt == 0:
        raise ValueError("translation point of order 2 not supported")
    e = q.degree
    ring = QuotientField(q.monic())
    z = ring.x()
    fz = ring.add(
        ring.mul(ring.mul(z, z), z),
        ring.add(ring.mul(ring.embed(curve.a4), z), ring.embed(curve.a6)),
    )
    diff = ring.sub(z, ring.embed(xt))
    if ring.is_zero(diff):
        raise ValueError("place contains the translation point itself")
    dinv2 = ring.pow(ring.inv(diff), 2)
    # x' = (f(z) + yt^2 - 2 yt y)/(z - xt)^2 - z - xt = A - B*y
    A = ring.sub(
        ring.sub(ring.mul(ring.add(fz, ring.embed(yt * yt % p)), dinv2), z),
        ring.embed(xt),
    )
    B = ring.mul(ring.embed(2 * yt % p), dinv2)
    # both sheets: (X - A)^2 - B^2 f(z), a quadratic over the place field
    c0 = ring.sub(ring.mul(A, A), ring.mul(ring.mul(B, B), fz))
    c1 = ring.neg(ring.add(A, A))
    quad = [c0, c1, ring.one()]
    # product over the Galois conjugates lands in F_p[X]
    prod = [ring.one()]
    cur = quad
    for _ in range(e):
        nxt = [ring.zero()] * (len(prod) + 2)
        for i, a_ in enumerate(prod):
            for j, b_ in enumerate(cur):
                nxt[i + j] = ring.add(nxt[i + j], ring.mul(a_, b_))
        prod = nxt
        cur = [ring.pow(cc, p) for cc in cur]
    coeffs = []
    for cc in prod:
        if cc.degree > 0:
            raise ValueError("translated place did not descend to F_p")
        coeffs.append(cc.constant_value())
    return Poly(coeffs, p).monic()


def build_place_classes(curve: Curve, kappa: int, t) -> PlaceClasses:
    return PlaceClasses(curve, kappa, t)


# ---------------------------------------------------------------------------
# Restriction of surface functions to the two parametrized curves.


class EERestriction:
    """Precomputed symbolic data for restricting sections to the curves
    A = {(P, alpha(P) - a)} and B = {(beta(Q) + b, Q)}."""

    def __init__(self, setup: EESetup, lin: LinearSystemEE, kappa: int):
        self.setup = setup
        self.lin = lin
        self.kappa = kappa
        curve = setup.curve
        p = curve.p
        field = PrimeField(p)
        f_poly = field.poly([curve.a6, curve.a4, 0, 1])
        self.ffops = FuncFieldOps(p, f_poly)
        ff = self.ffops
        generic = (ff.x(), ff.y())
        frob = lambda R: (ff.pow(R[0], p), ff.pow(R[1], p))

        a_pt = (ff.embed(setup.a[0]), ff.embed(setup.a[1]))
        image_a = setup.alpha.apply(ff, curve.a4, generic, frob)
        self.curve_a = (generic, ec_sub(ff, curve.a4, image_a, a_pt))

        b_pt = None
        if setup.b is not None:
            b_pt = (ff.embed(setup.b[0]), ff.embed(setup.b[1]))
        image_b = setup.beta.apply(ff, curve.a4, generic, frob)
        self.curve_b = (ec_add(ff, curve.a4, image_b, b_pt), generic)

        self.prods_a = self._basis_products(*self.curve_a)
        self.prods_b = self._basis_products(*self.curve_b)
        self.classes = build_place_classes(curve, kappa, setup.m0)

    def _basis_products(self, P, Q):
        ff = self.ffops
        out = []
        for (i1, j1) in self.lin.basis1:
            b1 = ff.mul(ff.pow(P[0], i1), ff.pow(P[1], j1))
            for (i2, j2) in self.lin.basis2:
                b2 = ff.mul(ff.pow(Q[0], i2), ff.pow(Q[1], j2))
                out.append(ff.mul(b1, b2))
        return out

    def restrict(self, coeffs, side: str):
        """The function-field element of one side's restriction."""
        ff = self.ffops
        prods = self.prods_a if side == "a" else self.prods_b
        acc = ff.zero()
        for c, prod in zip(coeffs, prods):
            if c:
                acc = ff.add(acc, ff.mul(ff.embed(c), prod))
        return acc

    def value_at_intersection(self, elem, side: str):
        ring = self.setup.ring
        if side == "a":
            xv, yv = self.setup.p_int
        else:
            xv, yv = self.setup.q_int
        return self.ffops.evaluate(ring, elem, xv, yv)


class EERelation:
    """One smooth section: both restrictions factored over place classes,
    joined by the evaluation witness at the intersection point."""

    __slots__ = ("coeffs", "side_a", "side_b", "witness")

    def __init__(self, coeffs, side_a, side_b, witness):
        self.coeffs = tuple(coeffs)
        self.side_a = side_a
        self.side_b = side_b
        self.witness = witness

    def __repr__(self):
        return (
            f"EERelation(|a|={len(self.side_a['classes'])}, "
            f"|b|={len(self.side_b['classes'])})"
        )

    def to_json(self):
        def side(s):
            return {
                "unit": s["unit"],
                "num_factors": [[q.to_list(), e] for q, e in s["num"]],
                "den_factors": [[q.to_list(), e] for q, e in s["den"]],
                "classes": sorted(
                    [rep.to_list(), e] for rep, e in s["classes"].items()
                ),
            }

        return {
            "coeffs": list(self.coeffs),
            "side_a": side(self.side_a),
            "side_b": side(self.side_b),
            "witness": self.witness.to_list(),
        }


def _factor_side(norm: RationalFunction, kappa: int, classes: PlaceClasses):
    unit_n, facs_n = factor(norm.num)
    unit_d, facs_d = factor(norm.den)
    if any(q.degree > kappa for q, _ in facs_n):
        return None
    if any(q.degree > kappa for q, _ in facs_d):
        return None
    by_class = {}
    for q, e in facs_n:
        rep = classes.class_of(q)
        by_class[rep] = by_class.get(rep, 0) + e
    for q, e in facs_d:
        rep = classes.class_of(q)
        by_class[rep] = by_class.get(rep, 0) - e
    unit = unit_n * pow(unit_d, -1, norm.num.p) % norm.num.p
    return {
        "unit": unit,
        "num": facs_n,
        "den": facs_d,
        "classes": {rep: e for rep, e in by_class.items() if e},
    }


def ee_relation(restr: EERestriction, coeffs, kappa: int):
    """Build and verify the relation carried by one section, or None."""
    ff = restr.ffops
    ring = restr.setup.ring
    elem_a = restr.restrict(coeffs, "a")
    elem_b = restr.restrict(coeffs, "b")
    if ff.is_zero(elem_a) or ff.is_zero(elem_b):
        return None
    side_a = _factor_side(ff.norm(elem_a), kappa, restr.classes)
    side_b = _factor_side(ff.norm(elem_b), kappa, restr.classes)
    if side_a is None or side_b is None:
        return None
    try:
        va = restr.value_at_intersection(elem_a, "a")
        vb = restr.value_at_intersection(elem_b, "b")
    except NonInvertible:
        return None  # a pole sits exactly on the intersection point
    if ring.is_zero(va) or ring.is_zero(vb):
        return None  # the section vanishes at the distinguished point
    if va != vb:
        raise ValueError("restrictions disagree at the intersection point")
    return EERelation(coeffs, side_a, side_b, va)


def verify_ee_relation(restr: EERestriction, rel: EERelation) -> bool:
    """Independent re-derivation of everything the relation claims."""
    ff = restr.ffops
    field = PrimeField(restr.setup.curve.p)
    for side_tag, stored in (("a", rel.side_a), ("b", rel.side_b)):
        elem = restr.restrict(rel.coeffs, side_tag)
        norm = ff.norm(elem)
        num = field.poly([stored["unit"]])
        for q, e in stored["num"]:
            for _ in range(e):
                num = num * q
        den = field.poly([1])
        for q, e in stored["den"]:
            for _ in range(e):
                den = den * q
        if RationalFunction(num, den) != norm:
            return False
        by_class = {}
        for q, e in stored["num"]:
            rep = restr.classes.class_of(q)
            by_class[rep] = by_class.get(rep, 0) + e
        for q, e in stored["den"]:
            rep = restr.classes.class_of(q)
            by_class[rep] = by_class.get(rep, 0) - e
        if {rep: e for rep, e in by_class.items() if e} != stored["classes"]:
            return False
    va = restr.value_at_intersection(restr.restrict(rel.coeffs, "a"), "a")
    vb = restr.value_at_intersection(restr.restrict(rel.coeffs, "b"), "b")
    return va == vb == rel.witness and not restr.setup.ring.is_zero(va)


def ee_sieve(
    setup: EESetup,
    cls: NSClassEE,
    kappa: int,
    budget: int,
    seed: int = 0,
    target: int = None,
    restriction: EERestriction = None,
):
    """Draw sections from the linear system of cls and keep the ones whose
    two restrictions are both kappa-smooth.  Linear-equivalence variation
    comes from the random coefficient draws over the kernel basis; trials
    are keyed by (seed, index) for order-independent merging."""
    if restriction is None:
        lin = linear_system_ee(setup, cls)
        restriction = EERestriction(setup, lin, kappa)
    lin = restriction.lin
    if not lin.kernel:
        raise InsufficientPoints("the linear system has no sections")
    relations = []
    seen = set()
    for trial in range(budget):
        rng = random.Random(_mix(seed, trial))
        weights = [rng.randrange(setup.curve.p) for _ in lin.kernel]
        if not any(weights):
            continue
        coeffs = [0] * len(lin.kernel[0])
        for w, vec in zip(weights, lin.kernel):
            if w:
                for i, v in enumerate(vec):
                    coeffs[i] = (coeffs[i] + w * v) % setup.curve.p
        key = tuple(coeffs)
        if key in seen or not any(coeffs):
            continue
        seen.add(key)
        rel = ee_relation(restriction, coeffs, kappa)
        if rel is not None:
            relations.append(rel)
            if target is not None and len(relations) >= target:
                return relations
    if target is not None and len(relations) < target:
        raise SieveTimeout(
            f"{len(relations)}/{target} relations in {budget} trials", relations
        )
    return relations
