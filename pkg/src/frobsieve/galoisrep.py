"""Explicit finite field models carrying a structural Frobenius action.

A representation packages F_{p^d} = F_p[X]/(A) together with a closed form
for x |-> x^p on the residue class of X.  Three families are built here:

* Kummer: A = X^d - r with r a primitive root mod p and d | p-1; Frobenius
  scales x by a root of unity.
* Artin-Schreier: A = X^p - X - a with d = p; Frobenius translates x by a.
* Norm-one torus: d | p+1; the residue x is a coordinate on a rank-one
  torus and Frobenius acts by a degree-one rational map (a homography).

The elliptic-curve family reuses the same Representation container but is
constructed in the elliptic module, which stores precomputed power images.

Knowing Frobenius structurally lets p-th powering of polynomials in x be
read off combinatorially, which is what the orbit machinery below exploits:
the monic irreducibles of small degree fall into short Frobenius orbits,
and each orbit contributes one unknown (plus bookkeeping) instead of one
unknown per polynomial.
"""

import random

from .errors import (
    DegreeNotCompatible,
    InconsistentFrobenius,
    InvalidPoint,
    NotFound,
)
from .ffcore import (
    Poly,
    PrimeField,
    QuotientField,
    factorize_int,
    is_irreducible,
    kernel_basis,
    poly_pow_mod,
    primitive_root,
)

KUMMER = "kummer"
ARTIN_SCHREIER = "artin-schreier"
TORUS = "torus"
ELLIPTIC = "elliptic-residue"


# ---------------------------------------------------------------------------
# Frobenius action on the residue class of X, in closed form.


class AffineFrobenius:
    """x^p = u*x + v."""

    variant = "affine"

    def __init__(self, u: int, v: int, p: int):
        self.u = u % p
        self.v = v % p
        self.p = p

    def __repr__(self):
        return f"AffineFrobenius(u={self.u}, v={self.v})"

    def image(self, k: int, ring: QuotientField) -> Poly:
        # k-fold iterate: u^k x + v(u^{k-1} + ... + 1)
        p = self.p
        uk = pow(self.u, k, p)
        if self.u == 1:
            shift = k * self.v % p
        else:
            shift = self.v * (uk - 1) % p * pow(self.u - 1, -1, p) % p
        return ring.el([shift, uk])

    def to_json(self):
        return {"variant": self.variant, "u": self.u, "v": self.v}


class HomographyFrobenius:
    """x^p = (tau*x + D) / (x + tau)."""

    variant = "homography"

    def __init__(self, tau: int, D: int, p: int):
        self.tau = tau % p
        self.D = D % p
        self.p = p

    def __repr__(self):
        return f"HomographyFrobenius(tau={self.tau}, D={self.D})"

    def matrix_power(self, k: int):
        p = self.p
        a, b, c, d = 1, 0, 0, 1
        ma, mb, mc, md = self.tau, self.D, 1, self.tau
        while k:
            if k & 1:
                a, b, c, d = (
                    (a * ma + b * mc) % p,
                    (a * mb + b * md) % p,
                    (c * ma + d * mc) % p,
                    (c * mb + d * md) % p,
                )
            ma, mb, mc, md = (
                (ma * ma + mb * mc) % p,
                (ma * mb + mb * md) % p,
                (mc * ma + md * mc) % p,
                (mc * mb + md * md) % p,
            )
            k >>= 1
        return a, b, c, d

    def image(self, k: int, ring: QuotientField) -> Poly:
        a, b, c, d = self.matrix_power(k)
        num = ring.el([b, a])
        den = ring.el([d, c])
        return ring.mul(num, ring.inv(den))

    def to_json(self):
        return {"variant": self.variant, "tau": self.tau, "D": self.D}


class CurveFrobenius:
    """Precomputed images x^{p^k} for k = 0..d-1, supplied by the builder."""

    variant = "curve-translation"

    def __init__(self, images):
        self.images = list(images)

    def __repr__(self):
        return f"CurveFrobenius(d={len(self.images)})"

    def image(self, k: int, ring: QuotientField) -> Poly:
        return self.images[k % len(self.images)]

    def to_json(self):
        return {
            "variant": self.variant,
            "images": [img.to_list() for img in self.images],
        }


class Representation:
    """F_{p^d} = F_p[X]/(A) with a structural Frobenius on the class of X."""

    def __init__(self, kind, field: PrimeField, d: int, A: Poly, frobenius, params=None):
        self.kind = kind
        self.field = field
        self.p = field.p
        self.d = d
        self.A = A
        self.frobenius = frobenius
        self.params = dict(params or {})
        self.ring = QuotientField(A)
        self.ext = None  # elliptic builder attaches its curve data here
        self._image_cache = {}

    def __repr__(self):
        return f"Representation({self.kind}, p={self.p}, d={self.d})"

    def order(self) -> int:
        """Order of the multiplicative group."""
        return self.p ** self.d - 1

    def frobenius_image(self, k: int) -> Poly:
        """The residue x^{p^k}, computed from structure rather than powering."""
        k %= self.d
        img = self._image_cache.get(k)
        if img is None:
            img = self.frobenius.image(k, self.ring)
            self._image_cache[k] = img
        return img

    def to_json(self):
        return {
            "kind": self.kind,
            "p": self.p,
            "d": self.d,
            "A": self.A.to_list(),
            "frobenius": self.frobenius.to_json(),
            "params": {k: v for k, v in self.params.items()},
        }


def rep_from_json(data) -> Representation:
    p = int(data["p"])
    field = PrimeField(p)
    A = field.poly([int(c) for c in data["A"]])
    fr = data["frobenius"]
    variant = fr["variant"]
    if variant == "affine":
        frob = AffineFrobenius(int(fr["u"]), int(fr["v"]), p)
    elif variant == "homography":
        frob = HomographyFrobenius(int(fr["tau"]), int(fr["D"]), p)
    elif variant == "curve-translation":
        ring = QuotientField(A)
        frob = CurveFrobenius([ring.el([int(c) for c in img]) for img in fr["images"]])
    else:
        raise ValueError(f"unknown frobenius variant {variant!r}")
    params = {k: (int(v) if isinstance(v, str) and v.lstrip("-").isdigit() else v)
              for k, v in data.get("params", {}).items()}
    rep = Representation(data["kind"], field, int(data["d"]), A, frob, params)
    verify_representation(rep)
    return rep


def verify_representation(rep: Representation):
    """Check x^p really equals the claimed structural image.

    Cheap insurance against a corrupted or hand-edited modulus: one modular
    exponentiation versus the closed form.
    """
    actual = poly_pow_mod(rep.ring.x(), rep.p, rep.A)
    claimed = rep.frobenius_image(1)
    if actual != claimed:
        raise InconsistentFrobenius(
            f"x^p mod A is {actual!r} but the structural action gives {claimed!r}"
        )


def apply_frobenius(rep: Representation, z: Poly, k: int = 1) -> Poly:
    """z^{p^k} for a residue element z, via the structural image of x.

    Evaluates the coefficient polynomial of z at x^{p^k}; coefficients are
    fixed by Frobenius, so this is exactly the p^k-power map.
    """
    img = rep.frobenius_image(k)
    ring = rep.ring
    acc = ring.zero()
    for c in reversed(z.coeffs):
        acc = ring.mul(acc, img) + c
    return acc


# ---------------------------------------------------------------------------
# Rank-one torus: projective points [U : V] with group law inherited from
# the norm-one subgroup of F_p(sqrt(D))^*, D a non-square.  The point set
# is all of P^1(F_p) (p + 1 points) and the group is cyclic.

NEUTRAL = (1, 0)


def torus_check(P, D: int, p: int):
    U, V = P
    if U % p == 0 and V % p == 0:
        raise InvalidPoint("[0 : 0] is not projective")
    # U^2 - D V^2 = 0 would need D to be a square
    if (U * U - D * V * V) % p == 0:
        raise InvalidPoint(f"[{U} : {V}] lies on the degenerate conic")


def torus_normalize(P, p: int):
    U, V = P[0] % p, P[1] % p
    if V != 0:
        s = pow(V, -1, p)
        return (U * s % p, 1)
    return (1, 0)


def torus_eq(P, Q, p: int) -> bool:
    # cross-multiplication avoids inversions
    return (P[0] * Q[1] - Q[0] * P[1]) % p == 0


def torus_is_neutral(P, p: int) -> bool:
    return P[1] % p == 0


def torus_add(P, Q, D: int, p: int):
    U1, V1 = P
    U2, V2 = Q
    return ((U1 * U2 + D * V1 * V2) % p, (U1 * V2 + U2 * V1) % p)


def torus_neg(P, p: int):
    return ((-P[0]) % p, P[1] % p)


def torus_scalar(k: int, P, D: int, p: int):
    if k < 0:
        return torus_scalar(-k, torus_neg(P, p), D, p)
    R = NEUTRAL
    Q = P
    while k:
        if k & 1:
            R = torus_add(R, Q, D, p)
        Q = torus_add(Q, Q, D, p)
        k >>= 1
    return torus_normalize(R, p)


def torus_u(P, p: int):
    """Affine coordinate U/V, or None for the neutral point."""
    if torus_is_neutral(P, p):
        return None
    return P[0] * pow(P[1], -1, p) % p


def torus_order(P, D: int, p: int, group_factors) -> int:
    n = p + 1
    for ell in group_factors:
        while n % ell == 0 and torus_is_neutral(torus_scalar(n // ell, P, D, p), p):
            n //= ell
    return n


# ---------------------------------------------------------------------------
# Builders.


def build_kummer(p: int, d: int, r=None, seed: int = 0) -> Representation:
    """F_{p^d} as F_p[X]/(X^d - r) with r a primitive root mod p.

    Needs d | p - 1 so that x^p = zeta * x for the root of unity
    zeta = r^((p-1)/d).
    """
    field = PrimeField(p, seed=seed)
    if d < 1 or (p - 1) % d != 0:
        raise DegreeNotCompatible(f"need d | p - 1, got d={d}, p={p}")
    if r is None:
        r = primitive_root(p)
    else:
        r %= p
        facs = factorize_int(p - 1)
        if r == 0 or any(pow(r, (p - 1) // ell, p) == 1 for ell in facs):
            raise ValueError(f"{r} is not a primitive root mod {p}")
    zeta = pow(r, (p - 1) // d, p)
    A = field.poly([-r] + [0] * (d - 1) + [1])
    if not is_irreducible(A):
        raise InconsistentFrobenius(f"X^{d} - {r} is not irreducible mod {p}")
    rep = Representation(
        KUMMER, field, d, A, AffineFrobenius(zeta, 0, p), {"r": r, "zeta": zeta}
    )
    verify_representation(rep)
    return rep


def build_artin_schreier(p: int, a: int = 1, seed: int = 0) -> Representation:
    """F_{p^p} as F_p[X]/(X^p - X - a), with x^p = x + a."""
    field = PrimeField(p, seed=seed)
    a %= p
    if a == 0:
        raise ValueError("a must be nonzero mod p")
    d = p
    A = field.poly([-a, -1] + [0] * (p - 2) + [1])
    if not is_irreducible(A):
        raise InconsistentFrobenius(f"X^{p} - X - {a} is not irreducible mod {p}")
    rep = Representation(
        ARTIN_SCHREIER, field, d, A, AffineFrobenius(1, a, p), {"a": a}
    )
    verify_representation(rep)
    return rep


def _poly_from_torus_generator(field: PrimeField, d: int, u_r: int, D: int) -> Poly:
    """Minimal polynomial of a coordinate generator: the [d]-multiplication
    numerator in the U-coordinate, expanded binomially from (u_r + sqrt(D))^d."""
    p = field.p
    from math import comb

    even = [0] * (d + 1)
    odd = [0] * (d + 1)
    for k in range(0, d + 1, 2):
        even[d - k] = comb(d, k) * pow(D, k // 2, p) % p
    for k in range(1, d + 1, 2):
        odd[d - k] = comb(d, k) * pow(D, k // 2, p) % p
    return field.poly([(even[i] - u_r * odd[i]) % p for i in range(d + 1)])


def build_torus(p: int, d: int, u_r=None, seed: int = 0) -> Representation:
    """F_{p^d} modeled on the rank-one torus of order p + 1, for d | p + 1.

    The residue x is the affine coordinate of a point t of exact order d,
    obtained as [-(p+1)/d] times a base point r on the torus.  Frobenius
    becomes the homography x -> (tau*x + D)/(x + tau) with tau = u(t).

    When u_r is omitted the base point is the first [u : 1] generating the
    full group; an explicit u_r is accepted whenever its multiple t still
    has exact order d, which is the only property the construction uses.
    """
    field = PrimeField(p, seed=seed)
    if p == 2:
        raise DegreeNotCompatible("torus model needs an odd prime")
    if d < 2 or (p + 1) % d != 0:
        raise DegreeNotCompatible(f"need d | p + 1 and d >= 2, got d={d}, p={p}")

    D = next(
        c for c in range(2, p) if pow(c, (p - 1) // 2, p) == p - 1
    )
    group_factors = factorize_int(p + 1)
    d_factors = factorize_int(d)

    if u_r is None:
        for u in range(p):
            cand = (u, 1)
            if torus_order(cand, D, p, group_factors) == p + 1:
                u_r = u
                break
        else:
            raise NotFound(f"no full-order torus point over F_{p}")
    else:
        u_r %= p
        torus_check((u_r, 1), D, p)
    base = (u_r, 1)

    m = (p + 1) // d
    t = torus_scalar(-m, base, D, p)
    has_exact_order_d = torus_is_neutral(torus_scalar(d, t, D, p), p) and not any(
        torus_is_neutral(torus_scalar(d // ell, t, D, p), p) for ell in d_factors
    )
    if not has_exact_order_d:
        raise ValueError(
            f"u_r={u_r} gives a translation point of order "
            f"{torus_order(t, D, p, group_factors)}, need exact order {d}"
        )
    tau = torus_u(t, p)

    A = _poly_from_torus_generator(field, d, u_r, D)
    if not is_irreducible(A):
        raise InconsistentFrobenius(
            f"torus minimal polynomial for u_r={u_r} failed irreducibility"
        )

    # The orientation of sqrt(D) inside the field is not observable from
    # u_r alone, so the translation can come out as +-t; try both signs.
    rep = None
    for sign, tt in (("-", t), ("+", torus_neg(t, p))):
        tau_s = torus_u(tt, p)
        cand = Representation(
            TORUS,
            field,
            d,
            A,
            HomographyFrobenius(tau_s, D, p),
            {"D": D, "u_r": u_r, "m": m, "tau": tau_s, "sign": sign},
        )
        try:
            verify_representation(cand)
        except InconsistentFrobenius:
            continue
        rep = cand
        break
    if rep is None:
        raise InconsistentFrobenius(
            f"neither sign of the order-{d} translation matches x^p for u_r={u_r}"
        )
    return rep


# ---------------------------------------------------------------------------
# Frobenius orbits of monic irreducible polynomials in the residue x.
#
# For a monic irreducible q of degree n, q(x)^p factors through a single
# "successor" polynomial sigma(q):
#
#   kummer          q(x)^p = s * sigma(q)(x)              sigma(q) = monic q(zeta X)
#   artin-schreier  q(x)^p =     sigma(q)(x)              sigma(q) = q(X + a)
#   torus           q(x)^p = s * sigma(q)(x) / (x+tau)^n  sigma(q) = monic numerator
#
# with s in F_p^*.  Iterating walks a finite orbit; all logarithms inside an
# orbit reduce to the anchor's plus explicit scalar and (x+tau) weights.
# On the torus the orbit through X + tau is special: it ends at X - tau,
# whose image degenerates to a constant (the successor lives at infinity).


class OrbitMember:
    """q_j = anchor^{p^j} * scalar^{-1} * (x+tau)^{ker_weight}, as elements."""

    __slots__ = ("poly", "shift", "scalar", "ker_weight")

    def __init__(self, poly: Poly, shift: int, scalar: int, ker_weight: int):
        self.poly = poly
        self.shift = shift
        self.scalar = scalar
        self.ker_weight = ker_weight

    def __repr__(self):
        return f"OrbitMember({self.poly!r}, shift={self.shift})"


class Orbit:
    """One Frobenius orbit with enough bookkeeping to recover every member's
    logarithm from the anchor's.

    closure_* record the relation obtained by walking once around:
      regular orbit:  anchor^{p^size - 1} * (x+tau)^{closure_ker_weight}
                      = closure_scalar
      kernel orbit:   (x+tau)^{closure_exponent} = closure_scalar
    Scalar values are kept as field elements; consumers translate them into
    exponents of whatever base-field generator they use.
    """

    def __init__(self, rep, members, is_kernel, closure_scalar,
                 closure_ker_weight=0, closure_exponent=None):
        self.rep = rep
        self.members = members
        self.is_kernel = is_kernel
        self.closure_scalar = closure_scalar
        self.closure_ker_weight = closure_ker_weight
        self.closure_exponent = closure_exponent

    @property
    def anchor(self) -> Poly:
        return self.members[0].poly

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def full_size(self) -> int:
        """Orbit size counting the place at infinity for the kernel orbit."""
        return len(self.members) + (1 if self.is_kernel else 0)

    def polys(self):
        return [mem.poly for mem in self.members]

    def __repr__(self):
        tag = "kernel " if self.is_kernel else ""
        return f"Orbit({tag}anchor={self.anchor!r}, size={self.size})"


def frobenius_step(rep: Representation, q: Poly):
    """One step of the orbit walk: (sigma(q), scalar) with
    q(x)^p = scalar * sigma(q)(x) * (x+tau)^{-deg q} (torus)
    q(x)^p = scalar * sigma(q)(x)                    (otherwise).

    On the torus, q = X - tau degenerates: the numerator drops degree and
    the function returns (None, constant) with q(x)^p = constant/(x+tau).
    """
    n = q.degree
    if rep.kind == KUMMER:
        zeta = rep.params["zeta"]
        img = q.scale_arg(zeta)
        s = img.lc()
        return img.monic(), s
    if rep.kind == ARTIN_SCHREIER:
        return q.shift_arg(rep.params["a"]), 1
    if rep.kind == TORUS:
        tau = rep.params["tau"]
        D = rep.params["D"]
        fld = rep.field
        num = fld.poly([D, tau])       # tau X + D
        den = fld.poly([tau, 1])       # X + tau
        acc = fld.poly([])
        num_pow = fld.poly([1])
        den_pows = [fld.poly([1])]
        for _ in range(n):
            den_pows.append(den_pows[-1] * den)
        for i, c in enumerate(q.coeffs):
            if c:
                acc = acc + num_pow * den_pows[n - i] * c
            if i < n:
                num_pow = num_pow * num
        if acc.degree < n:
            # only X - tau does this; the successor is the infinite place
            return None, acc.constant_value()
        s = acc.lc()
        return acc.monic(), s
    raise ValueError(f"no orbit action for kind {rep.kind!r}")


def frobenius_orbit(rep: Representation, q: Poly) -> Orbit:
    """The full Frobenius orbit through the monic irreducible q.

    Kummer and Artin-Schreier orbits cycle back to the anchor.  Torus
    orbits either cycle or run into the degenerate step, in which case the
    orbit is the kernel orbit and is re-anchored at X + tau so that its
    bookkeeping is uniform.
    """
    q = q.monic()
    p = rep.p

    if rep.kind == ELLIPTIC:
        # no usable successor structure on plain x-polynomials; every
        # polynomial is its own orbit with trivial closure
        member = OrbitMember(q, 0, 1, 0)
        return Orbit(rep, [member], False, 1)

    if rep.kind == TORUS:
        tau = rep.params["tau"]
        ker_anchor = rep.field.poly([tau, 1])
        # detect kernel membership by walking to degeneracy or back to q
        probe = q
        is_kernel = False
        for _ in range(rep.d + 1):
            nxt, _s = frobenius_step(rep, probe)
            if nxt is None:
                is_kernel = True
                break
            if nxt == q:
                break
            probe = nxt
        if is_kernel:
            members = []
            cur, scalar, weight, shift = ker_anchor, 1, 0, 0
            while True:
                members.append(OrbitMember(cur, shift, scalar, weight))
                nxt, s = frobenius_step(rep, cur)
                # scalars live in F_p, so the p-th power of the running
                # product is the product itself
                scalar = scalar * s % p
                weight = p * weight + cur.degree
                shift += 1
                if nxt is None:
                    break
                cur = nxt
            # walking off the end: (x+tau)^{p^{shift-1} + W} = scalar as
            # elements, once the final degenerate constant is folded in;
            # the left exponent collects into closure_exponent below.
            last = members[-1]
            exponent = p * (p ** last.shift + last.ker_weight) + 1
            return Orbit(
                rep,
                members,
                True,
                scalar,
                closure_exponent=exponent,
            )

    track_weight = rep.kind == TORUS
    members = []
    cur, scalar, weight, shift = q, 1, 0, 0
    while True:
        members.append(OrbitMember(cur, shift, scalar, weight))
        nxt, s = frobenius_step(rep, cur)
        scalar = scalar * s % p
        if track_weight:
            weight = p * weight + cur.degree
        shift += 1
        if nxt == q:
            break
        cur = nxt
        if shift > rep.d + 1:
            raise InconsistentFrobenius(
                f"orbit of {q!r} did not close within {rep.d + 1} steps"
            )
    return Orbit(rep, members, False, scalar, closure_ker_weight=weight)


def orbit_partition(rep: Representation, polys) -> list:
    """Partition an iterable of monic irreducibles into Frobenius orbits.

    Members outside the input list (possible for the kernel orbit, whose
    anchor is forced to X + tau) are still carried by their orbit.
    """
    seen = set()
    orbits = []
    for q in polys:
        q = q.monic()
        if q.coeffs in seen:
            continue
        orb = frobenius_orbit(rep, q)
        for mem in orb.members:
            seen.add(mem.poly.coeffs)
        orbits.append(orb)
    return orbits


# ---------------------------------------------------------------------------
# Degree filtration.


def degree(rep: Representation, z: Poly) -> int:
    """Filtration degree of a nonzero residue element.

    For the polynomial models this is plain polynomial degree.  On the
    torus, x is a coordinate of P^1 rather than an affine line, and the
    right notion is the smallest k such that z = a(x)/b(x) with
    deg a, deg b <= k; constants get 0 and x itself gets 1.
    """
    z = rep.ring.el(z)
    if z.is_zero():
        raise ValueError("degree of the zero element is undefined")
    if rep.kind == TORUS:
        return _torus_degree(rep, z)
    if rep.kind == ELLIPTIC:
        from .elliptic import function_degree

        if rep.ext is None:
            raise ValueError("elliptic representation lost its curve data")
        return function_degree(rep.ext, z)
    return z.degree if z.degree >= 0 else 0


def _torus_degree(rep: Representation, z: Poly) -> int:
    p, d = rep.p, rep.d
    ring = rep.ring
    x_pows = [ring.one()]
    for _ in range(d):
        x_pows.append(ring.mul(x_pows[-1], ring.x()))
    zx_pows = [ring.mul(z, xp) for xp in x_pows]
    max_k = (d - 2 + 1) // 2 + 1  # 2k + 2 > d guarantees a kernel by then
    for k in range(0, max_k + 1):
        ncols = 2 * (k + 1)
        rows = []
        for i in range(d):
            row = [x_pows[j].coeffs[i] if i < len(x_pows[j].coeffs) else 0
                   for j in range(k + 1)]
            row += [(-(zx_pows[j].coeffs[i] if i < len(zx_pows[j].coeffs) else 0)) % p
                    for j in range(k + 1)]
            rows.append(row)
        if kernel_basis(rows, ncols, p):
            return k
    raise InconsistentFrobenius("torus degree sweep failed to terminate")
