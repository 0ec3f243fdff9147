"""Exact arithmetic over small prime fields.

Polynomials are coefficient lists, low degree first, with coefficients
reduced into [0, p).  Everything is plain integer arithmetic; inputs are
desk scale (p fits in 64 bits, degrees in the tens), so the naive
algorithms here are the right tool.
"""

from __future__ import annotations

import random

from .errors import NonInvertible

# Degree of the zero polynomial.  A distinct sentinel rather than -1 so
# that degree bookkeeping (sub-additivity checks, orbit walks) cannot
# silently treat the zero polynomial as a unit.
NEG_INF = float("-inf")

_TRIAL_BOUND = 10 ** 6


def is_prime(n: int) -> bool:
    """Trial-division primality. Intended for desk-scale moduli."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _miller_rabin(n: int) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize_int(n: int) -> dict[int, int]:
    """Factor a positive integer: trial division to 10^6, Pollard rho after.

    Returns {prime: multiplicity}.  The rho stage only triggers for
    cofactors beyond 10^12, which desk-scale group orders never reach.
    """
    if n < 1:
        raise ValueError("factorize_int wants a positive integer")
    out: dict[int, int] = {}
    for f in [2, 3, 5]:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
    f = 7
    wheel = [4, 2, 4, 2, 4, 6, 2, 6]
    i = 0
    while f <= _TRIAL_BOUND and f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += wheel[i]
        i = (i + 1) % 8
    if n == 1:
        return out
    if n < _TRIAL_BOUND ** 2 or _miller_rabin(n):
        out[n] = out.get(n, 0) + 1
        return out
    for q, m in _rho_factor(n).items():
        out[q] = out.get(q, 0) + m
    return out


def _rho_factor(n: int) -> dict[int, int]:
    if _miller_rabin(n):
        return {n: 1}
    c = 1
    while True:
        d = _rho_once(n, c)
        if d not in (0, n):
            break
        c += 1
    left = _rho_factor(d)
    right = _rho_factor(n // d)
    for q, m in right.items():
        left[q] = left.get(q, 0) + m
    return left


def _rho_once(n: int, c: int) -> int:
    # Brent's cycle finding.
    y, r, q, d = 2, 1, 1, 1
    g = lambda v: (v * v + c) % n
    x = ys = y
    while d == 1:
        x = y
        for _ in range(r):
            y = g(y)
        k = 0
        while k < r and d == 1:
            ys = y
            for _ in range(min(128, r - k)):
                y = g(y)
                q = q * abs(x - y) % n
            d = _gcd(q, n)
            k += 128
        r *= 2
    if d == n:
        d = 1
        while d == 1:
            ys = g(ys)
            d = _gcd(abs(x - ys), n)
    return d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def crt(residues: list[int], moduli: list[int]) -> int:
    """Combine residues over pairwise coprime moduli."""
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        # solve x' = x mod m, x' = r mod q
        t = ((r - x) * pow(m, -1, q)) % q
        x += m * t
        m *= q
    return x % m


class PrimeField:
    """Context for F_p: the modulus plus the seed randomized routines use."""

    def __init__(self, p: int, seed: int = 0):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.seed = seed

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and self.p == other.p

    def poly(self, coeffs) -> "Poly":
        return Poly(coeffs, self.p)

    def x(self) -> "Poly":
        return Poly([0, 1], self.p)

    def random_poly(self, rng: random.Random, degree: int, monic: bool = False) -> "Poly":
        coeffs = [rng.randrange(self.p) for _ in range(degree + 1)]
        if monic:
            coeffs[-1] = 1
        elif degree >= 0:
            while coeffs[-1] == 0:
                coeffs[-1] = rng.randrange(self.p)
        return Poly(coeffs, self.p)


class Poly:
    """Dense univariate polynomial over F_p, low degree first."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p: int):
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.p = p

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def constant_value(self) -> int:
        """The value of a constant polynomial (0 for the zero polynomial)."""
        if len(self.coeffs) > 1:
            raise ValueError("not a constant")
        return self.coeffs[0] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.p))

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return "Poly(" + " + ".join(terms) + f" mod {self.p})"

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        return Poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], self.p)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.p)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly([c * other for c in self.coeffs], self.p)
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Poly([], self.p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        p = self.p
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % p
        return Poly(out, p)

    def __rmul__(self, other):
        return self.__mul__(other)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other
        if isinstance(other, int):
            return Poly([other], self.p)
        raise TypeError(f"cannot combine Poly with {type(other)}")

    def __divmod__(self, other):
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly([], p), self
        quo = [0] * (dq + 1)
        inv_lc = pow(other.coeffs[-1], p - 2, p)
        for i in range(dq, -1, -1):
            c = rem[i + len(other.coeffs) - 1]
            if c == 0:
                continue
            q = c * inv_lc % p
            quo[i] = q
            for j, b in enumerate(other.coeffs):
                rem[i + j] = (rem[i + j] - q * b) % p
        return Poly(quo, p), Poly(rem, p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        """Evaluate at a field element by Horner's rule."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def monic(self) -> "Poly":
        if not self.coeffs:
            raise ValueError("zero polynomial has no monic form")
        if self.coeffs[-1] == 1:
            return self
        inv = pow(self.coeffs[-1], self.p - 2, self.p)
        return Poly([c * inv for c in self.coeffs], self.p)

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.p)

    def compose(self, inner: "Poly") -> "Poly":
        """self(inner(X)), by Horner over the polynomial ring."""
        acc = Poly([], self.p)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def shift_arg(self, a: int) -> "Poly":
        """self(X + a)."""
        return self.compose(Poly([a, 1], self.p))

    def scale_arg(self, a: int) -> "Poly":
        """self(a*X)."""
        mult = 1
        out = []
        for c in self.coeffs:
            out.append(c * mult)
            mult = mult * a % self.p
        return Poly(out, self.p)

    def pth_root(self) -> "Poly":
        """For f = g(X^p), recover g.  Coefficients are F_p-fixed under x -> x^p."""
        p = self.p
        out = []
        for i, c in enumerate(self.coeffs):
            if i % p == 0:
                out.append(c)
            elif c != 0:
                raise ValueError("polynomial is not a p-th power")
        return Poly(out, p)

    def to_list(self) -> list[int]:
        return list(self.coeffs)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    while g:
        f, g = g, f % g
    if not f:
        return f
    return f.monic()


def poly_mul_mod(f: Poly, g: Poly, modulus: Poly) -> Poly:
    return (f * g) % modulus


def poly_pow_mod(f: Poly, e: int, modulus: Poly) -> Poly:
    if e < 0:
        return poly_pow_mod(poly_invert_mod(f, modulus), -e, modulus)
    result = Poly([1], f.p)
    base = f % modulus
    while e:
        if e & 1:
            result = result * base % modulus
        base = base * base % modulus
        e >>= 1
    return result


def poly_invert_mod(f: Poly, modulus: Poly) -> Poly:
    """Inverse of f modulo an irreducible modulus, by extended Euclid."""
    r0, r1 = modulus, f % modulus
    s0, s1 = Poly([], f.p), Poly([1], f.p)
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if r0.degree != 0:
        raise NonInvertible(f"gcd has degree {r0.degree}, element is not a unit")
    inv_c = pow(r0.coeffs[0], f.p - 2, f.p)
    return s0 * inv_c % modulus


def is_irreducible(f: Poly) -> bool:
    """Irreducibility over F_p via the x^(p^k) - x gcd ladder."""
    n = f.degree
    if n is NEG_INF or n == 0:
        return False
    if n == 1:
        return True
    p = f.p
    x = Poly([0, 1], p)
    xq = poly_pow_mod(x, p ** n, f)
    if xq != x % f:
        return False
    for ell in factorize_int(n):
        h = poly_pow_mod(x, p ** (n // ell), f)
        if poly_gcd(f, h - x).degree != 0:
            return False
    return True


def squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Monic f into pairwise coprime squarefree parts with multiplicities."""
    p = f.p
    out: list[tuple[Poly, int]] = []
    deriv = f.derivative()
    if deriv.is_zero():
        for g, m in squarefree_decomposition(f.pth_root()):
            out.append((g, m * p))
        return out
    c = poly_gcd(f, deriv)
    w = f // c
    m = 1
    while w.degree != 0:
        y = poly_gcd(w, c)
        z = w // y
        if z.degree != 0:
            out.append((z, m))
        w = y
        c = c // y
        m += 1
    if c.degree != 0:
        for g, mm in squarefree_decomposition(c.pth_root()):
            out.append((g, mm * p))
    return out


def _ddf(f: Poly) -> list[tuple[int, Poly]]:
    # Distinct-degree split of a squarefree monic polynomial.
    p = f.p
    x = Poly([0, 1], p)
    out = []
    h = x
    k = 0
    rest = f
    while rest.degree >= 2 * (k + 1):
        k += 1
        h = poly_pow_mod(h, p, rest)
        g = poly_gcd(rest, h - x)
        if g.degree != 0:
            out.append((k, g))
            rest = rest // g
            h = h % rest
    if rest.degree != 0:
        out.append((rest.degree, rest))
    return out


def _edf(f: Poly, k: int, rng: random.Random) -> list[Poly]:
    # Cantor-Zassenhaus equal-degree split: every factor of f has degree k.
    if f.degree == k:
        return [f]
    p = f.p
    n = f.degree
    while True:
        h = Poly([rng.randrange(p) for _ in range(n)], p)
        if h.degree is NEG_INF or h.degree == 0:
            continue
        if p == 2:
            # trace map replaces the power trick in characteristic 2
            g = h
            t = h
            for _ in range(k - 1):
                t = t * t % f
                g = (g + t) % f
        else:
            g = poly_pow_mod(h, (p ** k - 1) // 2, f) - 1
        g = poly_gcd(f, g)
        if 0 < g.degree < n:
            return _edf(g, k, rng) + _edf(f // g, k, rng)


def factor(f: Poly, seed: int = 0) -> tuple[int, list[tuple[Poly, int]]]:
    """Full factorization over F_p.

    Returns (unit, factors) with unit in F_p^* and factors a sorted list of
    (monic irreducible, multiplicity).  Deterministic for a given seed: the
    equal-degree stage draws from an RNG keyed on the seed and f itself.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    unit = f.lc()
    if f.degree == 0:
        return unit, []
    mix = seed
    for c in f.coeffs:
        mix = mix * f.p + c + 1
    rng = random.Random(mix)
    work = f.monic()
    factors: list[tuple[Poly, int]] = []
    for sqf, mult in squarefree_decomposition(work):
        for k, piece in _ddf(sqf):
            for irr in _edf(piece, k, rng):
                factors.append((irr, mult))
    factors.sort(key=lambda t: poly_sort_key(t[0]))
    return unit, factors


def poly_sort_key(q: Poly):
    """Canonical total order: by degree, then by the little-endian coefficient encoding."""
    n = 0
    for c in reversed(q.coeffs):
        n = n * q.p + c
    return (len(q.coeffs), n)


def monic_irreducibles(p: int, max_degree: int):
    """Yield all monic irreducibles of degree 1..max_degree in canonical order."""
    for k in range(1, max_degree + 1):
        for n in range(p ** k):
            coeffs = []
            v = n
            for _ in range(k):
                coeffs.append(v % p)
                v //= p
            coeffs.append(1)
            q = Poly(coeffs, p)
            if k == 1 or is_irreducible(q):
                yield q


def find_irreducible(p: int, degree: int) -> Poly:
    """First monic irreducible of the given degree in canonical order."""
    for q in monic_irreducibles(p, degree):
        if q.degree == degree:
            return q
    raise ValueError("unreachable: irreducibles exist in every degree")


def primitive_root(p: int) -> int:
    """Smallest primitive root of F_p."""
    if p == 2:
        return 1
    fac = factorize_int(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in fac):
            return g
        g += 1


def group_generator_check(g: int, p: int, order: int, order_factors: dict[int, int]) -> bool:
    """Does g generate the order-`order` subgroup of F_p^* it lives in?"""
    if pow(g, order, p) != 1:
        return False
    return all(pow(g, order // ell, p) != 1 for ell in order_factors)


def bsgs_dlog(target: int, base: int, p: int, order: int | None = None) -> int:
    """Discrete log in F_p^* by baby-step giant-step."""
    if order is None:
        order = p - 1
    target %= p
    if target == 0:
        raise ValueError("0 has no discrete log")
    m = 1
    while m * m < order:
        m += 1
    table = {}
    e = 1
    for j in range(m):
        table.setdefault(e, j)
        e = e * base % p
    giant = pow(base, (p - 1 - m) % (p - 1), p)  # base^(-m)
    gamma = target
    for i in range(m + 1):
        if gamma in table:
            return (i * m + table[gamma]) % order
        gamma = gamma * giant % p
    raise ValueError(f"{target} is not in the subgroup generated by {base}")


class PrimeOps:
    """Field operations on F_p with plain int elements.

    Mirrors the QuotientField interface so code generic over a field (curve
    arithmetic, mostly) runs unchanged over F_p and over extensions.
    """

    def __init__(self, p: int):
        self.p = p

    def __repr__(self):
        return f"PrimeOps({self.p})"

    def el(self, c: int) -> int:
        return c % self.p

    def embed(self, c: int) -> int:
        return c % self.p

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise NonInvertible("0 has no inverse")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.p)

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    def eq(self, a: int, b: int) -> bool:
        return (a - b) % self.p == 0

    def random_el(self, rng: random.Random) -> int:
        return rng.randrange(self.p)


class QuotientField:
    """Arithmetic in F_p[X]/(modulus), a field when the modulus is irreducible.

    Elements are Poly values reduced below the modulus degree.  The class
    only bundles the modulus with the handful of operations the rest of the
    package needs; it does not wrap elements.
    """

    def __init__(self, modulus: Poly):
        if modulus.degree is NEG_INF or modulus.degree < 1:
            raise ValueError("modulus must have positive degree")
        self.modulus = modulus.monic()
        self.p = modulus.p
        self.degree = modulus.degree

    def __repr__(self):
        return f"QuotientField(F_{self.p}[X]/deg{self.degree})"

    def order(self) -> int:
        return self.p ** self.degree

    def el(self, coeffs) -> Poly:
        if isinstance(coeffs, Poly):
            return coeffs % self.modulus
        return Poly(coeffs, self.p) % self.modulus

    def embed(self, c: int) -> Poly:
        return Poly([c], self.p)

    def zero(self) -> Poly:
        return Poly([], self.p)

    def one(self) -> Poly:
        return Poly([1], self.p)

    def x(self) -> Poly:
        return Poly([0, 1], self.p) % self.modulus

    def add(self, a: Poly, b: Poly) -> Poly:
        return a + b

    def sub(self, a: Poly, b: Poly) -> Poly:
        return a - b

    def neg(self, a: Poly) -> Poly:
        return -a

    def mul(self, a: Poly, b: Poly) -> Poly:
        return a * b % self.modulus

    def inv(self, a: Poly) -> Poly:
        return poly_invert_mod(a, self.modulus)

    def div(self, a: Poly, b: Poly) -> Poly:
        return self.mul(a, self.inv(b))

    def pow(self, a: Poly, e: int) -> Poly:
        return poly_pow_mod(a, e, self.modulus)

    def is_zero(self, a: Poly) -> bool:
        return a.is_zero()

    def eq(self, a: Poly, b: Poly) -> bool:
        return a == b

    def random_el(self, rng: random.Random) -> Poly:
        return Poly([rng.randrange(self.p) for _ in range(self.degree)], self.p)

    def elements(self):
        """All p^degree elements, for desk-scale brute force."""
        total = self.order()
        for n in range(total):
            coeffs, v = [], n
            for _ in range(self.degree):
                coeffs.append(v % self.p)
                v //= self.p
            yield Poly(coeffs, self.p)


# ---------------------------------------------------------------------------
# Small dense linear algebra mod a prime.  Rows are lists of ints.


def rref_mod_p(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F_p.  Returns (rows, pivot column list)."""
    mat = [[c % p for c in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] % p != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = pow(mat[r][c], p - 2, p)
        mat[r] = [v * inv % p for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(v - f * w) % p for v, w in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def kernel_basis(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of the right null space of the matrix over F_p."""
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    rref, pivots = rref_mod_p(rows, p)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec = [0] * ncols
        vec[fc] = 1
        for row, pc in zip(rref, pivots):
            vec[pc] = (-row[fc]) % p
        basis.append(vec)
    return basis


def solve_mod_prime(rows: list[list[int]], rhs: list[int], p: int):
    """Solve A x = b over F_p.

    Returns (particular solution, free column list), or None if inconsistent.
    Free columns are set to 0 in the particular solution.
    """
    aug = [list(r) + [b % p] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    rref, pivots = rref_mod_p(aug, p)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for row, pc in zip(rref, pivots):
        x[pc] = row[-1] % p
    free = [c for c in range(ncols) if c not in set(pivots)]
    return x, free
