"""Truncated Witt vectors W_n(F_{p^m}) and the ramified extension W_n[p^{1/r}].

W_n(F_{p^m}) is realized as (Z/p^n)[x]/(f~) where f~ is the Hensel lift
of the pinned field modulus whose roots are Teichmuller elements.  With
that choice the distinguished generator is itself a Teichmuller lift and
the Frobenius sigma is the Z/p^n-linear map sending the generator to its
p-th power.  Witt-polynomial arithmetic blows up combinatorially; this
representation is fast, and ``witt_oracle_check`` ties it back to the
genuine ghost-component construction.

All operations are exact mod p^n.  Nothing here silently loses
precision: division by p is only available through ``exact_div_p`` (the
result is determined mod p^(n-k) and the caller owns that bookkeeping),
and the ramified elements carry their guaranteed pi-adic precision
explicitly.
"""

import math

from .errors import NotAUnit, OracleMismatch, OutOfRange, RingMismatch
from .fields import FqElement, embed, make_field

_rings = {}
_ramified = {}


def witt_ring(field_or_p, n, m=None):
    """W_n(F_{p^m}); accepts a field or (p, n, m)."""
    if isinstance(field_or_p, int):
        field = make_field(field_or_p, 1 if m is None else m)
    else:
        field = field_or_p
    key = (field.p, field.m, n)
    if key not in _rings:
        _rings[key] = WittRing(field, n)
    return _rings[key]


def _gauss_unit_pivot(rows, rhs, pn, p):
    """Solve rows*v = rhs over Z/p^n; the matrix must be invertible mod p."""
    m = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(m):
        pivot = next(i for i in range(c, m) if aug[i][c] % p)
        aug[c], aug[pivot] = aug[pivot], aug[c]
        inv = pow(aug[c][c], -1, pn)
        aug[c] = [(v * inv) % pn for v in aug[c]]
        for i in range(m):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(v - f * w) % pn for v, w in zip(aug[i], aug[c])]
    return [aug[i][m] for i in range(m)]


class WittRing:
    """W_n(F_{p^m}), the unramified degree-m extension of Z/p^n."""

    __slots__ = (
        "field", "n", "p", "m", "pn", "modulus", "_red", "_sigma_mats",
        "zero", "one", "gen",
    )

    def __init__(self, field, n):
        if n < 1:
            raise ValueError("precision must be >= 1")
        self.field = field
        self.n = n
        self.p = field.p
        self.m = field.m
        self.pn = field.p**n
        self.modulus = self._teichmuller_modulus()
        self._red = self._reduction_rows()
        self._sigma_mats = None
        self.zero = WittElement(self, (0,) * self.m)
        one = [0] * self.m
        one[0] = 1
        self.one = WittElement(self, tuple(one))
        gen = [0] * self.m
        if self.m == 1:
            gen[0] = (-self.modulus[0]) % self.pn
        else:
            gen[1] = 1
        self.gen = WittElement(self, tuple(gen))

    def _teichmuller_modulus(self):
        """Monic lift of the field modulus whose roots are Teichmuller units."""
        p, m, pn = self.p, self.m, self.pn
        if m == 1:
            # root = Teichmuller lift of the pinned primitive root
            g = (-self.field.modulus[0]) % p
            t = g
            while True:
                t2 = pow(t, p, pn)
                if t2 == t:
                    break
                t = t2
            return ((-t) % pn, 1)
        f0 = [c % pn for c in self.field.modulus]
        red0 = []
        cur = [(-c) % pn for c in f0[:-1]]
        for _ in range(m - 1):
            red0.append(list(cur))
            cur = [0] + cur
            lead = cur.pop()
            if lead:
                cur = [(c - lead * fc) % pn for c, fc in zip(cur, f0[:-1])]

        def mul0(a, b):
            prod = [0] * (2 * m - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        prod[i + j] = (prod[i + j] + ai * bj) % pn
            head = prod[:m]
            for i, c in enumerate(prod[m:]):
                if c:
                    head = [(h + c * r) % pn for h, r in zip(head, red0[i])]
            return head

        # Teichmuller lift of the generator inside the naive ring
        xi = [0] * m
        xi[1] = 1
        for _ in range(self.n):
            t = xi
            e = p**m
            acc = [0] * m
            acc[0] = 1
            while e:
                if e & 1:
                    acc = mul0(acc, t)
                t = mul0(t, t)
                e >>= 1
            xi = acc
        # minimal polynomial of xi: solve sum_{i<m} c_i xi^i = -xi^m
        powers = [[0] * m for _ in range(m + 1)]
        powers[0][0] = 1
        for i in range(1, m + 1):
            powers[i] = mul0(powers[i - 1], xi)
        rows = [[powers[j][i] for j in range(m)] for i in range(m)]
        rhs = [(-powers[m][i]) % pn for i in range(m)]
        coeffs = _gauss_unit_pivot(rows, rhs, pn, p)
        return tuple(coeffs) + (1,)

    def _reduction_rows(self):
        pn, m = self.pn, self.m
        red = []
        cur = [(-c) % pn for c in self.modulus[:-1]]
        for _ in range(m - 1):
            red.append(tuple(cur))
            cur = [0] + cur
            lead = cur.pop()
            if lead:
                cur = [(c - lead * fc) % pn for c, fc in zip(cur, self.modulus[:-1])]
        return red

    def sigma_matrices(self):
        """Columns of sigma^j in the power basis, for j = 0..m-1."""
        if self._sigma_mats is None:
            m = self.m
            ident = [
                tuple(1 if i == j else 0 for i in range(m)) for j in range(m)
            ]
            mats = [ident]
            # sigma sends the (Teichmuller) generator to its p-th power
            gp = self.gen**self.p
            cols = []
            acc = self.one
            for _ in range(m):
                cols.append(acc.coeffs)
                acc = acc * gp
            mats.append(cols)
            for _ in range(m - 2):
                prev = mats[-1]
                nxt = [self._apply_cols(mats[1], col) for col in prev]
                mats.append(nxt)
            self._sigma_mats = mats[: m] if m > 1 else [ident]
        return self._sigma_mats

    def _apply_cols(self, cols, vec):
        pn = self.pn
        acc = [0] * self.m
        for c, col in zip(vec, cols):
            if c:
                acc = [(a + c * b) % pn for a, b in zip(acc, col)]
        return tuple(acc)

    def element(self, coeffs):
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        coeffs = [c % self.pn for c in coeffs]
        if len(coeffs) > self.m:
            raise ValueError("coefficient vector too long")
        coeffs += [0] * (self.m - len(coeffs))
        return WittElement(self, tuple(coeffs))

    def teichmuller(self, a):
        """The multiplicative lift of a residue-field element."""
        if not isinstance(a, FqElement):
            raise TypeError("teichmuller expects a residue-field element")
        if a.field != self.field:
            raise RingMismatch(f"element of {a.field}, ring over {self.field}")
        x = self.element(list(a.coeffs))
        e = self.p**self.m
        for _ in range(self.n):
            y = x**e
            if y == x:
                break
            x = y
        return x

    def __eq__(self, other):
        return (
            isinstance(other, WittRing)
            and (self.p, self.m, self.n) == (other.p, other.m, other.n)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.n))

    def __repr__(self):
        return f"W_{self.n}({self.field})"


class WittElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ring.element([other])
        if not isinstance(other, WittElement):
            return NotImplemented
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        pn = self.ring.pn
        return WittElement(
            self.ring, tuple((a + b) % pn for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        pn = self.ring.pn
        return WittElement(
            self.ring, tuple((a - b) % pn for a, b in zip(self.coeffs, other.coeffs))
        )

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        pn = self.ring.pn
        return WittElement(self.ring, tuple((-a) % pn for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        R = self.ring
        pn, m = R.pn, R.m
        if m == 1:
            return WittElement(R, ((self.coeffs[0] * other.coeffs[0]) % pn,))
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] = (prod[i + j] + a * b) % pn
        head = prod[:m]
        for i, c in enumerate(prod[m:]):
            if c:
                row = R._red[i]
                head = [(h + c * r) % pn for h, r in zip(head, row)]
        return WittElement(R, tuple(head))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def valuation(self):
        """p-adic valuation; math.inf when indistinguishable from 0 mod p^n."""
        v = self.ring.n
        for c in self.coeffs:
            if c:
                w = 0
                while c % self.ring.p == 0:
                    c //= self.ring.p
                    w += 1
                v = min(v, w)
        return math.inf if v >= self.ring.n else v

    def is_unit(self):
        return self.valuation() == 0

    def inverse(self):
        """Inverse of a unit, by Hensel lifting the residue inverse."""
        if not self.is_unit():
            raise NotAUnit(f"valuation {self.valuation()} > 0")
        r0 = self.residue().inverse()
        y = self.ring.element(list(r0.coeffs))
        two = self.ring.element([2])
        steps = max(1, self.ring.n.bit_length() + 1)
        for _ in range(steps):
            y = y * (two - self * y)
        return y

    def sigma(self, power=1):
        """Frobenius automorphism; sigma^m = id, negative powers allowed."""
        k = power % self.ring.m
        if k == 0:
            return self
        cols = self.ring.sigma_matrices()[k]
        return WittElement(self.ring, self.ring._apply_cols(cols, self.coeffs))

    def residue(self):
        p = self.ring.p
        return self.ring.field.element([c % p for c in self.coeffs])

    def exact_div_p(self, k=1):
        """x / p^k for v(x) >= k.  The result is determined mod p^(n-k);
        its top k digits are zero-filled and the caller owns the reduced
        precision."""
        if k == 0:
            return self
        pk = self.ring.p**k
        if any(c % pk for c in self.coeffs):
            raise NotAUnit(f"element not divisible by p^{k}")
        return WittElement(self.ring, tuple(c // pk for c in self.coeffs))

    def eq_mod(self, other, k):
        """Equality mod p^k."""
        other = self._coerce(other)
        pk = self.ring.p ** min(k, self.ring.n)
        return all((a - b) % pk == 0 for a, b in zip(self.coeffs, other.coeffs))

    def lift_to(self, target_ring):
        """Transport to another precision/field along Teichmuller digits.

        Raising precision is information-creating only for Teichmuller
        digits, which is exactly how consumers are meant to re-lift:
        x = sum p^i tau(a_i) maps to sum p^i tau(a_i) in the bigger ring.
        """
        digits = self.teichmuller_digits()
        out = target_ring.zero
        pw = target_ring.one
        for a in digits[: target_ring.n]:
            if target_ring.field == self.ring.field:
                b = a
            else:
                b = embed(a, target_ring.field)
            out = out + pw * target_ring.teichmuller(b)
            pw = pw * target_ring.element([target_ring.p])
        return out

    def teichmuller_digits(self):
        """The digits a_i with x = sum_i p^i tau(a_i)."""
        x = self
        digits = []
        for i in range(self.ring.n):
            a = x.residue()
            digits.append(a)
            x = (x - self.ring.teichmuller(a)).exact_div_p()
        return digits

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.element([other])
        return (
            isinstance(other, WittElement)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ring.p, self.ring.m, self.ring.n, self.coeffs))

    def __repr__(self):
        if self.ring.m == 1:
            return f"{self.coeffs[0]}"
        return f"{self.ring}{list(self.coeffs)}"

    def to_json(self):
        return {
            "p": self.ring.p,
            "m": self.ring.m,
            "n": self.ring.n,
            "coeffs": list(self.coeffs),
        }


def sigma(x, power=1):
    """Module-level Frobenius, for Witt or ramified elements."""
    return x.sigma(power)


def teichmuller(a, ring):
    return ring.teichmuller(a)


# ---------------------------------------------------------------------------
# ramified extension W_n[pi], pi^r = p


def ramified_ring(witt, r):
    key = (witt.p, witt.m, witt.n, r)
    if key not in _ramified:
        _ramified[key] = RamifiedRing(witt, r)
    return _ramified[key]


class RamifiedRing:
    """W_n(F_{p^m})[pi] with pi^r = p and sigma(pi) = pi.

    Elements are digit vectors (d_0, .., d_{r-1}) over W_n representing
    sum d_i pi^i, a free W_n-module, together with an explicit guaranteed
    pi-adic precision (full precision is n*r).
    """

    __slots__ = ("witt", "r", "full_prec")

    def __init__(self, witt, r):
        if r < 1:
            raise ValueError("ramification index must be >= 1")
        self.witt = witt
        self.r = r
        self.full_prec = witt.n * r

    @property
    def p(self):
        return self.witt.p

    def zero(self):
        return RamifiedElement(self, (self.witt.zero,) * self.r, self.full_prec)

    def one(self):
        return self.from_witt(self.witt.one)

    def pi(self, power=1):
        """pi^power as an element (power >= 0)."""
        q, s = divmod(power, self.r)
        digits = [self.witt.zero] * self.r
        digits[s] = self.witt.element([self.p]) ** q if q else self.witt.one
        return RamifiedElement(self, tuple(digits), self.full_prec)

    def from_witt(self, w, prec=None):
        digits = [w] + [self.witt.zero] * (self.r - 1)
        return RamifiedElement(
            self, tuple(digits), self.full_prec if prec is None else prec
        )

    def __eq__(self, other):
        return (
            isinstance(other, RamifiedRing)
            and self.witt == other.witt
            and self.r == other.r
        )

    def __hash__(self):
        return hash((self.witt, self.r))

    def __repr__(self):
        return f"{self.witt}[p^(1/{self.r})]"


class RamifiedElement:
    __slots__ = ("ring", "digits", "prec")

    def __init__(self, ring, digits, prec):
        self.ring = ring
        self.digits = digits
        self.prec = min(prec, ring.full_prec)

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ring.from_witt(self.ring.witt.element([other]))
        if not isinstance(other, RamifiedElement):
            return NotImplemented
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RamifiedElement(
            self.ring,
            tuple(a + b for a, b in zip(self.digits, other.digits)),
            min(self.prec, other.prec),
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RamifiedElement(
            self.ring,
            tuple(a - b for a, b in zip(self.digits, other.digits)),
            min(self.prec, other.prec),
        )

    def __neg__(self):
        return RamifiedElement(self.ring, tuple(-a for a in self.digits), self.prec)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        r = self.ring.r
        W = self.ring.witt
        p_elt = W.element([W.p])
        out = [W.zero] * r
        for i, a in enumerate(self.digits):
            if all(c == 0 for c in a.coeffs):
                continue
            for j, b in enumerate(other.digits):
                k = i + j
                term = a * b
                if k >= r:
                    out[k - r] = out[k - r] + term * p_elt
                else:
                    out[k] = out[k] + term
        return RamifiedElement(self.ring, tuple(out), min(self.prec, other.prec))

    __rmul__ = __mul__

    def __pow__(self, e):
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def sigma(self, power=1):
        return RamifiedElement(
            self.ring, tuple(d.sigma(power) for d in self.digits), self.prec
        )

    def valuation_pi(self):
        """pi-adic valuation of the stored representative, clipped at prec."""
        v = self.ring.full_prec
        r = self.ring.r
        for i, d in enumerate(self.digits):
            w = d.valuation()
            if w is not math.inf:
                v = min(v, i + r * w)
        return math.inf if v >= self.prec else v

    def is_unit(self):
        return self.valuation_pi() == 0

    def inverse(self):
        if not self.is_unit():
            raise NotAUnit("positive pi-adic valuation")
        y = self.ring.from_witt(self.digits[0].inverse(), self.prec)
        two = self.ring.from_witt(self.ring.witt.element([2]), self.ring.full_prec)
        steps = max(1, self.ring.full_prec.bit_length() + 1)
        for _ in range(steps):
            y = RamifiedElement(y.ring, (y * (two - self * y)).digits, self.prec)
        return y

    def div_pi_exact(self, k=1):
        """x / pi^k, requiring pi^k | x; guaranteed precision drops by k.

        One pi-division sends d0 + d1 pi + .. + d_{r-1} pi^(r-1) to
        d1 + d2 pi + .. + (d0/p) pi^(r-1).
        """
        out = self
        for _ in range(k):
            d0 = out.digits[0]
            lowered = d0.exact_div_p()  # raises NotAUnit if not divisible
            out = RamifiedElement(
                out.ring,
                tuple(list(out.digits[1:]) + [lowered]),
                out.prec - 1,
            )
        return out

    def residue(self):
        return self.digits[0].residue()

    def eq_at_precision(self, other, prec=None):
        other = self._coerce(other)
        known = min(self.prec, other.prec)
        if prec is not None and prec > known:
            from .errors import InsufficientPrecision

            raise InsufficientPrecision(
                f"comparison at pi-precision {prec} but only {known} is guaranteed",
                required=prec,
            )
        k = known if prec is None else prec
        v = (self - other).valuation_pi()
        return v is math.inf or v >= k

    def map_coefficients(self, fn, ring=None):
        ring = ring or self.ring
        return RamifiedElement(ring, tuple(fn(d) for d in self.digits), self.prec)

    def re_ramify(self, new_ring):
        """Reinterpret in a ring with ramification a multiple of ours."""
        if new_ring.witt != self.ring.witt or new_ring.r % self.ring.r != 0:
            raise RingMismatch("target ramification must refine the current one")
        step = new_ring.r // self.ring.r
        digits = [new_ring.witt.zero] * new_ring.r
        for i, d in enumerate(self.digits):
            digits[i * step] = d
        return RamifiedElement(new_ring, tuple(digits), self.prec * step)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.ring == other.ring and self.digits == other.digits

    def __repr__(self):
        return f"{self.ring}{[list(d.coeffs) for d in self.digits]}@{self.prec}"

    def to_json(self):
        return {
            "p": self.ring.witt.p,
            "m": self.ring.witt.m,
            "n": self.ring.witt.n,
            "r": self.ring.r,
            "digits": [list(d.coeffs) for d in self.digits],
        }


# ---------------------------------------------------------------------------
# the ghost-component oracle


def _ghost(vec, p, j):
    return sum(p**i * vec[i] ** (p ** (j - i)) for i in range(j + 1))


def _witt_digits_from_ghosts(ghosts, p, n):
    digits = []
    for j in range(n):
        t = ghosts[j] - sum(
            p**i * digits[i] ** (p ** (j - i)) for i in range(j)
        )
        assert t % p**j == 0, "ghost recursion must divide exactly"
        digits.append((t // p**j) % p)
    return digits


def witt_add_oracle(x, y, p, n):
    """Witt-vector sum of digit vectors via the universal polynomials."""
    ghosts = [_ghost(x, p, j) + _ghost(y, p, j) for j in range(n)]
    return _witt_digits_from_ghosts(ghosts, p, n)


def witt_mul_oracle(x, y, p, n):
    ghosts = [_ghost(x, p, j) * _ghost(y, p, j) for j in range(n)]
    return _witt_digits_from_ghosts(ghosts, p, n)


def _teich_int(a, p, pn):
    t = a % pn
    while True:
        t2 = pow(t, p, pn)
        if t2 == t:
            return t
        t = t2


def witt_coordinates_to_int(digits, p, n):
    """The canonical isomorphism W_n(F_p) -> Z/p^n (over F_p, sigma = id)."""
    pn = p**n
    return sum(p**i * _teich_int(d, p, pn) for i, d in enumerate(digits)) % pn


def witt_oracle_check(p, n, trials=100, seed=0):
    """Check ring_ops against the universal-Witt-polynomial construction.

    Random digit vectors are added and multiplied both through the ghost
    components over Z and through the fast representation of W_n(F_p);
    the canonical isomorphism to Z/p^n mediates.  Exponential in n, so
    restricted to p <= 7, n <= 4.
    """
    import random

    if p > 7 or n > 4:
        raise OutOfRange("oracle restricted to p <= 7, n <= 4")
    rng = random.Random(seed)
    ring = witt_ring(p, n)
    for trial in range(trials):
        x = [rng.randrange(p) for _ in range(n)]
        y = [rng.randrange(p) for _ in range(n)]
        xv = ring.element([witt_coordinates_to_int(x, p, n)])
        yv = ring.element([witt_coordinates_to_int(y, p, n)])
        s_oracle = witt_coordinates_to_int(witt_add_oracle(x, y, p, n), p, n)
        m_oracle = witt_coordinates_to_int(witt_mul_oracle(x, y, p, n), p, n)
        s_fast = (xv + yv).coeffs[0]
        m_fast = (xv * yv).coeffs[0]
        if s_fast != s_oracle or m_fast != m_oracle:
            raise OracleMismatch(
                f"trial {trial}: oracle (add={s_oracle}, mul={m_oracle}) vs "
                f"fast (add={s_fast}, mul={m_fast})",
                counterexample={"x": x, "y": y, "p": p, "n": n},
            )
    return {"p": p, "n": n, "trials": trials, "passed": True}
