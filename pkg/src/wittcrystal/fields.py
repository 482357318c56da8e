"""Finite fields F_{p^m} with a pinned compatible tower.

Moduli come from a shipped Conway-polynomial table (versioned JSON data
file); entries missing from the table are computed on demand with the
same deterministic algorithm and cached for the process.  Because all
moduli are norm-compatible, the distinguished embedding
F_{p^d} -> F_{p^m} for d | m sends the generator of the small field to
``g^((p^m-1)/(p^d-1))`` where g generates the big field, and these
embeddings compose compatibly up the tower.

Elements are coefficient vectors in the polynomial basis 1, g, ..,
g^(m-1).  The module also houses ``solve_additive``: the additive
(p-polynomial) equation solver used by every successive-approximation
argument, which enlarges the field along the tower until the underlying
F_p-linear system becomes consistent.
"""

import json
from importlib import resources

from sympy import isprime

from ._conway import conway_polynomial
from .errors import ExtensionExhausted, NoEmbedding, NotAUnit, UnsupportedField

DEFAULT_MAX_P = 31
DEFAULT_MAX_DEGREE = 8

_table_bounds = {"max_p": DEFAULT_MAX_P, "max_degree": DEFAULT_MAX_DEGREE}
_moduli = None  # lazily loaded {(p, m): coeff list}
_fields = {}
_embeddings = {}


def set_table_bounds(max_p=DEFAULT_MAX_P, max_degree=DEFAULT_MAX_DEGREE):
    """Override the pinned-table bounds (config hook)."""
    _table_bounds["max_p"] = max_p
    _table_bounds["max_degree"] = max_degree


def table_bounds():
    return _table_bounds["max_p"], _table_bounds["max_degree"]


def _load_table():
    global _moduli
    if _moduli is None:
        _moduli = {}
        try:
            raw = resources.files("wittcrystal").joinpath("data/conway_table.json")
            data = json.loads(raw.read_text())
            for p_str, per_degree in data["moduli"].items():
                for m_str, coeffs in per_degree.items():
                    _moduli[(int(p_str), int(m_str))] = list(coeffs)
        except FileNotFoundError:
            pass  # fall back to on-demand computation everywhere
    return _moduli


def pinned_modulus(p, m):
    """Modulus for F_{p^m} from the table, computing a missing entry on demand."""
    table = _load_table()
    key = (p, m)
    if key not in table:
        lower = {}
        for d in range(1, m):
            if m % d == 0:
                lower[d] = pinned_modulus(p, d)
        table[key] = conway_polynomial(p, m, lower)
    return table[key]


class FqField:
    """The field F_{p^m} presented as F_p[x]/(modulus)."""

    __slots__ = ("p", "m", "modulus", "_red", "_frob", "zero", "one", "gen")

    def __init__(self, p, m, modulus):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        # reduction rows: x^(m+i) mod modulus as length-m tuples
        red = []
        cur = [(-c) % p for c in modulus[:-1]]
        for _ in range(m - 1):
            red.append(tuple(cur))
            cur = [0] + cur
            lead = cur.pop()
            if lead:
                cur = [(c - lead * fc) % p for c, fc in zip(cur, modulus[:-1])]
        self._red = red
        self._frob = None
        self.zero = FqElement(self, (0,) * m)
        one = [0] * m
        one[0] = 1
        self.one = FqElement(self, tuple(one))
        gen = [0] * m
        if m == 1:
            gen[0] = (-modulus[0]) % p  # class of x is the pinned primitive root
        else:
            gen[1] = 1
        self.gen = FqElement(self, tuple(gen))

    @property
    def order(self):
        return self.p**self.m

    def element(self, coeffs):
        coeffs = [c % self.p for c in coeffs]
        if len(coeffs) > self.m:
            raise ValueError("coefficient vector too long")
        coeffs += [0] * (self.m - len(coeffs))
        return FqElement(self, tuple(coeffs))

    def from_int(self, k):
        """Element whose coefficient vector is k written in base p."""
        coeffs = []
        k = int(k) % self.order
        for _ in range(self.m):
            k, r = divmod(k, self.p)
            coeffs.append(r)
        return FqElement(self, tuple(coeffs))

    def elements(self):
        """All p^m elements, in base-p counter order."""
        for k in range(self.order):
            yield self.from_int(k)

    def frobenius_matrix(self):
        """Matrix of a -> a^p in the polynomial basis (columns = images)."""
        if self._frob is None:
            cols = []
            for i in range(self.m):
                e = [0] * self.m
                e[i] = 1
                cols.append((FqElement(self, tuple(e)) ** self.p).coeffs)
            self._frob = cols
        return self._frob

    def __eq__(self, other):
        return (
            isinstance(other, FqField) and self.p == other.p and self.m == other.m
        )

    def __hash__(self):
        return hash((self.p, self.m))

    def __repr__(self):
        return f"F_{self.p}^{self.m}" if self.m > 1 else f"F_{self.p}"


class FqElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, FqElement):
            if isinstance(other, int):
                return self.field.element([other])
            return NotImplemented
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FqElement(
            self.field,
            tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)),
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FqElement(
            self.field,
            tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        p = self.field.p
        return FqElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        p, m = F.p, F.m
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] = (prod[i + j] + a * b) % p
        head = prod[:m]
        for i, c in enumerate(prod[m:]):
            if c:
                row = F._red[i]
                head = [(h + c * r) % p for h, r in zip(head, row)]
        return FqElement(F, tuple(head))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise NotAUnit("0 has no inverse")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def frob(self, k=1):
        """Frobenius a -> a^(p^k); negative k uses sigma^m = id."""
        k %= self.field.m
        out = self
        cols = self.field.frobenius_matrix()
        p, m = self.field.p, self.field.m
        for _ in range(k):
            acc = [0] * m
            for i, c in enumerate(out.coeffs):
                if c:
                    col = cols[i]
                    acc = [(a + c * b) % p for a, b in zip(acc, col)]
            out = FqElement(self.field, tuple(acc))
        return out

    def minimal_subfield_degree(self):
        """Smallest d | m with self in F_{p^d}."""
        for d in range(1, self.field.m + 1):
            if self.field.m % d == 0 and self.frob(d) == self:
                return d
        raise AssertionError("unreachable")

    def to_int(self):
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.field.p + c
        return v

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.field.element([other])
        return (
            isinstance(other, FqElement)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.coeffs))

    def __repr__(self):
        if self.field.m == 1:
            return str(self.coeffs[0])
        return f"{self.field}({list(self.coeffs)})"

    def to_json(self):
        return {"p": self.field.p, "m": self.field.m, "coeffs": list(self.coeffs)}


def make_field(p, m, ignore_bounds=False):
    """The pinned field F_{p^m}.

    Raises UnsupportedField outside the configured table bounds unless
    ``ignore_bounds`` is set (internal tower enlargement sets it).
    """
    key = (p, m)
    if key in _fields:
        return _fields[key]
    if not isprime(p):
        raise UnsupportedField(f"{p} is not prime")
    if m < 1:
        raise UnsupportedField(f"degree must be >= 1, got {m}")
    if not ignore_bounds:
        max_p, max_m = table_bounds()
        if p > max_p or m > max_m:
            raise UnsupportedField(
                f"({p}, {m}) outside pinned table bounds (p <= {max_p}, m <= {max_m})"
            )
    field = FqField(p, m, pinned_modulus(p, m))
    _fields[key] = field
    return field


def _embedding_powers(source, target):
    """Images of 1, g_d, g_d^2, ... in the target field (cached)."""
    key = (source.p, source.m, target.m)
    if key not in _embeddings:
        exponent = (target.order - 1) // (source.order - 1)
        img = target.gen**exponent
        powers = [target.one]
        for _ in range(source.m - 1):
            powers.append(powers[-1] * img)
        # The Conway norm conditions make img a root of the source modulus;
        # cheap to assert, catastrophic if ever violated.
        acc = target.zero
        for c in reversed(source.modulus):
            acc = acc * img + target.element([c])
        if not acc.is_zero():
            raise AssertionError(
                f"embedding image is not a root of the {source} modulus"
            )
        _embeddings[key] = powers
    return _embeddings[key]


def embed(x, target):
    """Apply the distinguished embedding of x's field into ``target``."""
    source = x.field
    if source.p != target.p or target.m % source.m != 0:
        raise NoEmbedding(f"no embedding {source} -> {target}")
    if source.m == target.m:
        return FqElement(target, x.coeffs)
    powers = _embedding_powers(source, target)
    acc = target.zero
    for c, pw in zip(x.coeffs, powers):
        if c:
            acc = acc + pw * c
    return acc


def _gauss_solve_fp(rows, rhs, p, want_nonzero_kernel=False):
    """Solve the F_p system rows * v = rhs (rows = list of row lists).

    Returns a solution vector, or None if inconsistent.  With
    ``want_nonzero_kernel`` it instead returns a nonzero kernel vector of
    the homogeneous system, or None if the kernel is trivial.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][c] % p), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [(v * inv) % p for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(v - f * w) % p for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    if want_nonzero_kernel:
        free = [c for c in range(ncols) if c not in pivots]
        if not free:
            return None
        v = [0] * ncols
        v[free[0]] = 1
        for row, pc in zip(aug, pivots):
            v[pc] = (-row[free[0]]) % p
        return v
    for i in range(r, nrows):
        if aug[i][ncols] % p:
            return None
    v = [0] * ncols
    for row, pc in zip(aug, pivots):
        v[pc] = row[ncols]
    return v


def _additive_matrix(coeffs, field):
    """Matrix over F_p of x -> sum coeffs[i] * x^(p^(n-i)) on ``field``."""
    n = len(coeffs) - 1
    m = field.m
    cols = []
    for j in range(m):
        e = [0] * m
        e[j] = 1
        x = FqElement(field, tuple(e))
        acc = field.zero
        for i, c in enumerate(coeffs):
            acc = acc + c * x.frob((n - i) % m)  # p^(n-i) power; sigma^m = id
        cols.append(acc.coeffs)
    # column-major -> row-major
    return [[cols[j][i] for j in range(m)] for i in range(m)]


class AdditiveSolver:
    """Prepared F_p elimination for one additive polynomial on one field.

    Successive approximation solves the same additive equation with many
    right-hand sides; eliminating once and replaying the row operations
    per rhs turns each digit step into an O(m^2) back-substitution.
    """

    def __init__(self, coeffs, field):
        self.field = field
        self.p = field.p
        m = field.m
        A = _additive_matrix(coeffs, field)
        # row-reduce [A | I]; keep R (RREF of A) and the transform T
        aug = [list(A[i]) + [1 if j == i else 0 for j in range(m)] for i in range(m)]
        p = self.p
        pivots = []
        r = 0
        for c in range(m):
            pivot = next((i for i in range(r, m) if aug[i][c] % p), None)
            if pivot is None:
                continue
            aug[r], aug[pivot] = aug[pivot], aug[r]
            inv = pow(aug[r][c], -1, p)
            aug[r] = [(v * inv) % p for v in aug[r]]
            for i in range(m):
                if i != r and aug[i][c]:
                    f = aug[i][c]
                    aug[i] = [(v - f * w) % p for v, w in zip(aug[i], aug[r])]
            pivots.append(c)
            r += 1
        self.m = m
        self.rank = r
        self.pivots = pivots
        self.R = [row[:m] for row in aug]
        self.T = [row[m:] for row in aug]
        self.free = [c for c in range(m) if c not in pivots]

    def solve(self, rhs_coeffs):
        """Solution vector of A x = rhs, or None if inconsistent."""
        p = self.p
        tb = [
            sum(t * b for t, b in zip(self.T[i], rhs_coeffs)) % p
            for i in range(self.m)
        ]
        for i in range(self.rank, self.m):
            if tb[i]:
                return None
        v = [0] * self.m
        for i, pc in enumerate(self.pivots):
            v[pc] = tb[i]
        return v

    def nonzero_kernel(self):
        """A nonzero kernel vector, or None if the kernel is trivial."""
        if not self.free:
            return None
        c0 = self.free[0]
        v = [0] * self.m
        v[c0] = 1
        for i, pc in enumerate(self.pivots):
            v[pc] = (-self.R[i][c0]) % self.p
        return v


_solver_cache = {}


def prepared_solver(coeffs, field):
    key = (field.p, field.m, tuple(c.coeffs for c in coeffs))
    if key not in _solver_cache:
        _solver_cache[key] = AdditiveSolver(coeffs, field)
    return _solver_cache[key]


def solve_additive(coeffs, rhs, want_nonzero=False, max_degree=None):
    """Solve sum_i coeffs[i] * x^(p^(n-i)) + rhs = 0 in the pinned tower.

    The additive polynomial acts F_p-linearly, so each candidate field
    turns the equation into an affine system over F_p.  Fields are tried
    in ascending degree (multiples of the coefficients' field) until the
    system is consistent; ``want_nonzero`` asks for a nonzero solution
    (used to seed successive approximation with a unit).

    Returns (x, field_used).  Raises ExtensionExhausted when no field up
    to the bound works, reporting the first untried degree.
    """
    if not coeffs or all(c.is_zero() for c in coeffs):
        raise ValueError("additive polynomial must have a nonzero coefficient")
    p = coeffs[0].field.p
    base_m = 1
    for c in list(coeffs) + [rhs]:
        d = c.field.m
        base_m = base_m * d // _gcd(base_m, d)
    if max_degree is None:
        max_degree = table_bounds()[1]
    degree = base_m
    while degree <= max_degree:
        K = make_field(p, degree, ignore_bounds=True)
        solver = prepared_solver([embed(c, K) for c in coeffs], K)
        b = embed(rhs, K)
        if want_nonzero and b.is_zero():
            sol = solver.nonzero_kernel()
        else:
            sol = solver.solve([(-v) % p for v in b.coeffs])
        if sol is not None:
            return FqElement(K, tuple(sol)), K
        degree += base_m
    raise ExtensionExhausted(
        f"no solution in the pinned tower up to degree {max_degree} "
        f"(next candidate degree {degree})",
        required_degree=degree,
    )


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a
