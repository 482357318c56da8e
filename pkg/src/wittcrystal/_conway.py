"""Computation of Conway polynomials.

The pinned modulus table uses Conway polynomials: the lexicographically
least monic primitive polynomial of degree m over F_p (in the standard
twisted-sign word order) whose root's norms down the tower hit the roots
of the smaller Conway polynomials.  Those norm conditions are what make
the distinguished embeddings F_{p^d} -> F_{p^m} (d | m) compose
compatibly.

The search enumerates candidate words in order, so the first survivor is
the Conway polynomial.  Compatibility is only tested against maximal
proper subfields; compatibility with the rest follows by transitivity of
norms.  The inner loop packs F_p[x] into integers (Kronecker
substitution) so that polynomial products ride on bignum multiplication.
"""

from sympy import factorint, isprime

from . import _polyfp as fp
from .errors import UnsupportedField


def smallest_primitive_root(p):
    if p == 2:
        return 1
    fac = list(factorint(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in fac):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")  # unreachable for prime p


class _PackedModRing:
    """F_p[x]/(f) with elements packed into single integers.

    Coefficients occupy ``bits`` bits each; ``bits`` is chosen so that a
    full convolution cannot overflow a slot before reduction.
    """

    def __init__(self, f, p):
        self.p = p
        self.f = f
        self.m = len(f) - 1
        self.bits = max(2, (8 * self.m * (p - 1) * (p - 1)).bit_length() + 1)
        self.mask = (1 << self.bits) - 1
        # reduction table: x^(m+i) mod f for i = 0..m-2, packed
        red = []
        cur = [-c % p for c in f[:-1]]  # x^m mod f
        for _ in range(self.m - 1):
            red.append(self.pack(cur))
            cur = [0] + cur
            lead = cur.pop()
            if lead:
                cur = [(c - lead * fc) % p for c, fc in zip(cur, f[:-1])]
        self.red = red

    def pack(self, coeffs):
        v = 0
        for c in reversed(coeffs):
            v = (v << self.bits) | (c % self.p)
        return v

    def unpack(self, v, length):
        out = []
        for _ in range(length):
            out.append(v & self.mask)
            v >>= self.bits
        return out

    def normalize(self, v, length):
        return self.pack([c % self.p for c in self.unpack(v, length)])

    def mulmod(self, a, b):
        prod = self.unpack(a * b, 2 * self.m - 1)
        head = [c % self.p for c in prod[: self.m]]
        for i, c in enumerate(prod[self.m :]):
            c %= self.p
            if c:
                tail = self.unpack(self.red[i], self.m)
                head = [(h + c * t) % self.p for h, t in zip(head, tail)]
        return self.pack(head)

    def powmod(self, a, e):
        result = self.pack([1])
        base = a
        while e:
            if e & 1:
                result = self.mulmod(result, base)
            base = self.mulmod(base, base)
            e >>= 1
        return result


def _word_to_poly(word, p, m):
    # word = (w_{m-1}, ..., w_0) with w_i = (-1)^(m-i) a_i in F_p
    coeffs = [0] * (m + 1)
    coeffs[m] = 1
    for i in range(m):
        w = word[m - 1 - i]
        coeffs[i] = w % p if (m - i) % 2 == 0 else (-w) % p
    return coeffs


def conway_polynomial(p, m, lower):
    """Conway polynomial of degree m, given dict ``lower`` of smaller ones.

    ``lower`` must contain the Conway polynomial for every proper divisor
    of m.  Returns coefficients ascending, length m + 1, monic.
    """
    if not isprime(p):
        raise UnsupportedField(f"{p} is not prime")
    g = smallest_primitive_root(p)
    if m == 1:
        return [(-g) % p, 1]

    q = p**m - 1
    cofactors = [q // ell for ell in factorint(q)]
    maximal = sorted({m // ell for ell in fp._prime_divisors(m)}, reverse=True)
    norm_data = []
    for d in maximal:
        if d not in lower:
            raise ValueError(f"missing Conway polynomial for degree {d}")
        norm_data.append((q // (p**d - 1), lower[d]))

    # The norm down to F_p is (-1)^m a_0 = w_0, and compatibility with the
    # degree-1 polynomial forces w_0 = g.  Enumerate the remaining word
    # digits (w_{m-1}, ..., w_1) in lexicographic order.  The subfield-norm
    # conditions are the most selective filters, so they run first.
    word = [0] * (m - 1) + [g]
    while True:
        f = _word_to_poly(word, p, m)
        ring = _PackedModRing(f, p)
        x = ring.pack([0, 1])
        ok = True
        for exponent, smaller in norm_data:
            y = ring.powmod(x, exponent)
            acc = ring.pack([])
            for c in reversed(smaller):
                acc = ring.mulmod(acc, y)
                if c:
                    acc = (acc + c) & ~0  # add constant in slot 0
                    acc = ring.normalize(acc, ring.m)
            if acc:
                ok = False
                break
        if ok and fp.is_irreducible(f, p):
            if all(ring.powmod(x, cof) != ring.pack([1]) for cof in cofactors):
                return f
        # increment word (w_{m-1}, ..., w_1); w_0 stays pinned at g
        i = m - 2
        while i >= 0:
            word[i] += 1
            if word[i] < p:
                break
            word[i] = 0
            i -= 1
        if i < 0:
            raise ArithmeticError(
                f"exhausted degree-{m} candidates over F_{p}"
            )  # cannot happen: Conway polynomials exist


def conway_table(p, max_degree):
    """All Conway polynomials for degrees 1..max_degree over F_p."""
    table = {}
    for m in range(1, max_degree + 1):
        table[m] = conway_polynomial(p, m, table)
    return table
