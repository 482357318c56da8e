"""Dense polynomial arithmetic over F_p.

Polynomials are lists of ints in [0, p), ascending degree, no trailing
zeros ([] is the zero polynomial).  This is deliberately minimal: just
what the modulus table, irreducibility testing and the additive-equation
solver need.
"""


def trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def add(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return trim(out)


def sub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return trim(out)


def mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return trim(out)


def divmod_(a, b, p):
    """Euclidean division; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = trim(list(a))
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], a
    q = [0] * (len(a) - db)
    inv_lead = pow(b[-1], -1, p)
    for shift in range(len(a) - db - 1, -1, -1):
        c = a[shift + db]
        if c:
            factor = (c * inv_lead) % p
            q[shift] = factor
            for i, bc in enumerate(b):
                a[shift + i] = (a[shift + i] - factor * bc) % p
    return trim(q), trim(a)


def mod(a, b, p):
    return divmod_(a, b, p)[1]


def mulmod(a, b, f, p):
    return mod(mul(a, b, p), f, p)


def powmod(a, e, f, p):
    """a^e mod f, nonnegative e."""
    result = [1]
    base = mod(a, f, p)
    while e:
        if e & 1:
            result = mulmod(result, base, f, p)
        base = mulmod(base, base, f, p)
        e >>= 1
    return result


def gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, mod(a, b, p)
    if a and a[-1] != 1:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def eval_at(a, x, p):
    y = 0
    for c in reversed(a):
        y = (y * x + c) % p
    return y


def is_irreducible(f, p):
    """Rabin irreducibility test for monic f of degree >= 1."""
    m = len(f) - 1
    if m <= 0:
        return False
    x = [0, 1]
    # x^(p^m) == x mod f
    t = x
    for _ in range(m):
        t = powmod(t, p, f, p)
    if sub(t, x, p):
        return False
    # gcd(x^(p^(m/l)) - x, f) == 1 for prime divisors l of m
    for ell in _prime_divisors(m):
        t = x
        for _ in range(m // ell):
            t = powmod(t, p, f, p)
        if len(gcd(sub(t, x, p), f, p)) != 1:
            return False
    return True


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
