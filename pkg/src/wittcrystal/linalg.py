"""Exact linear algebra over the chain ring W_n(F_{p^m}).

Everything here is division-free or divides only by visible units:
Berkowitz for characteristic polynomials, unit-pivot Smith normal form
for elementary-divisor valuations, and residue-field Gaussian
elimination.  SNF pivots always take a minimal-valuation entry, so every
elimination quotient is integral and the computed divisor valuations are
exact as long as they stay below the working precision; entries that
vanish mod p^n are flagged rather than guessed.
"""

import math

from .errors import InsufficientPrecision, RingMismatch


class WittMatrix:
    __slots__ = ("ring", "rows")

    def __init__(self, ring, rows):
        self.ring = ring
        self.rows = [list(r) for r in rows]

    @classmethod
    def identity(cls, ring, h):
        return cls(
            ring,
            [[ring.one if i == j else ring.zero for j in range(h)] for i in range(h)],
        )

    @classmethod
    def zero(cls, ring, h, w=None):
        w = h if w is None else w
        return cls(ring, [[ring.zero] * w for _ in range(h)])

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __add__(self, other):
        return WittMatrix(
            self.ring,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
        )

    def __sub__(self, other):
        return WittMatrix(
            self.ring,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
        )

    def __matmul__(self, other):
        if self.ring != other.ring:
            raise RingMismatch("matrix rings differ")
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            out.append(
                [
                    sum((a * b for a, b in zip(r, col)), self.ring.zero)
                    for col in cols
                ]
            )
        return WittMatrix(self.ring, out)

    def scale(self, c):
        return WittMatrix(self.ring, [[c * a for a in r] for r in self.rows])

    def sigma(self, power=1):
        return WittMatrix(
            self.ring, [[a.sigma(power) for a in r] for r in self.rows]
        )

    def transpose(self):
        return WittMatrix(self.ring, [list(r) for r in zip(*self.rows)])

    def residue(self):
        """Rows of residue-field elements."""
        return [[a.residue() for a in r] for r in self.rows]

    def eq_mod(self, other, k):
        return all(
            a.eq_mod(b, k)
            for r1, r2 in zip(self.rows, other.rows)
            for a, b in zip(r1, r2)
        )

    def map(self, fn):
        return WittMatrix(self.ring, [[fn(a) for a in r] for r in self.rows])

    def __eq__(self, other):
        return (
            isinstance(other, WittMatrix)
            and self.ring == other.ring
            and self.rows == other.rows
        )

    def __repr__(self):
        return "WittMatrix(" + ", ".join(str(r) for r in self.rows) + ")"

    def to_json(self):
        return [[a.to_json()["coeffs"] for a in r] for r in self.rows]

    # -- derived quantities ------------------------------------------------

    def charpoly(self):
        """det(X*I - A) by Berkowitz; returns [1, c_1, .., c_h] descending."""
        A = self.rows
        n = self.nrows
        ring = self.ring
        if n == 0:
            return [ring.one]
        poly = [ring.one, -A[0][0]]
        for i in range(1, n):
            a = A[i][i]
            R = [A[i][j] for j in range(i)]
            C = [A[j][i] for j in range(i)]
            M = [[A[j][k] for k in range(i)] for j in range(i)]
            col = [ring.one, -a]
            v = C
            for k in range(i):
                col.append(-_dot(R, v, ring))
                if k < i - 1:
                    v = _matvec(M, v, ring)
            new = [ring.zero] * (i + 2)
            for t in range(i + 2):
                acc = ring.zero
                for s, ps in enumerate(poly):
                    if 0 <= t - s < len(col):
                        acc = acc + col[t - s] * ps
                new[t] = acc
            poly = new
        return poly

    def det(self):
        c = self.charpoly()[-1]
        return c if self.nrows % 2 == 0 else -c

    def adjugate(self):
        """adj(A) with A*adj(A) = det(A)*I, from the characteristic polynomial."""
        cp = self.charpoly()  # X^h + c1 X^(h-1) + ... + ch
        h = self.nrows
        ring = self.ring
        acc = WittMatrix.identity(ring, h)
        out = acc.scale(cp[h - 1]) if h >= 1 else acc
        power = WittMatrix.identity(ring, h)
        for k in range(h - 2, -1, -1):
            power = power @ self
            out = out + power.scale(cp[k])
        if h % 2 == 0:
            out = out.scale(-ring.one)
        return out

    def twisted_power(self, k):
        """Matrix of F^k where F has matrix self and is sigma-linear:
        A * sigma(A) * ... * sigma^(k-1)(A)."""
        out = WittMatrix.identity(self.ring, self.nrows)
        for j in range(k):
            out = out @ self.sigma(j)
        return out


def _dot(u, v, ring):
    return sum((a * b for a, b in zip(u, v)), ring.zero)


def _matvec(M, v, ring):
    return [_dot(row, v, ring) for row in M]


def snf_valuations(mat, expected=None):
    """Valuations of the elementary divisors (Smith normal form over W_n).

    Pivots take a minimal-valuation entry, so elimination is integral and
    the reported valuations are exact.  When the remaining block vanishes
    mod p^n the leftover divisors are only known to be >= n: they are
    reported as math.inf, or InsufficientPrecision is raised when
    ``expected`` more exact divisors were required.
    """
    ring = mat.ring
    n = ring.n
    work = [list(r) for r in mat.rows]
    nrows, ncols = len(work), len(work[0]) if work else 0
    vals = []
    top = 0
    size = min(nrows, ncols)
    while top < size:
        best = None
        best_v = math.inf
        for i in range(top, nrows):
            for j in range(top, ncols):
                v = work[i][j].valuation()
                if v < best_v:
                    best_v, best = v, (i, j)
                    if v == 0:
                        break
            if best_v == 0:
                break
        if best is None:
            break  # remaining block is zero at working precision
        bi, bj = best
        work[top], work[bi] = work[bi], work[top]
        for row in work:
            row[top], row[bj] = row[bj], row[top]
        v = best_v
        pivot = work[top][top]
        unit_inv = pivot.exact_div_p(v).inverse()
        for i in range(top + 1, nrows):
            e = work[i][top]
            if e.valuation() is not math.inf:
                f = e.exact_div_p(v) * unit_inv
                work[i] = [a - f * b for a, b in zip(work[i], work[top])]
        for j in range(top + 1, ncols):
            e = work[top][j]
            if e.valuation() is not math.inf:
                f = e.exact_div_p(v) * unit_inv
                for i in range(top, nrows):
                    work[i][j] = work[i][j] - f * work[i][top]
        vals.append(v)
        top += 1
    while len(vals) < size:
        vals.append(math.inf)
    vals.sort()
    if expected is not None and any(
        v is math.inf for v in vals[:expected]
    ):
        raise InsufficientPrecision(
            f"an elementary divisor exceeds the working precision p^{n}",
            required=n + 1,
        )
    return vals


def residue_rank(rows):
    """Rank of a matrix of FqElements over their field."""
    if not rows:
        return 0
    work = [list(r) for r in rows]
    nrows, ncols = len(work), len(work[0])
    rank = 0
    for c in range(ncols):
        pivot = next(
            (i for i in range(rank, nrows) if not work[i][c].is_zero()), None
        )
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = work[rank][c].inverse()
        work[rank] = [inv * a for a in work[rank]]
        for i in range(nrows):
            if i != rank and not work[i][c].is_zero():
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def residue_kernel_dim(rows, ncols):
    return ncols - residue_rank(rows)
