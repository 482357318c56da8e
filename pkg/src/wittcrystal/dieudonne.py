"""Dieudonne modules over W_n(F_{p^m}) presented by Frobenius matrices.

Convention, fixed once: F(e_j) = sum_i A[i][j] e_i with F sigma-linear,
so F(sum c_j e_j) = sum sigma(c_j) F(e_j), and the matrix of a composite
F o G is A * sigma(B).  The Verschiebung matrix B is recovered from
A * sigma(B) = p * Id; it is integral exactly when every elementary
divisor of A has valuation <= 1, which is the module-side statement of
FV = VF = p.

Every module records the precision to which its matrix is guaranteed.
Operations that divide by p (the V-matrix, hence duals) return modules
with reduced guaranteed precision instead of silently wrong digits.
"""

import math
from enum import Enum
from fractions import Fraction

from .errors import (
    InsufficientPrecision,
    InvalidSlopeData,
    NotEllipticShape,
    NotRankTwo,
    RingMismatch,
)
from .linalg import WittMatrix, residue_rank, snf_valuations
from .witt import witt_ring


class FLattice:
    """Free W_n-module with an injective sigma-linear F (no pM <= FM demand)."""

    kind = "f_lattice"

    def __init__(self, ring, A, prec=None, check=True):
        if not isinstance(A, WittMatrix):
            A = WittMatrix(ring, [[ring.element(e) for e in row] for row in A])
        self.ring = ring
        self.A = A
        self.h = A.nrows
        self.prec = ring.n if prec is None else prec
        if check:
            if A.nrows != A.ncols:
                raise InvalidSlopeData("Frobenius matrix must be square")
            if self.det_valuation() is math.inf:
                raise InsufficientPrecision(
                    f"det(A) vanishes mod p^{ring.n}; F not visibly injective",
                    required=ring.n + 1,
                )

    def det_valuation(self):
        return self.A.det().valuation()

    def hodge_valuations(self):
        """Elementary divisor valuations of A (the Hodge polygon of F)."""
        return snf_valuations(self.A, expected=self.h)

    def base_change(self, target_field):
        """Same matrix with entries transported along the pinned embedding."""
        target = witt_ring(target_field, self.ring.n)
        moved = self.A.map(lambda e: e.lift_to(target))
        return type(self)(target, WittMatrix(target, moved.rows), prec=self.prec)

    def direct_sum(self, other):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        h1, h2 = self.h, other.h
        z = self.ring.zero
        rows = []
        for i in range(h1):
            rows.append(list(self.A.rows[i]) + [z] * h2)
        for i in range(h2):
            rows.append([z] * h1 + list(other.A.rows[i]))
        return type(self)(
            self.ring, WittMatrix(self.ring, rows), prec=min(self.prec, other.prec)
        )

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.ring == other.ring
            and self.A == other.A
        )

    def __repr__(self):
        return f"{type(self).__name__}(rank {self.h} over {self.ring})"

    def to_json(self):
        return {
            "ring": {"p": self.ring.p, "m": self.ring.m, "n": self.ring.n},
            "h": self.h,
            "A": self.A.to_json(),
            "kind": self.kind,
        }


class DieudonneModule(FLattice):
    """F-lattice with pM <= FM, i.e. FV = VF = p with integral V."""

    kind = "dieudonne"

    def __init__(self, ring, A, prec=None, check=True):
        super().__init__(ring, A, prec=prec, check=check)
        if check:
            if self.prec < 2:
                raise InsufficientPrecision(
                    "validity needs precision >= 2", required=2
                )
            divisors = self.hodge_valuations()
            if any(v > 1 for v in divisors):
                raise InvalidSlopeData(
                    f"elementary divisors {divisors} exceed 1: pM is not "
                    "contained in FM, so FV = VF = p fails integrally"
                )
        self._B = None
        self._B_prec = None

    def v_matrix(self):
        """Matrix B of V, with A * sigma(B) = p * Id.

        B = sigma^(-1)(adj(A) / p^(w-1) * unit(det)^(-1)) where
        w = v(det A).  The unit part of det is only known mod p^(n-w),
        so B is guaranteed mod p^(n-w) (mod p^n when w = 0); query
        ``v_matrix_precision()``.
        """
        if self._B is None:
            w = self.det_valuation()
            n = self.ring.n
            if w >= n:
                raise InsufficientPrecision(
                    f"v(det A) = {w} >= precision {n}", required=w + 2
                )
            det = self.A.det()
            unit_inv = det.exact_div_p(w).inverse()
            C = self.A.adjugate()
            if w > 0:
                C = C.map(lambda e: e.exact_div_p(w - 1))
            else:
                C = C.scale(self.ring.element([self.ring.p]))
            C = C.scale(unit_inv)
            self._B = C.sigma(-1)
            self._B_prec = min(self.prec, n - w if w > 0 else n)
        return self._B

    def v_matrix_precision(self):
        self.v_matrix()
        return self._B_prec

    def a_number(self):
        """dim_k M/(F, V)M = h - rank of the mod-p column span of (A | B)."""
        B = self.v_matrix()
        if self.v_matrix_precision() < 1:
            raise InsufficientPrecision("V-matrix unknown even mod p", required=self.h + 2)
        rows = [
            ra + rb for ra, rb in zip(self.A.residue(), B.residue())
        ]
        return self.h - residue_rank(rows)

    def dim_mod_FM(self):
        """dim_k M/FM = sum of the elementary divisor valuations of A."""
        return sum(self.hodge_valuations())

    def dim_mod_VM(self):
        return sum(snf_valuations(self.v_matrix(), expected=self.h))

    def dual(self):
        """The dual module: F acts on f by F(f)(x) = f(V(x))^sigma.

        In the dual basis the F-matrix is sigma(B^T).  Applying dual
        twice gives back the original F-matrix on the nose (at the
        guaranteed precision).
        """
        B = self.v_matrix()
        return DieudonneModule(
            self.ring,
            B.transpose().sigma(),
            prec=self.v_matrix_precision(),
        )

    def is_superspecial(self):
        """a(M) = h/2 with h even and pure slope 1/2 (certificate triple)."""
        from .isocrystal import slopes_by_matrix

        if self.h % 2 != 0 or self.a_number() != self.h // 2:
            return False
        seq = slopes_by_matrix(self)
        return seq.entries == [(Fraction(1, 2), self.h)]


class Rank2Class(Enum):
    Ordinary_M1 = "Ordinary_M1"
    Supersingular_M2 = "Supersingular_M2"


def std_module(kind, ring, a=None, b=None, slope=None):
    """The paper's standard modules.

    kind: "M1", "M2", "M_ab" (with coprime a, b) or "M_lambda" (with
    ``slope``).  M_ab(a, b) is the rank a+b cyclic module where F walks
    the basis once around, picking up b factors of p; M_lambda(s/r) is
    the pi-power lattice where F shifts by s, a Dieudonne module exactly
    when 0 <= s <= r (otherwise an FLattice is returned).
    """
    z, o = ring.zero, ring.one
    p_elt = ring.element([ring.p])
    if kind == "M1":
        return DieudonneModule(ring, WittMatrix(ring, [[o, z], [z, p_elt]]))
    if kind == "M2":
        return DieudonneModule(ring, WittMatrix(ring, [[z, p_elt], [o, z]]))
    if kind == "M_ab":
        if a is None or b is None or a < 0 or b < 0 or (a, b) == (0, 0):
            raise InvalidSlopeData("M_ab needs nonnegative (a, b) != (0, 0)")
        if math.gcd(a, b) != 1:
            raise InvalidSlopeData(f"gcd({a}, {b}) != 1")
        h = a + b
        rows = [[z] * h for _ in range(h)]
        for j in range(1, h + 1):
            target = j % h  # F(u_j) lands on u_{j+1}, wrapping to u_1
            rows[target][j - 1] = p_elt if j <= b else o
        return DieudonneModule(ring, WittMatrix(ring, rows))
    if kind == "M_lambda":
        lam = Fraction(slope)
        s, r = lam.numerator, lam.denominator
        if s < 0:
            raise InvalidSlopeData(f"slope {lam} < 0 is not effective")
        rows = [[z] * r for _ in range(r)]
        for i in range(r):
            q, target = divmod(i + s, r)
            rows[target][i] = ring.element([ring.p]) ** q if q else o
        M = WittMatrix(ring, rows)
        if s <= r:
            return DieudonneModule(ring, M)
        return FLattice(ring, M)
    raise InvalidSlopeData(f"unknown standard module kind {kind!r}")


def classify_rank2(M):
    """Ordinary/supersingular decision for rank-2 elliptic-curve modules.

    Requires dim M/FM = dim M/VM = 1.  The module is ordinary iff
    F and V have distinct images mod p, equivalently a(M) = 0.
    """
    if M.h != 2:
        raise NotRankTwo(f"rank {M.h}")
    if M.dim_mod_FM() != 1 or M.dim_mod_VM() != 1:
        raise NotEllipticShape(
            "need dim M/FM = dim M/VM = 1 for the elliptic dichotomy"
        )
    a = M.a_number()
    return Rank2Class.Supersingular_M2 if a == 1 else Rank2Class.Ordinary_M1


# spec operation names as free functions

def a_number(M):
    return M.a_number()


def dual(M):
    return M.dual()


def direct_sum(M, N):
    return M.direct_sum(N)


def base_change(M, target_field):
    return M.base_change(target_field)
