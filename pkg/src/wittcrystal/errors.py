"""Exception hierarchy shared by all wittcrystal modules."""


class WittCrystalError(Exception):
    """Base class for all library errors."""


class UnsupportedField(WittCrystalError):
    """Requested (p, m) lies outside the pinned modulus table."""


class NoEmbedding(WittCrystalError):
    """No distinguished embedding exists between the given fields."""


class ExtensionExhausted(WittCrystalError):
    """No pinned-tower extension is large enough to solve the equation.

    Carries ``required_degree``: the smallest extension degree that was not
    available (solutions, if any, need at least this much room).
    """

    def __init__(self, message, required_degree=None):
        super().__init__(message)
        self.required_degree = required_degree


class NotAUnit(WittCrystalError):
    """Inversion was requested for an element of positive valuation."""


class OracleMismatch(WittCrystalError):
    """The Witt-polynomial oracle disagrees with the fast representation.

    Carries the offending operands as ``counterexample``.
    """

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class InvalidSlopeData(WittCrystalError):
    """Slope parameters violate their preconditions (gcd, sign, range)."""


class RingMismatch(WittCrystalError):
    """Operands belong to different rings."""


class NotRankTwo(WittCrystalError):
    """classify_rank2 requires a rank-2 module."""


class NotEllipticShape(WittCrystalError):
    """classify_rank2 requires dim M/FM = dim M/VM = 1."""


class InsufficientPrecision(WittCrystalError):
    """The answer cannot be certified at the working precision.

    Carries ``required`` when a sufficient precision is known.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class PrecisionLoss(Warning):
    """Data about reduced guaranteed precision (sigma-linear solver, beta < 0)."""


class DimensionMismatch(WittCrystalError):
    """Deformation data dimensions are inconsistent with the base datum."""


class NotSuperspecialShape(WittCrystalError):
    """The Norman datum is not in the superspecial normal form."""


class OutOfRange(WittCrystalError):
    """Argument outside the supported desk-scale range."""


class EvenPrime(WittCrystalError):
    """The class-number formula evaluation needs an odd prime."""


class NotReduced(WittCrystalError):
    """A slope fraction was not in lowest terms."""
