"""Exception hierarchy shared by every module."""


class DetsumError(Exception):
    """Base class for all library errors."""


class DependentBasis(DetsumError, ValueError):
    pass


class RadiusTooLarge(DetsumError):
    """The requested ball would exceed the enumeration node budget."""

    def __init__(self, estimate: float, budget: float):
        super().__init__(
            f"estimated {estimate:.3g} lattice points exceeds node budget {budget:.3g}"
        )
        self.estimate = estimate
        self.budget = budget


class ExactOverflow(DetsumError):
    """Exact determinant values would not fit the 64-bit fast path."""


class InvalidFieldData(DetsumError, ValueError):
    pass


class UnsupportedIndex(DetsumError, ValueError):
    pass


class NvdViolation(DetsumError):
    """A nonzero lattice point with vanishing determinant was found."""

    def __init__(self, coeffs):
        super().__init__(f"zero determinant at coefficient vector {list(coeffs)}")
        self.coeffs = tuple(int(c) for c in coeffs)


class ZeroDeterminantEncountered(NvdViolation):
    pass


class NotANumberFieldLattice(DetsumError, TypeError):
    pass


class InsufficientRange(DetsumError, ValueError):
    pass


class OutOfRegime(DetsumError, ValueError):
    pass


class OddIndexRamified(DetsumError, ValueError):
    pass


class RankTooSmall(DetsumError, ValueError):
    pass


class NonUniqueMinimum(DetsumError):
    pass


class UnsupportedLattice(DetsumError, ValueError):
    pass
