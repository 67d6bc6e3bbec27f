"""Exception hierarchy shared by every module."""


class ZetaSizeError(Exception):
    """Base class for all errors raised by the package."""


class NonConvergence(ZetaSizeError):
    pass


class ZeroPolynomial(ZetaSizeError):
    pass


class TooLarge(ZetaSizeError):
    """Combinatorial guard tripped; use the scalable variant instead."""


class DegenerateExponents(ZetaSizeError):
    """An exponent pair sits on one of the excluded lines nu*eps + 2 = (N-k)*delta."""

    def __init__(self, message: str, nu: int | None = None, k: int | None = None):
        super().__init__(message)
        self.nu = nu
        self.k = k


# Spelled both ways in the op contracts.
Degenerate = DegenerateExponents
DegenerateExponent = DegenerateExponents


class RootsOutsideHalfDisk(ZetaSizeError):
    pass


class ZeroNumerator(ZetaSizeError):
    pass


class MultipleRoots(ZetaSizeError):
    pass


class RangeViolation(ZetaSizeError):
    pass


class ScaleOrderViolation(ZetaSizeError):
    pass


class NormGateViolated(ZetaSizeError):
    pass


NormConditionViolated = NormGateViolated


class NoStabilization(ZetaSizeError):
    pass


class OracleBudgetExhausted(ZetaSizeError):
    pass


class MixedFinitenessDisagreement(ZetaSizeError):
    def __init__(self, message: str, instances=()):
        super().__init__(message)
        self.instances = list(instances)


class ZeroGerm(ZetaSizeError):
    pass


class AllZero(ZetaSizeError):
    pass


class NoFiniteOrder(ZetaSizeError):
    pass


class RootCountMismatch(ZetaSizeError):
    pass


class BracketInvalid(ZetaSizeError):
    pass


class BaseDiverges(ZetaSizeError):
    pass


class CaseNotCovered(ZetaSizeError):
    pass
