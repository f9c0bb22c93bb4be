"""Exception hierarchy shared by every module."""


class CfcError(Exception):
    """Base class for all library errors."""


class DimensionError(CfcError, ValueError):
    pass


class SingularError(CfcError, ArithmeticError):
    pass


class ParseError(CfcError, ValueError):
    def __init__(self, message, position=None, row=None, col=None):
        self.position = position
        self.row = row
        self.col = col
        where = []
        if position is not None:
            where.append(f"position {position}")
        if row is not None:
            where.append(f"row {row}, col {col}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class InvalidBlock(CfcError, ValueError):
    pass


class CensusError(CfcError):
    pass


class NotSymmetric(CfcError, ValueError):
    pass


class InvalidRequest(CfcError, ValueError):
    pass


class NotSimilar(CfcError):
    """Certain: the two matrices are not similar."""


class SimilaritySearchExhausted(CfcError):
    """Inconclusive: a similarity may exist but none was found."""


class SqrtFailure(CfcError):
    pass


class NotCongruent(CfcError):
    """Certain: the cosquares are not similar."""


class CongruenceNotFound(CfcError):
    """Inconclusive failure of the congruence search."""


class UnsupportedAbsorption(CfcError, ValueError):
    pass


class UnpairedH4Error(CfcError):
    pass


class ConstructionBudgetExhausted(CfcError):
    pass
