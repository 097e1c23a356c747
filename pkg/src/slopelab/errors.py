"""Exception hierarchy shared by all slopelab modules."""


class SlopelabError(Exception):
    """Base class; ``code`` is the stable name used in CLI diagnostics."""

    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class MixedFieldsError(SlopelabError, TypeError):
    code = "MixedFields"


class ExactDivisionByZero(SlopelabError, ZeroDivisionError):
    code = "DivisionByZero"


class ScalarParseError(SlopelabError, ValueError):
    code = "ScalarParse"


class AtBreakpoint(SlopelabError, ValueError):
    code = "AtBreakpoint"


class OutOfDomain(SlopelabError, ValueError):
    code = "OutOfDomain"


class DomainMismatch(SlopelabError, ValueError):
    code = "DomainMismatch"


class NonSigmaFinite(SlopelabError, ValueError):
    code = "NonSigmaFinite"


class InfinitePerPeriod(SlopelabError, ValueError):
    code = "InfinitePerPeriod"


class NotEigen(SlopelabError, ValueError):
    code = "NotEigen"


class NotProbability(SlopelabError, ValueError):
    code = "NotProbability"


class NotMarkov(SlopelabError, ValueError):
    code = "NotMarkov"


class ReducibleMatrix(SlopelabError, ValueError):
    """Raised by the Perron solver; ``components`` lists the strongly
    connected classes so callers can inspect the block structure."""

    code = "Reducible"

    def __init__(self, message, components=()):
        super().__init__(message)
        self.components = [list(c) for c in components]

    def to_dict(self):
        d = super().to_dict()
        d["components"] = self.components
        return d


class BelowThreshold(SlopelabError, ValueError):
    code = "BelowThreshold"


class NotConstantSlope(SlopelabError, ValueError):
    code = "NotConstantSlope"


class NotDegreeOne(SlopelabError, ValueError):
    code = "NotDegreeOne"


class NoSignChange(SlopelabError, ValueError):
    code = "NoSignChange"


class HypothesisViolated(SlopelabError, ValueError):
    code = "HypothesisViolated"

    def __init__(self, hypothesis, where=None):
        msg = hypothesis if where is None else f"{hypothesis} (at {where})"
        super().__init__(msg)
        self.hypothesis = hypothesis
        self.where = where

    def to_dict(self):
        d = super().to_dict()
        d["hypothesis"] = self.hypothesis
        if self.where is not None:
            d["where"] = str(self.where)
        return d
