"""Exception hierarchy shared by all troplib modules."""


class TropError(Exception):
    """Base class for all library errors."""

    code = "TropError"

    def to_json(self):
        return {"error": self.code, "message": str(self)}


class InputError(TropError):
    """Malformed or out-of-contract input."""

    code = "InputError"


class DimensionMismatch(InputError):
    code = "DimensionMismatch"


class SingularMatrix(InputError):
    code = "SingularMatrix"


class IndeterminateSign(TropError):
    """Interval evaluation could not certify a sign within the refinement budget."""

    code = "IndeterminateSign"


class NonzeroDegree(InputError):
    code = "NonzeroDegree"


class DegreeMismatch(InputError):
    code = "DegreeMismatch"


class NonCompact(InputError):
    code = "NonCompact"


class NonIntegerSlope(InputError):
    code = "NonIntegerSlope"


class UnsupportedWeights(InputError):
    code = "UnsupportedWeights"


class UnbalancedInput(InputError):
    code = "UnbalancedInput"


class InputNotBalanced(InputError):
    code = "InputNotBalanced"


class HypothesisFailed(TropError):
    """A hypothesis of a non-existence certificate does not hold."""

    code = "HypothesisFailed"

    def __init__(self, hypothesis, detail=""):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {detail}" if detail else hypothesis)

    def to_json(self):
        return {"error": self.code, "hypothesis": self.hypothesis, "message": str(self)}


class NotRegular(InputError):
    code = "NotRegular"


class WindowTooSmall(TropError):
    code = "WindowTooSmall"


class SearchExhausted(TropError):
    code = "SearchExhausted"


class NotOnCircle(InputError):
    code = "NotOnCircle"


class SumMismatch(TropError):
    """Four points on a circle whose coordinate sums differ; no relation exists."""

    code = "SumMismatch"


class ZeroPolynomial(InputError):
    code = "ZeroPolynomial"


class ZeroCoordinate(InputError):
    code = "ZeroCoordinate"


class DegenerateSupport(InputError):
    code = "DegenerateSupport"


class UnsupportedDimension(InputError):
    code = "UnsupportedDimension"


class ParseError(InputError):
    code = "ParseError"
