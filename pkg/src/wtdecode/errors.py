"""Exception hierarchy shared across the toolkit.

Three branches map onto the CLI exit codes: ValidationError (bad config or
malformed input files, exit 1), DataError (failures while processing
well-formed inputs, exit 2), InvariantError (a probability-axiom bound the
implementation must never violate, exit 3).
"""


class WtdecodeError(Exception):
    pass


class ValidationError(WtdecodeError):
    pass


class DataError(WtdecodeError):
    pass


class InvariantError(WtdecodeError):
    pass


class VocabError(ValidationError):
    pass


class ModelFileError(ValidationError):
    pass


class RecordError(ValidationError):
    """A LogprobRecord failed schema or invariant validation."""


class ConfigError(ValidationError):
    pass


class UnknownTokenError(DataError):
    def __init__(self, surface):
        super().__init__(f"unknown token: {surface!r}")
        self.surface = surface


class TokenizeError(DataError):
    def __init__(self, text, offset):
        super().__init__(f"no vocabulary match at offset {offset}: {text[offset:offset + 12]!r}")
        self.offset = offset


class RescalingError(DataError):
    """Boundary-mass denominator is zero, so trailing-whitespace rescaling is undefined."""


class EnumerationBudgetError(DataError):
    pass


class AlignmentError(DataError):
    pass


class SingularDesignError(DataError):
    def __init__(self, columns):
        super().__init__(f"design matrix is rank deficient; collinear columns: {', '.join(columns)}")
        self.columns = list(columns)


class ComparisonError(DataError):
    """Fit results are not nested or not over the same response."""


class EstimationError(DataError):
    pass
