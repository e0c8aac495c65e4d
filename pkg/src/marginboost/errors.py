"""Exception types shared across the toolkit."""


class MarginBoostError(Exception):
    """Base class for all toolkit errors."""


# dataset
class MissingColumnError(MarginBoostError):
    pass


class NonBinaryLabelsError(MarginBoostError):
    pass


class ParseError(MarginBoostError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class TooFewSamplesError(MarginBoostError):
    pass


class InvalidThetaError(MarginBoostError):
    pass


class InvalidParamsError(MarginBoostError):
    pass


# trees
class EmptyDataError(MarginBoostError):
    pass


class DimensionMismatchError(MarginBoostError):
    pass


# boosting / ensemble
class EmptyEnsembleError(MarginBoostError):
    pass


class StageOutOfRangeError(MarginBoostError):
    pass


# bounds
class EmptyProfileError(MarginBoostError):
    pass


class InvalidQuantileError(MarginBoostError):
    pass


class InvalidExponentError(MarginBoostError):
    pass


class NonpositiveThetaError(MarginBoostError):
    pass


class BadBinsError(MarginBoostError):
    pass


# lowerbound
class EmptyInputError(MarginBoostError):
    pass


class DeltaOutOfRangeError(MarginBoostError):
    pass


class ParamsOutOfRegimeError(MarginBoostError):
    pass


# cli
class FeatureMismatchError(MarginBoostError):
    pass
