"""Shared exception types.

ShapeError   operand shapes violate an operation's contract
FormatError  a binary or CSV artifact is malformed or truncated
DataError    inputs are structurally valid but semantically unusable
             (misaligned grids, unknown class codes, empty datasets, ...)
"""


class ShapeError(ValueError):
    pass


class FormatError(ValueError):
    pass


class DataError(ValueError):
    pass
