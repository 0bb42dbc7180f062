"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class UniqError(Exception):
    exit_code = 1


class InputError(UniqError):
    """Malformed or out-of-contract input."""
    exit_code = 3


class MalformedDocument(InputError):
    pass


class OperandOutOfRange(InputError):
    pass


class DuplicateOperand(InputError):
    pass


class UnsupportedStatement(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class BadNodeCount(InputError):
    pass


class DisconnectedTopology(InputError):
    def __init__(self, unreachable: list[int]):
        super().__init__(f"nodes unreachable from node 0: {unreachable}")
        self.unreachable = unreachable


class MappingMismatch(InputError):
    pass


class MissingCost(InputError):
    pass


class Infeasible(UniqError):
    """The instance admits no plan (e.g. total capacity below qubit count)."""
    exit_code = 2


class LimitError(UniqError):
    exit_code = 4


class HorizonExhausted(LimitError):
    pass


class TooLarge(LimitError):
    pass
