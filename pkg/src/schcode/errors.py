"""Exception types shared across the schcode package."""

from __future__ import annotations


class SchcodeError(Exception):
    """Base class for all schcode errors."""


class SExprError(SchcodeError):
    """Base class for s-expression syntax errors; carries line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class UnbalancedParen(SExprError):
    pass


class UnterminatedString(SExprError):
    pass


class InvalidToken(SExprError):
    pass


class DepthExceeded(SExprError):
    pass


class NotASchematic(SchcodeError):
    pass


class MissingField(SchcodeError):
    def __init__(self, tag: str, field: str):
        super().__init__(f"node '{tag}' is missing required field '{field}'")
        self.tag = tag
        self.field = field


class DuplicateReference(SchcodeError):
    def __init__(self, reference: str):
        super().__init__(f"duplicate reference '{reference}'")
        self.reference = reference


class UnresolvedLibId(SchcodeError):
    def __init__(self, lib_id: str):
        super().__init__(f"unresolved lib_id '{lib_id}'")
        self.lib_id = lib_id


class NotALibrary(SchcodeError):
    pass


class DuplicateSymbolName(SchcodeError):
    def __init__(self, name: str):
        super().__init__(f"duplicate symbol name '{name}'")
        self.name = name


class NoSuchPin(SchcodeError):
    def __init__(self, query: str):
        super().__init__(f"no pin matches '{query}'")
        self.query = query


class AmbiguousPinName(SchcodeError):
    def __init__(self, query: str, count: int):
        super().__init__(f"pin name '{query}' matches {count} pins and no id")
        self.query = query
        self.count = count


class ZeroPassRatio(SchcodeError):
    pass


class EmptyInput(SchcodeError):
    pass


class ProgramSyntaxError(SchcodeError):
    """Raised by the program parser; converted to a SyntaxError ExecError."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class PairingError(SchcodeError):
    """A prediction file has no ground-truth counterpart."""

    def __init__(self, name: str):
        super().__init__(f"no ground truth found for '{name}'")
        self.name = name
