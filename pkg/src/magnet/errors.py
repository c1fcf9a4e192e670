"""Exception types shared across the package."""


class MagnetError(Exception):
    """Base class for all domain errors raised by this package."""


class LexError(MagnetError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class ParseError(MagnetError):
    """Syntax error: carries what the parser expected and what it found."""

    def __init__(self, expected: str, found: str, line: int, col: int):
        super().__init__(f"{line}:{col}: expected {expected}, found {found}")
        self.expected = expected
        self.found = found
        self.line = line
        self.col = col


class UnsupportedConstruct(MagnetError):
    def __init__(self, construct: str, line: int, col: int):
        super().__init__(f"{line}:{col}: unsupported construct: {construct}")
        self.construct = construct
        self.line = line
        self.col = col


class ShapeMismatch(MagnetError):
    def __init__(self, op: str, *shapes):
        super().__init__(f"{op}: incompatible shapes {' vs '.join(str(s) for s in shapes)}")
        self.op = op
        self.shapes = shapes


class NotScalar(MagnetError):
    pass


class IndexOutOfVocab(MagnetError):
    pass


class ViewMismatch(MagnetError):
    pass


class EmptyGraph(MagnetError):
    pass


class ZeroVector(MagnetError):
    pass


class LengthMismatch(MagnetError):
    pass


class FormatError(MagnetError):
    def __init__(self, path: str, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno
        self.message = message


class DegenerateLabels(MagnetError):
    pass


class CheckpointError(MagnetError):
    pass
