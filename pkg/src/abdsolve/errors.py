"""Exception types shared across the library."""


class AbdError(Exception):
    """Base class for all library-specific errors."""


class ShapeMismatchError(AbdError, ValueError):
    """A block does not have the shape required by the system dimensions."""

    def __init__(self, block: str, expected, actual):
        self.block = block
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        super().__init__(
            f"block {block!r}: expected shape {self.expected}, got {self.actual}"
        )


class NonFiniteError(AbdError, ValueError):
    """A block contains NaN or infinite entries."""

    def __init__(self, block: str):
        self.block = block
        super().__init__(f"block {block!r} contains non-finite entries")


class ZeroPivotError(AbdError, ArithmeticError):
    """An unpivoted factorization met an exactly zero pivot."""

    def __init__(self, position: int, module=None):
        self.position = position
        self.module = module
        where = f" in module {module}" if module is not None else ""
        super().__init__(f"zero pivot at elimination step {position}{where}")


class ZeroDiagonalError(AbdError, ArithmeticError):
    """A non-unit triangular factor has a zero diagonal entry."""

    def __init__(self, position: int):
        self.position = position
        super().__init__(f"zero diagonal at index {position}")


class SingularSystemError(AbdError, ArithmeticError):
    """A pivot search found no usable pivot; the system is singular."""

    def __init__(self, module, position, detail="pivot search found only zeros"):
        self.module = module
        self.position = position
        super().__init__(
            f"singular system: {detail} (module {module}, step {position})"
        )


class AllZeroSegmentError(SingularSystemError):
    """Every candidate in a searched pivot segment is exactly zero."""

    def __init__(self, module=None, position=0):
        super().__init__(module, position, detail="all-zero pivot segment")


class InadmissiblePivotingError(AbdError, ValueError):
    """The requested pivoting strategy is not admissible for the method."""

    def __init__(self, method: str, strategy: str):
        self.method = method
        self.strategy = strategy
        super().__init__(f"pivoting {strategy!r} is not admissible for {method}")


class BorderedUnsupportedError(AbdError, ValueError):
    """The method has no bordered-system implementation."""

    def __init__(self, method: str):
        self.method = method
        super().__init__(f"method {method} does not support bordered systems")


class FormatError(AbdError, ValueError):
    """A data file violates the fixed block text format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)
