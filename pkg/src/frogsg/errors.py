"""Exception hierarchy shared by every module of the package."""


class FrogError(Exception):
    """Base class for all package errors."""


class ParameterError(FrogError, ValueError):
    """An argument is outside its documented domain."""


class NumericError(FrogError, ArithmeticError):
    """A numerical step produced a singular or non-finite result."""


class DivergenceError(NumericError):
    """The solver produced a non-finite iterate.

    Attributes
    ----------
    iteration : int
        Index of the update that produced the non-finite value.
    """

    def __init__(self, iteration: int, message: str | None = None):
        self.iteration = iteration
        super().__init__(message or f"non-finite iterate at iteration {iteration}")


class ParseError(FrogError, ValueError):
    """A pulse, trace or config file could not be parsed.

    Attributes
    ----------
    line : int or None
        1-based line number of the offending line, when known.
    """

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
