class TactError(Exception):
    """Base class for all errors raised by the engine."""


class ParseError(TactError):
    def __init__(self, message, line=0, col=0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class EvalError(TactError):
    """Runtime failure while executing a message server."""


class StaticCheckError(TactError):
    """Raised when a model with diagnostics is used where a clean one is required."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))
