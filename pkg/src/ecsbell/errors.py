"""Exception types shared across the package."""


class EcsBellError(Exception):
    """Base class for all package errors."""


class TruncationError(EcsBellError):
    """A Fock-space truncation is too small for the requested amplitude."""

    def __init__(self, amplitude, dim, required_dim, tail=None):
        self.amplitude = amplitude
        self.dim = dim
        self.required_dim = required_dim
        self.tail = tail
        msg = (f"Fock dimension {dim} too small for amplitude |A|={abs(amplitude):.6g}; "
               f"need dim >= {required_dim}")
        if tail is not None:
            msg += f" (discarded Poisson mass {tail:.3e})"
        super().__init__(msg)


class DimensionError(EcsBellError, ValueError):
    """Operands live on incompatible or oversized spaces."""


class DegenerateStateError(EcsBellError, ValueError):
    """The requested superposition has vanishing norm."""


class DomainError(EcsBellError, ValueError):
    """A parameter lies outside the domain of a closed-form rule."""


class StepSizeFailure(EcsBellError):
    """The time integrator could not reach the requested accuracy."""


class ConfigError(EcsBellError, ValueError):
    """An invalid sweep configuration (carries file/line/field context)."""

    def __init__(self, message, *, field=None, line=None, path=None):
        self.message = message
        self.field = field
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
