"""Exception types raised across the package."""


class IsacError(ValueError):
    """Base class for invalid inputs and ill-posed problems."""


class InfeasibleError(IsacError):
    """The requested received-power threshold exceeds what the budget can deliver."""

    def __init__(self, gamma: float, gamma_max: float):
        self.gamma = gamma
        self.gamma_max = gamma_max
        super().__init__(
            f"threshold Gamma={gamma!r} mW exceeds Gamma_max={gamma_max!r} mW"
        )


class UnidentifiableError(IsacError):
    """The Fisher information is singular or too ill-conditioned to invert."""

    def __init__(self, message: str, direction: str | None = None):
        self.direction = direction
        super().__init__(message)


class ConfigError(IsacError):
    """Bad configuration file content."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
