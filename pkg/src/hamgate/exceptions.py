class ValidationError(ValueError):
    """Input failed a structural or numerical check (shape, unitarity, ...)."""


class CapacityError(ValueError):
    """Requested object exceeds the dense-simulation size limits."""


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or is inconsistent."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
