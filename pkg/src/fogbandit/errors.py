"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid game or experiment configuration (bad shapes, ranges, params)."""


class ProtocolError(RuntimeError):
    """Learner driven out of its act/observe contract."""


class FeedbackError(ValueError):
    """Non-finite or otherwise unusable feedback handed to a learner."""


class IngestionError(ValueError):
    """Malformed dataset file; message carries row/column location."""


class EquilibriumError(RuntimeError):
    """Equilibrium solver diagnostics, e.g. independent starts disagree."""
