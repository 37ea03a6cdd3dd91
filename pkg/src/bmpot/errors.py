"""Exception hierarchy.

Every error carries a short machine-readable ``code`` which the CLI prints
before the human message.
"""


class EVTError(ValueError):
    code = "evt-error"


class InvalidParameterError(EVTError):
    code = "invalid-parameter"


class InvalidArgumentError(EVTError):
    code = "invalid-argument"


class EmptySampleError(EVTError):
    code = "empty-sample"


class DegenerateSampleError(EVTError):
    code = "degenerate-sample"


class DegenerateMomentsError(EVTError):
    code = "degenerate-moments"


class PositivityError(EVTError):
    code = "positivity"


class UnsupportedTruthError(EVTError):
    code = "unsupported-truth"


class InsufficientExceedancesError(EVTError):
    code = "insufficient-exceedances"


class ThresholdTooLowError(EVTError):
    code = "threshold-too-low"


class InvalidThresholdError(EVTError):
    code = "invalid-threshold"


class ExtrapolationError(EVTError):
    code = "extrapolation-direction"


class ConfigError(EVTError):
    code = "invalid-config"
