"""Exception types shared across the package."""


class LatentGaitError(Exception):
    """Base class for all domain errors."""


class Unreachable(LatentGaitError):
    """Inverse kinematics target lies outside the leg workspace."""


class DegenerateSupport(LatentGaitError):
    """Fewer than two stance feet; force distribution is undefined."""


class InvalidParams(LatentGaitError):
    """Gait parameters do not quantize to control ticks."""


class CommandOutOfBounds(LatentGaitError):
    """Commanded base twist exceeds the configured bounds."""


class ShapeMismatch(LatentGaitError):
    """Array shape incompatible with the model configuration."""


class NonFiniteLoss(LatentGaitError):
    """Training loss became NaN or infinite."""


class DatasetTooShort(LatentGaitError):
    """No tick has enough history and future for a training window."""


class VersionMismatch(LatentGaitError):
    """Serialized artifact written by an unsupported format version."""


class CorruptFile(LatentGaitError):
    """Serialized artifact is truncated or fails its checksum."""


class ModelMissing(LatentGaitError):
    """A trained model is required but none was provided/found."""


class BufferUnderflow(LatentGaitError):
    """State buffer holds too few states to assemble an encoder window."""


class InsufficientData(LatentGaitError):
    """Not enough nominal data to calibrate a detection threshold."""


class NoPeriodicDimension(LatentGaitError):
    """No latent dimension drives periodic, trot-structured contact flips."""


class EmptySample(LatentGaitError):
    """Statistical test invoked with an empty sample."""


class MalformedFrame(LatentGaitError):
    """Protocol frame is not valid JSON or misses required fields."""


class PortInUse(LatentGaitError):
    """Requested service port is already bound."""
