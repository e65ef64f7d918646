"""Exception types shared across the pipeline."""


class EpigrowthError(Exception):
    """Base class for all pipeline errors."""


class FormatError(EpigrowthError):
    """A file's header or layout does not match the documented schema."""


class ConflictError(EpigrowthError):
    """Duplicate records disagree on a value for the same key."""


class EmptyPanelError(EpigrowthError):
    """Every entity was discarded; nothing left to process."""


class JoinError(EpigrowthError):
    """The entity-key intersection across data sources is empty."""


class ContractError(EpigrowthError):
    """An operation's precondition was violated by the caller."""


class TrainingDivergedError(EpigrowthError):
    """Model training produced a non-finite loss."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"training loss became non-finite at epoch {epoch}")


class ConfigError(EpigrowthError):
    """A run configuration is missing or invalid."""
