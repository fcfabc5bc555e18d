"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: validation problems exit with 2,
tensor-file problems with 4.  A failed theorem verification is not an
exception; it is a report with ``passed=False`` (exit 3 at the CLI).
"""


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class ConfigError(ValidationError):
    """A configuration file is malformed or carries an invalid value."""


class PromptParseError(ValidationError):
    """An organized prompt string does not have the expected shape."""


class AlignmentError(ValidationError):
    """Prompts cannot be aligned component-wise."""


class TensorFileError(OSError):
    """A tensor file is malformed; ``offset`` is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset
