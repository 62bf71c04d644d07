"""Run-wide numeric settings shared by the CLI, demo, and sampled checks."""

from dataclasses import dataclass

from .errors import ValidationError

OUTPUT_FORMATS = ("text", "machine")

__all__ = ["RunConfig", "OUTPUT_FORMATS"]


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-9
    cluster_tol: float = 1e-9
    seed: int = 0
    samples: int = 100
    output_format: str = "text"

    def __post_init__(self):
        if not (self.tol > 0 and self.cluster_tol > 0):
            raise ValidationError("tolerances must be positive")
        if self.samples < 1:
            raise ValidationError("samples must be at least 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValidationError(f"output format must be one of {OUTPUT_FORMATS}")
