"""Central tolerance record shared by every module."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

MAX_OVERRIDE = 1e-3


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances.

    Attributes
    ----------
    structural : float
        Hermiticity, trace normalisation, forbidden X-positions, positivity of
        the 2x2 blocks.
    spectral : float
        Agreement between eigenvalue routes; PPT oracle sign threshold.
    band : float
        Half-width of the "marginal" band around separability boundaries and
        orbit degeneracies.
    """

    structural: float = 1e-12
    spectral: float = 1e-10
    band: float = 1e-9

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (0.0 < value <= MAX_OVERRIDE):
                raise ValueError(
                    f"tolerance {name}={value!r} outside (0, {MAX_OVERRIDE:g}]"
                )

    def with_overrides(self, **kwargs) -> "Tolerances":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
