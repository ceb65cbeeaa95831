"""Risk computations for predictive density estimators."""
from importlib import metadata


def get_version() -> str:
    """Installed version, or ``0.0.0`` from a plain source checkout."""

    try:
        return metadata.version("pdrisk")
    except metadata.PackageNotFoundError:  # pragma: no cover - during tests
        return "0.0.0"


__all__ = ["get_version"]
