from typing import Dict, Type

from ..models import CoefficientMode
from .base import CoefficientSystem
from .gf2 import GF2Coefficients
from .integer import IntegerCoefficients
from .rational import RationalCoefficients

# Canonical coefficient names mapped to their implementation classes
COEFFICIENT_CLASS_MAP: Dict[str, Type[CoefficientSystem]] = {
    "integer": IntegerCoefficients,
    "rational": RationalCoefficients,
    "gf2": GF2Coefficients,
}

# Short and alternative spellings (resolved before lookup)
COEFFICIENT_ALIASES: Dict[str, str] = {
    "int": "integer",
    "z": "integer",
    "zz": "integer",
    "q": "rational",
    "qq": "rational",
    "z2": "gf2",
    "mod2": "gf2",
    "f2": "gf2",
}

# Ring coefficients used when the caller does not choose any
DEFAULT_RING_COEFFICIENTS: Dict[CoefficientMode, str] = {
    CoefficientMode.INTEGER: "rational",
    CoefficientMode.GF2: "gf2",
}


def _normalize_name(name: str) -> str:
    """Normalize and resolve aliases to the canonical coefficient name."""
    normalized = name.lower().strip()
    return COEFFICIENT_ALIASES.get(normalized, normalized)


def get_coefficients(name: str) -> CoefficientSystem:
    """
    Returns an instance of the requested coefficient system.
    Accepts canonical names and aliases.
    Raises ValueError if the name is unknown.
    """
    canonical = _normalize_name(name)

    if canonical not in COEFFICIENT_CLASS_MAP:
        raise ValueError(
            f"Unsupported coefficients: '{name}'. "
            f"Valid coefficients: {list(COEFFICIENT_CLASS_MAP.keys())}"
        )

    return COEFFICIENT_CLASS_MAP[canonical]()


def coefficients_for_mode(mode: CoefficientMode) -> CoefficientSystem:
    """The coefficient system that decides validity of a matrix in the given mode."""
    return get_coefficients(mode.value)


def resolve_ring_coefficients(mode: CoefficientMode, requested: str = "") -> CoefficientSystem:
    """
    Returns the explicitly requested ring coefficients if provided,
    otherwise the default for the matrix mode.
    """
    if requested and requested.strip():
        return get_coefficients(requested)
    return get_coefficients(DEFAULT_RING_COEFFICIENTS[mode])
