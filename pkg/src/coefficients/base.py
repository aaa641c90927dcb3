from typing import Any


class CoefficientSystem:
    """Unified interface for the scalar systems of matrices and rings.

    ``domain`` is the sympy domain used for exact elimination: a field, so
    integer coefficients eliminate over QQ and certify integrality separately.
    """

    name: str = ""
    domain: Any = None
    checks_torsion: bool = False

    def is_unit_minor(self, value: int) -> bool:
        """Whether a principal minor is allowed by the basis condition at a vertex."""
        raise NotImplementedError("Coefficient systems must implement is_unit_minor()")

    def reduce(self, value: int) -> int:
        return value

    def entry_range(self, bound: int) -> range:
        """Values an off-diagonal entry ranges over in a census with bound B."""
        return range(-bound, bound + 1)

    def convert(self, value: Any) -> Any:
        return self.domain.convert(value)

    def format(self, element: Any) -> str:
        return str(self.domain.to_sympy(element))
