from sympy import GF

from .base import CoefficientSystem


class GF2Coefficients(CoefficientSystem):
    """Coefficients mod 2, the natural field for small covers."""

    name = "gf2"
    domain = GF(2)

    def is_unit_minor(self, value: int) -> bool:
        return value % 2 == 1

    def reduce(self, value: int) -> int:
        return value % 2

    def entry_range(self, bound: int) -> range:
        return range(0, 2)

    def format(self, element) -> str:
        return str(int(self.domain.to_sympy(element)) % 2)
