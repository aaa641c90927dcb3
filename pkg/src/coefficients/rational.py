from sympy.polys.domains import QQ

from .base import CoefficientSystem


class RationalCoefficients(CoefficientSystem):
    """Rational coefficients, the setting of the product criterion."""

    name = "rational"
    domain = QQ

    def is_unit_minor(self, value: int) -> bool:
        return value in (1, -1)
