from .rational import RationalCoefficients


class IntegerCoefficients(RationalCoefficients):
    """Integer coefficients: unimodularity for matrices, torsion checks for rings."""

    name = "integer"
    checks_torsion = True
