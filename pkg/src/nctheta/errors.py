"""Exception types raised by nctheta.

Every error carries a short machine-readable ``code`` which the CLI copies
into its JSON error object.
"""


class ThetaError(ValueError):
    code = "theta_error"

    def __init__(self, detail=""):
        super().__init__(detail)
        self.detail = detail


class SingularModulus(ThetaError):
    code = "singular_modulus"


class NotSiegel(ThetaError):
    code = "not_siegel"


class NotPositiveDefinite(ThetaError):
    code = "not_positive_definite"


class TruncationOverflow(ThetaError):
    code = "truncation_overflow"


class SingularDeformation(ThetaError):
    code = "singular_deformation"


class NotCompatible(ThetaError):
    code = "not_compatible"


class NotPositiveReal(ThetaError):
    code = "not_positive_real"


class DimensionMismatch(ThetaError):
    code = "dimension_mismatch"


class IndexModulusMismatch(ThetaError):
    code = "index_modulus_mismatch"


class ParallelLagrangians(ThetaError):
    code = "parallel_lagrangians"


class NotUnimodular(ThetaError):
    code = "not_unimodular"


class DegenerateDifference(ThetaError):
    code = "degenerate_difference"
