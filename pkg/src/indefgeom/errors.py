"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): input errors,
raised for malformed expressions, manifests or arguments, and numerical
errors, raised when a well-formed request cannot be evaluated at the
requested point.
"""


class GeometryError(Exception):
    """Base class for every error raised by this package."""


class InputError(GeometryError):
    """Malformed user input (expressions, manifests, parameters)."""


class NumericalError(GeometryError):
    """A computation is undefined or ill-conditioned at the requested data."""


class ExprSyntaxError(InputError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(InputError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class NonConstantExponentError(InputError):
    def __init__(self, offset: int):
        super().__init__(f"exponent must be constant (offset {offset})")
        self.offset = offset


class ManifestError(InputError):
    """Schema or semantic violation in a JSON manifest; names the field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(NumericalError):
    """Expression evaluated outside its domain; ``subexpr`` is the culprit."""

    def __init__(self, subexpr: str, reason: str):
        super().__init__(f"domain error in {subexpr!r}: {reason}")
        self.subexpr = subexpr
        self.reason = reason


class SingularMetricError(NumericalError):
    pass


class SingularJacobianError(NumericalError):
    pass


class DegeneratePlaneError(NumericalError):
    def __init__(self, rank: int):
        super().__init__(f"plane rank {rank}: sectional curvature undefined")
        self.rank = rank


class DependentVectorsError(InputError):
    pass


class IsotropicDirectionError(NumericalError):
    def __init__(self, what: str = "isotropic direction"):
        super().__init__(what)


class DefiniteMetricError(NumericalError):
    def __init__(self):
        super().__init__("metric is definite: no isotropic vectors exist")


class MissingComplexStructureError(InputError):
    def __init__(self):
        super().__init__("operation needs a complex structure J")


class NotKaehlerError(InputError):
    pass


class UnsupportedDimensionError(InputError):
    pass


class DenominatorZeroError(NumericalError):
    def __init__(self, detail: str = ""):
        msg = "denominator identically zero along the approximating family"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class NotHolomorphicError(InputError):
    def __init__(self, defect: float):
        super().__init__(
            f"map is neither holomorphic nor antiholomorphic (defect {defect:.3e})"
        )
        self.defect = defect


class NoUsableSampleError(NumericalError):
    pass


class SamplesExhaustedError(NumericalError):
    pass
