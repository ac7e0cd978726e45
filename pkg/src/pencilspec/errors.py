"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the process exit
code the command line front end maps it to.
"""


class PencilSpecError(Exception):
    code = "error"
    exit_code = 1


class ValidationError(PencilSpecError, ValueError):
    """Malformed or out-of-contract input."""

    code = "validation_error"
    exit_code = 2


class DimensionMismatch(ValidationError):
    code = "dimension_mismatch"


class NonSymmetric(ValidationError):
    code = "non_symmetric"


class NotOrthogonal(ValidationError):
    code = "not_orthogonal"


class NotAnEigenvalue(ValidationError):
    code = "not_an_eigenvalue"


class SingularMass(ValidationError):
    code = "singular_mass"


class NonPositiveMass(ValidationError):
    code = "non_positive_mass"


class RealModes(ValidationError):
    """A modal quadratic has a non-negative discriminant."""

    code = "real_modes"


class OddLength(ValidationError):
    code = "odd_length"


class RealValue(ValidationError):
    code = "real_value"


class UnpairedValue(ValidationError):
    code = "unpaired_value"


class DuplicateEigenvalue(ValidationError):
    code = "duplicate_eigenvalue"

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class IllConditioned(ValidationError):
    code = "ill_conditioned"


class DegenerateEigenvalue(PencilSpecError):
    """A repeated (or numerically clustered) eigenvalue was encountered."""

    code = "degenerate_eigenvalue"
    exit_code = 3


class NonCommuting(PencilSpecError):
    code = "non_commuting"
    exit_code = 4


class SharedBasisViolation(PencilSpecError):
    code = "shared_basis_violation"
    exit_code = 4


class NoMatching(PencilSpecError):
    code = "no_matching"
    exit_code = 5

    def __init__(self, message, worst=float("nan")):
        super().__init__(message)
        self.worst = worst


class NonConvergence(PencilSpecError):
    code = "non_convergence"
    exit_code = 1
