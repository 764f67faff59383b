"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`FlatModuliError`
and carries a machine-readable ``reason`` string that the CLI echoes.
"""


class FlatModuliError(Exception):
    reason = "domain_error"

    def __init__(self, message="", reason=None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class ExcludedSurface(FlatModuliError):
    reason = "excluded_surface_k_in_{1,2,4}"


class NoInvolutiveLift(FlatModuliError):
    reason = "no_involutive_lift"


class ImageViolation(FlatModuliError):
    reason = "image_violation_det_not_1"


class AmbiguousBranch(FlatModuliError):
    reason = "ambiguous_branch"


class BranchFailure(FlatModuliError):
    reason = "branch_failure"


class UnsupportedGroup(FlatModuliError):
    reason = "unsupported_group"


class UnsupportedType(FlatModuliError):
    reason = "unsupported_type"


class UnsupportedCombination(FlatModuliError):
    reason = "unsupported_combination"


class InvalidRank(FlatModuliError, ValueError):
    reason = "invalid_rank"


class SpecMismatch(FlatModuliError, ValueError):
    reason = "spec_mismatch"


class ArityError(FlatModuliError, ValueError):
    reason = "arity_error"


class SingularSystem(FlatModuliError):
    reason = "singular_system"


class NoConvergence(FlatModuliError):
    reason = "no_convergence"


class NotASolution(FlatModuliError):
    reason = "not_a_solution"


class OrientableSurface(FlatModuliError):
    reason = "orientable_surface"
