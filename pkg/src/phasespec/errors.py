"""Exception hierarchy shared by every module."""


class PhaseSpecError(Exception):
    """Base class; the CLI turns these into a JSON error object."""

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class EmptyParameterList(PhaseSpecError, ValueError):
    pass


class NonFiniteParameter(PhaseSpecError, ValueError):
    def __init__(self, index):
        super().__init__(f"parameter at index {index} is not finite")
        self.index = index


class ZeroParameter(PhaseSpecError, ValueError):
    def __init__(self, index):
        super().__init__(f"parameter at index {index} is zero; deflate it first")
        self.index = index


class DomainError(PhaseSpecError, ValueError):
    pass


class ClassificationError(PhaseSpecError, ValueError):
    pass


class NoSolutionOnBranch(PhaseSpecError):
    def __init__(self, k):
        super().__init__(f"phase equation has no solution on branch k={k}")
        self.k = k


class ToleranceNotReached(PhaseSpecError):
    def __init__(self, max_iter):
        super().__init__(f"tolerance not reached within {max_iter} iterations")
        self.max_iter = max_iter


class NonConvergence(PhaseSpecError):
    def __init__(self, max_iter):
        super().__init__(f"simultaneous root iteration did not converge in {max_iter} sweeps")
        self.max_iter = max_iter


class IncompleteSpectrum(PhaseSpecError):
    pass


class CertificationFailure(PhaseSpecError):
    def __init__(self, value, residual):
        super().__init__(f"eigenvalue {value} failed certification (residual {residual:.3e})")
        self.value = value
        self.residual = residual


class SingularSensitivity(PhaseSpecError):
    pass


class ConditioningError(PhaseSpecError):
    pass
