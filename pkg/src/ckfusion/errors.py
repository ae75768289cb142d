"""Exception hierarchy shared by every layer of the package."""


class FrameError(Exception):
    """Base class for all errors raised by ckfusion."""


class ShapeMismatch(FrameError, ValueError):
    pass


class DescriptorMismatch(ShapeMismatch):
    """Algebra elements with different numbers of components were combined."""


class NotInvertible(FrameError):
    pass


class NotPositive(FrameError):
    pass


class NeitherCase(FrameError):
    """Operator is neither injective nor surjective."""


class ValidationFailed(FrameError):
    pass


class CrossNotPositive(FrameError):
    """Some C'^* pi_W C fails to be Hermitian positive semidefinite."""


class HypothesisFailed(FrameError):
    pass


class SingularFrameOperator(FrameError):
    pass


class InclusionFailed(FrameError):
    pass


class OrthogonalityFailed(FrameError):
    pass


class NotAFrame(FrameError):
    pass


class BadIndexMap(FrameError, ValueError):
    pass


class GenerationFailed(FrameError):
    pass
