"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`EgfError`,
so callers (and the CLI) can catch one type and still report a precise
``kind`` string.
"""


class EgfError(Exception):
    kind = "egf-error"

    recipe = None

    def to_dict(self):
        out = {"error": self.kind, "message": str(self)}
        if self.recipe is not None:
            out["recipe"] = self.recipe
        return out


class InvalidArgumentError(EgfError, ValueError):
    kind = "invalid-argument"


class ShapeError(EgfError, ValueError):
    kind = "shape-error"


class IllConditionedKernelError(EgfError, RuntimeError):
    kind = "ill-conditioned-kernel"

    def __init__(self, message, jitter):
        super().__init__(message)
        self.jitter = jitter


class ResonanceError(EgfError, RuntimeError):
    kind = "resonance"

    def __init__(self, theta, nearest_frequency):
        super().__init__(
            f"theta={theta!r} is within 1e-6 (relative, in theta**2) of the discrete "
            f"Dirichlet eigenfrequency {nearest_frequency!r}"
        )
        self.theta = theta
        self.nearest_frequency = nearest_frequency


class PoleError(EgfError, ValueError):
    kind = "pole"


class RankError(EgfError, ArithmeticError):
    kind = "rank-deficient"


class DegenerateError(EgfError, ArithmeticError):
    kind = "degenerate"


class TooLargeError(EgfError, MemoryError):
    kind = "too-large"


class SolverError(EgfError, RuntimeError):
    kind = "solver-failure"


class CorruptBundleError(EgfError, OSError):
    kind = "corrupt-bundle"


class UnsupportedFormatError(EgfError, OSError):
    kind = "unsupported-format"
