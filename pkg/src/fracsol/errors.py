"""Exception taxonomy: parameter problems are ValueError subclasses, runtime
numerics (non-convergence, blow-up, collapse) are NumericalError subclasses.
The CLI maps the former to exit code 2 and the latter to exit code 1."""


class NumericalError(RuntimeError):
    """A solve or time integration failed for numerical reasons."""


class ConvergenceError(NumericalError):
    """An iteration exhausted its budget without meeting its tolerance."""


class NoSolitaryWaveError(NumericalError):
    """The fixed-point iteration collapsed to the zero profile."""


class BlowUpError(NumericalError):
    """A time integration exceeded the blow-up monitor threshold."""
