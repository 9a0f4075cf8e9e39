"""Exception hierarchy shared by the numerical modules."""


class OscillatorError(Exception):
    """Base class for all numerical failures raised by this package."""


class SeriesBudgetError(OscillatorError):
    """The stored coefficient budget cannot certify the requested tolerance."""


class QuadratureError(OscillatorError):
    """Adaptive quadrature did not reach the requested accuracy."""


class IntegrationError(OscillatorError):
    """Backward ODE integration failed (step underflow, turning point, ...)."""


class AccuracyBudgetError(OscillatorError):
    """A derived quantity exceeded its estimated accuracy budget."""
