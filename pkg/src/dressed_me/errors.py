"""Exception hierarchy shared by all modules."""


class DressedMEError(Exception):
    """Base class for errors raised by this package."""


class InstabilityError(DressedMEError):
    """The quadratic Hamiltonian is outside the stable normal phase."""


class DegenerateNormError(DressedMEError):
    """A Bogoliubov eigenvector has (numerically) vanishing symplectic norm."""


class DivergentOccupation(DressedMEError):
    """Bose occupation requested at or below the chemical potential."""


class NonPositiveFrequency(DressedMEError):
    """Spectral density evaluated at a non-positive frequency."""


class ZeroFrequencyUnsupported(DressedMEError):
    """A zero-frequency mode reached a rate computation."""


class UnsupportedLambShift(DressedMEError):
    """The bath would produce a Lamb shift that is not modelled."""


class DegenerateSpectrum(DressedMEError):
    """Dressed spectrum is degenerate; use the degenerate-case builder."""


class NonlinearJump(DressedMEError):
    """A jump operator is not linear in the mode operators."""


class NotClosed(DressedMEError):
    """The requested block of the drift matrix couples to excluded entries."""


class FrameError(DressedMEError):
    """A rotating frame would make the drift matrix time dependent."""


class SingularFastBlock(DressedMEError):
    """The fast block of an adiabatic elimination is singular or ill conditioned."""


class TruncationError(DressedMEError):
    """Population leaked into the top Fock layer beyond tolerance."""


class StepTooLarge(DressedMEError):
    """Integrator step exceeds the stability bound."""


class DimensionGuard(DressedMEError):
    """Truncated Fock space would exceed the size guard rail."""


class NoConvergence(DressedMEError):
    """Root refinement of an exceptional point failed."""


class ScenarioError(DressedMEError):
    """Malformed scenario document."""
