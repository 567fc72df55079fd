"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`LatticeForgeError`, which is itself a ``ValueError`` so callers that
only care about "bad input" can catch the builtin.
"""


class LatticeForgeError(ValueError):
    """Base class for all library errors."""


class InvalidSpectrum(LatticeForgeError):
    """Spectrum values are not strictly increasing, too short, or the scale is not positive."""


class InvalidLattice(LatticeForgeError):
    """Lattice arrays have inconsistent sizes or non-positive couplings."""


class CouplingExceedsAmplitude(LatticeForgeError):
    """A coupling is larger than the evanescent amplitude ``A``; no distance reaches it."""


class NegativeDistance(LatticeForgeError):
    """A waveguide separation is negative."""


class NonPositiveLeadingCoefficient(LatticeForgeError):
    pass


class NonPositiveWeight(LatticeForgeError):
    pass


class SpectrumMismatch(LatticeForgeError):
    """The lattice eigenvalues do not match the supplied spectrum."""


class ReconstructionError(LatticeForgeError):
    """Base class for inverse-problem failures."""


class NegativeUn(ReconstructionError):
    """Some ``J_n**2`` came out non-positive during the Euclidean descent."""

    def __init__(self, n, value):
        super().__init__(f"U_{n} = J_{n}^2 = {value!r} is not positive")
        self.n = n
        self.value = value


class DegreeDefect(ReconstructionError):
    """A division step left a remainder of the wrong degree."""

    def __init__(self, n, residual):
        super().__init__(f"step n={n}: remainder residual {residual!r} exceeds tolerance")
        self.n = n
        self.residual = residual


class NonMonotoneSpectrum(LatticeForgeError):
    pass


class UnsupportedParamRegion(LatticeForgeError):
    """A closed-form radicand is negative for these parameters."""


class InvalidParams(LatticeForgeError):
    """Model parameters fall outside the family's admissible range."""


class DegenerateSpectrum(LatticeForgeError):
    """Two eigenvalues are closer than ``1e-12`` times the spectral spread."""
