"""Lewis-Riesenfeld invariants for the time-dependent anisotropic oscillator in a magnetic field."""

__version__ = "0.1.0"
