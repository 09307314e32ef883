"""Spin-1 DKP oscillator in (2+1) dimensions with a uniform magnetic field."""

__version__ = "0.1.0"
