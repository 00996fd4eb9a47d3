"""Cross spectral form factors and a finite-group symmetry bootstrap."""

__version__ = "0.1.0"
