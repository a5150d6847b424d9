"""graphion: graph polynomials, denominator reduction, c2 point counts, and
chord-diagram / power-series solutions of analytic Dyson-Schwinger equations."""

__version__ = "0.1.0"
