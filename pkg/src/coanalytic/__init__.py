"""Range spaces of co-analytic Toeplitz operators with class-A symbols."""

__version__ = "0.1.0"
