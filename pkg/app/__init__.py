"""ratfun - machines and decision procedures for rational word functions."""

__version__ = "1.0.0"
