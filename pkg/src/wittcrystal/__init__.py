"""wittcrystal: exact arithmetic for Witt vectors and Dieudonne modules."""

__version__ = "0.1.0"
