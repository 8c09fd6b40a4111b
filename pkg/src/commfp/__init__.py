"""Frame potential and expressiveness of commutative parameterized circuits."""

__version__ = "0.1.0"
