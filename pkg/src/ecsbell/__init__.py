"""Bell nonlocality of two-mode entangled coherent states."""
__version__ = "0.1.0"
