"""nilcycle - Center-focus classification and limit cycle bifurcation at nilpotent singular points."""

__version__ = "0.1.0"
