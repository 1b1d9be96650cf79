"""LOCAL-model simulation and uniformization of parameter-guessing
distributed algorithms via pruning."""

__version__ = "0.1.0"
