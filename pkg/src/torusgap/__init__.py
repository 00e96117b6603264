"""Numerical laboratory for the averaging operators A_t f(x) = E f(x + tY mod 1)
on the circle and the gap of I - A_t on mean-zero functions."""

__version__ = "0.1.0"
