"""Minimization engines on the strip and the Rayleigh quotient oracle."""
