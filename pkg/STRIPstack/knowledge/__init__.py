"""Default numeric settings for the strip solvers."""
