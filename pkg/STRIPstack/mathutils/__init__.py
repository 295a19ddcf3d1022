"""Numerical kernels: strip quadrature and difference operators, the
functionals, closed-form 1D solitons and the spectral Green's function."""
