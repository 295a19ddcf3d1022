"""STRIPstack: ground states of the nonlinear Schrodinger equation on a strip
with a delta interaction along a transverse line."""
__version__ = '0.1'
