import numpy as np

def directional_derivative_central(f,x,v,h):
    """Approximation of the derivative of f at x in direction v using central
    differences with step size h.  x and v are arrays of the same shape."""
    x = np.asarray(x,dtype=float)
    v = np.asarray(v,dtype=float)
    return (f(x + h*v) - f(x - h*v))/(2.0*h)

def derivative_central(f,x,h):
    """First derivative of a scalar function of one variable."""
    return (f(x+h) - f(x-h))/(2.0*h)

def one_sided_derivatives(f,x,h):
    """(right, left) second-order one-sided derivatives at x, for functions
    with a kink at x."""
    right = (-3.0*f(x) + 4.0*f(x+h) - f(x+2*h))/(2.0*h)
    left = (3.0*f(x) - 4.0*f(x-h) + f(x-2*h))/(2.0*h)
    return right,left

def observed_order(errors,ratio=2.0):
    """Convergence orders log(e_k/e_{k+1})/log(ratio) of a refinement study."""
    e = np.asarray(errors,dtype=float)
    return np.log(e[:-1]/e[1:])/np.log(ratio)
