"""Lowest value of the quotient

    lambda_{gamma,h} = inf (||d_x u||^2 + h||d_y u||^2 + gamma T(u)) / M(u)

by shift-invert Lanczos on the assembled sparse forms.  For gamma<0 the
infimum is -gamma^2/4, attained by the y-constant defect eigenfunction.
"""
from ..state.grid import StripGrid, Field
from ..mathutils import strip
from typing import Optional,Tuple
import math
import numpy as np
import scipy.sparse.linalg as spla


def rayleigh_grid(gamma : float, spacing : float = 1.0/32, ny : int = 5, min_extent : float = 16.0) -> StripGrid:
    """Grid wide enough that the exp(gamma|x|/2) tail is negligible at the
    Dirichlet columns."""
    X = min_extent if gamma == 0 else max(min_extent,20.0/abs(gamma))
    n = int(math.ceil(2*X/spacing))
    if n % 2 == 1:
        n += 1
    return StripGrid(X,n+1,ny)


def minimize_rayleigh(gamma : float, h : float, grid : Optional[StripGrid] = None, seed : int = 0) -> Tuple[float,Field]:
    """Returns (lambda, minimizer with unit mass and positive sign)."""
    if not h > 0:
        raise ValueError("minimize_rayleigh: h must be positive")
    if grid is None:
        grid = rayleigh_grid(gamma)
    K = strip.stiffness_matrices(grid)
    A = K['x'] + h*K['y'] + gamma*K['trace']
    free = np.flatnonzero(np.asarray(strip.interior_mask(grid)).ravel())
    A = A[free][:,free].tocsc()
    B = K['mass'][free][:,free].tocsc()
    rng = np.random.default_rng(seed)
    v0 = 1.0 + 0.1*rng.random(len(free))
    # the discrete spectrum stays above -gamma^2/4
    sigma = -1.5*gamma**2/4.0 - 1e-2 if gamma < 0 else -1e-2
    vals,vecs = spla.eigsh(A,k=1,M=B,sigma=sigma,which='LM',v0=v0)
    v = np.zeros(grid.nx*grid.ny)
    v[free] = vecs[:,0]
    u = Field(grid,v.reshape(grid.shape))
    if np.sum(u.values) < 0:
        u = u.scaled(-1.0)
    u = u.scaled(1.0/math.sqrt(strip.mass(u)))
    return float(vals[0]),u
