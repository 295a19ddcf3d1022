"""Quadrature, difference operators and sparse forms on a StripGrid.

Fields are (nx, ny) arrays, x along axis 0.  The quadrature is the 2D
trapezoid rule; the kinetic terms are sums of squared forward differences, so
that the Laplacians below are exactly the gradients of the discrete kinetic
energies under the quadrature inner product (summation by parts).  The
Dirichlet columns x=+-X are not unknowns: operators return 0 there.

Sparse matrices act on row-major flattened fields, node (i,j) at i*ny+j.
"""
from ..state.grid import StripGrid, Field
from functools import lru_cache
from typing import Callable,Optional,Union
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

ArrayOrField = Union[np.ndarray,Field]

def _vals(u : ArrayOrField) -> np.ndarray:
    return u.values if isinstance(u,Field) else np.asarray(u)

def _readonly(a : np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a

@lru_cache(maxsize=64)
def x_weights(grid : StripGrid) -> np.ndarray:
    w = np.full(grid.nx,grid.hx)
    w[0] = w[-1] = 0.5*grid.hx
    return _readonly(w)

@lru_cache(maxsize=64)
def y_weights(grid : StripGrid) -> np.ndarray:
    w = np.full(grid.ny,grid.hy)
    w[0] = w[-1] = 0.5*grid.hy
    return _readonly(w)

@lru_cache(maxsize=64)
def weights(grid : StripGrid) -> np.ndarray:
    return _readonly(np.outer(x_weights(grid),y_weights(grid)))

@lru_cache(maxsize=64)
def interior_mask(grid : StripGrid) -> np.ndarray:
    """True away from the Dirichlet columns."""
    m = np.ones(grid.shape,dtype=bool)
    m[0,:] = False
    m[-1,:] = False
    return _readonly(m)

def apply_dirichlet(values : np.ndarray) -> np.ndarray:
    out = np.array(values,dtype=float)
    out[0,:] = 0.0
    out[-1,:] = 0.0
    return out


def quadrature(u : ArrayOrField, integrand : Optional[Callable] = None, grid : Optional[StripGrid] = None) -> float:
    """2D trapezoid rule of integrand(u) (pointwise) over [-X,X]x[0,1]."""
    if grid is None:
        grid = u.grid
    v = _vals(u)
    if integrand is not None:
        v = integrand(v)
    return float(np.sum(weights(grid)*v))

def inner(u : ArrayOrField, v : ArrayOrField, grid : Optional[StripGrid] = None) -> float:
    """Quadrature inner product."""
    if grid is None:
        grid = u.grid if isinstance(u,Field) else v.grid
    return float(np.sum(weights(grid)*_vals(u)*_vals(v)))

def norm(u : ArrayOrField, grid : Optional[StripGrid] = None) -> float:
    return np.sqrt(max(inner(u,u,grid),0.0))

def mass(u : Field) -> float:
    return quadrature(u,np.square)

def potential(u : Field, p : float) -> float:
    """||u||_{p+1}^{p+1}"""
    return quadrature(u,lambda v: np.abs(v)**(p+1))


def laplacian_x(u : Field) -> Field:
    """Centered second difference in x, 0 on the Dirichlet columns."""
    v = u.values
    out = np.zeros_like(v)
    out[1:-1] = (v[2:] - 2.0*v[1:-1] + v[:-2])/u.grid.hx**2
    return u.with_values(out)

def laplacian_y_neumann(u : Field) -> Field:
    """Centered second difference in y with mirrored ghost points at y=0,1.

    Fields with a nonzero normal derivative at the walls (e.g. u=y) are not in
    the Neumann class; the mirrored stencil is still returned for them."""
    v = u.values
    hy2 = u.grid.hy**2
    out = np.empty_like(v)
    out[:,1:-1] = (v[:,2:] - 2.0*v[:,1:-1] + v[:,:-2])/hy2
    out[:,0] = 2.0*(v[:,1] - v[:,0])/hy2
    out[:,-1] = 2.0*(v[:,-2] - v[:,-1])/hy2
    return u.with_values(out)

def kinetic_x(u : Field) -> float:
    """||d_x u||^2 as midpoint sums of squared forward differences."""
    d = np.diff(u.values,axis=0)
    return float(np.sum(y_weights(u.grid)*d*d)/u.grid.hx)

def kinetic_y(u : Field) -> float:
    """||d_y u||^2 on the rescaled strip, without the 1/L^2 weight."""
    d = np.diff(u.values,axis=1)
    return float(np.sum(x_weights(u.grid)[:,None]*d*d)/u.grid.hy)

def trace_sq(u : Field) -> float:
    """Transverse trapezoid rule of |u(0,y)|^2."""
    line = u.values[u.grid.center]
    return float(np.sum(y_weights(u.grid)*line*line))

def trace_adjoint(u : Field) -> Field:
    """Gradient of trace_sq/2 under the quadrature inner product: u/hx on the
    x=0 line, 0 elsewhere."""
    out = np.zeros_like(u.values)
    out[u.grid.center] = u.values[u.grid.center]/u.grid.hx
    return u.with_values(out)

def mean_y(u : Field) -> np.ndarray:
    """Transverse average, shape (nx,)."""
    return u.values @ y_weights(u.grid)

def centroid_x(u : Field) -> float:
    M = mass(u)
    if M == 0:
        return 0.0
    return quadrature(u,lambda v: u.grid.x()[:,None]*v*v)/M


def _first_difference(n : int) -> sp.csr_matrix:
    return sp.diags([-np.ones(n-1),np.ones(n-1)],[0,1],shape=(n-1,n),format='csr')

@lru_cache(maxsize=16)
def stiffness_matrices(grid : StripGrid) -> dict:
    """Sparse forms {'x','y','mass','trace'} with u^T K_x u = kinetic_x(u),
    u^T K_y u = kinetic_y(u), u^T M u = mass(u), u^T T u = trace_sq(u)."""
    nx,ny = grid.shape
    Dx = sp.kron(_first_difference(nx),sp.identity(ny),format='csr')
    Dy = sp.kron(sp.identity(nx),_first_difference(ny),format='csr')
    wx = np.asarray(x_weights(grid))
    wy = np.asarray(y_weights(grid))
    Kx = Dx.T @ sp.diags(np.kron(np.ones(nx-1),wy)/grid.hx) @ Dx
    Ky = Dy.T @ sp.diags(np.kron(wx,np.ones(ny-1))/grid.hy) @ Dy
    t = np.zeros(grid.shape)
    t[grid.center] = wy
    return {'x':Kx.tocsr(),
            'y':Ky.tocsr(),
            'mass':sp.diags(np.asarray(weights(grid)).ravel(),format='csr'),
            'trace':sp.diags(t.ravel(),format='csr')}

@lru_cache(maxsize=16)
def sobolev_solver(grid : StripGrid, h : float, shift : float) -> Callable[[np.ndarray],np.ndarray]:
    """Returns g -> d solving (-Delta_h + shift) d = g on the interior nodes,
    d = 0 on the Dirichlet columns.  -Delta_h carries weight h on the
    transverse part.  The factorization is cached per (grid, h, shift)."""
    if not shift > 0:
        raise ValueError("sobolev_solver: shift must be positive")
    K = stiffness_matrices(grid)
    A = K['x'] + h*K['y'] + shift*K['mass']
    free = np.flatnonzero(np.asarray(interior_mask(grid)).ravel())
    solve = spla.factorized(A[free][:,free].tocsc())
    W = np.asarray(weights(grid)).ravel()
    def apply(g : np.ndarray) -> np.ndarray:
        rhs = (W*np.asarray(g).ravel())[free]
        d = np.zeros(grid.nx*grid.ny)
        d[free] = solve(rhs)
        return d.reshape(grid.shape)
    return apply


def trace_inequality_constant(grid : StripGrid, n_samples : int = 50, seed : int = 0) -> float:
    """Largest observed ratio trace_sq(u) / sum_y w_y ||u(.,y)|| ||d_x u(.,y)||
    over random smooth fields vanishing at x=+-X."""
    rng = np.random.default_rng(seed)
    x = grid.x()[:,None]
    y = grid.y()[None,:]
    wx = np.asarray(x_weights(grid))[:,None]
    wy = np.asarray(y_weights(grid))
    worst = 0.0
    for _ in range(n_samples):
        v = np.zeros(grid.shape)
        for _ in range(3):
            c = rng.uniform(-0.5,0.5)*grid.x_extent
            w = rng.uniform(0.3,3.0)
            k = rng.integers(0,4)
            v += rng.normal()*np.exp(-((x-c)/w)**2)*np.cos(k*np.pi*y)
        u = Field(grid,apply_dirichlet(v))
        col_norm = np.sqrt(np.sum(wx*u.values**2,axis=0))
        col_dx = np.sqrt(np.sum(np.diff(u.values,axis=0)**2,axis=0)/grid.hx)
        denom = float(np.sum(wy*col_norm*col_dx))
        if denom > 0:
            worst = max(worst,trace_sq(u)/denom)
    return worst
