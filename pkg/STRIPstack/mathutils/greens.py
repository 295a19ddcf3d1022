"""Green's function of -Laplacian + gamma delta_0(x) + omega on the physical
strip R x [0,L] with Neumann walls, by expansion in the transverse
eigenbasis

    g(x,y,xi,eta) = sum_k g_k(x,xi) theta_k(y) theta_k(eta),
    g_k(x,xi) = 1/(2s) (-gamma/(gamma+2s) e^{-s(|x|+|xi|)} + e^{-s|x-xi|}),
    s = sqrt(lambda_k + omega).

The full basis is theta_0 = 1/sqrt(L), theta_k = sqrt(2/L) cos(k pi y/L),
lambda_k = (k pi/L)^2.  With even_modes_only only cos(2k pi y/L) is kept.
"""
from ..state.greens import GreensSpec
from ..state.grid import StripGrid, Field
from ..state.params import ProblemParams
from ..utils.errors import OnDiagonalError
from ..utils import settings
from . import strip
from .differences import one_sided_derivatives
from typing import Optional,Tuple
import math
import numpy as np


def _wavenumber(k, spec : GreensSpec):
    step = 2.0 if spec.even_modes_only else 1.0
    return step*np.pi*np.asarray(k,dtype=float)/spec.L

def eigenvalue(k, spec : GreensSpec):
    return _wavenumber(k,spec)**2

def basis(k, y, spec : GreensSpec):
    """theta_k(y); k and y broadcast."""
    k = np.asarray(k)
    amp = np.where(k == 0, 1.0/math.sqrt(spec.L), math.sqrt(2.0/spec.L))
    return amp*np.cos(_wavenumber(k,spec)*np.asarray(y,dtype=float))

def default_k_max(spec : GreensSpec) -> int:
    """Smallest k with sqrt(lambda_k + omega) * min_separation > tail_exponent."""
    if spec.k_max is not None:
        return spec.k_max
    tail = settings.get('greens.tail_exponent',25.0)
    sep = settings.get('greens.min_separation',0.5)
    target = (tail/sep)**2 - spec.omega
    if target <= 0:
        return 0
    return int(math.floor(math.sqrt(target)/_wavenumber(1,spec))) + 1


def mode_coefficient(k, x, xi, spec : GreensSpec):
    """g_k(x, xi); arguments broadcast."""
    s = np.sqrt(eigenvalue(k,spec) + spec.omega)
    x = np.asarray(x,dtype=float)
    xi = np.asarray(xi,dtype=float)
    defect = -spec.gamma/(spec.gamma + 2.0*s)*np.exp(-s*(np.abs(x)+np.abs(xi)))
    return (defect + np.exp(-s*np.abs(x-xi)))/(2.0*s)


def tail_bound(x, xi, spec : GreensSpec, k_max : int) -> float:
    """Bound on the modes k > k_max from |g_k| <= e^{-s|x-xi|}/s and
    |theta_k| <= sqrt(2/L); infinite at x = xi."""
    d = float(np.min(np.abs(np.asarray(x,dtype=float) - xi)))
    if d == 0:
        return float('inf')
    q = _wavenumber(1,spec)*d
    s1 = math.sqrt(eigenvalue(k_max+1,spec) + spec.omega)
    return 2.0/spec.L*math.exp(-s1*d)/(s1*(1.0 - math.exp(-q)))


def greens_eval(x, y, xi : float, eta : float, spec : GreensSpec, with_bound : bool = False):
    """Truncated modal sum at (x, y); arrays broadcast.  With with_bound,
    returns (value, tail bound)."""
    spec.check()
    x = np.asarray(x,dtype=float)
    y = np.asarray(y,dtype=float)
    if np.any((x == xi) & (y == eta)):
        raise OnDiagonalError("Green's function evaluated at its source", xi=xi, eta=eta)
    K = default_k_max(spec)
    ks = np.arange(K+1).reshape((-1,)+(1,)*np.broadcast(x,y).ndim)
    terms = mode_coefficient(ks,x,xi,spec)*basis(ks,y,spec)*basis(ks,eta,spec)
    val = np.sum(terms,axis=0)
    if val.ndim == 0:
        val = float(val)
    if with_bound:
        return val,tail_bound(x,xi,spec,K)
    return val


def greens_line(spec : GreensSpec, xi : float, eta : float, y : float, xs : np.ndarray) -> np.ndarray:
    """g(xs, y, xi, eta) along a line of constant y."""
    return np.asarray(greens_eval(np.asarray(xs,dtype=float),y,xi,eta,spec))


def mode_jump(k : int, xi : float, spec : GreensSpec, h : float = 1e-4) -> float:
    """d_x g_k(0+) - d_x g_k(0-) - gamma g_k(0, xi), from one-sided
    differences; vanishes up to O(h^2) when |xi| > 2h."""
    f = lambda x : float(mode_coefficient(k,x,xi,spec))
    right,left = one_sided_derivatives(f,0.0,h)
    return right - left - spec.gamma*f(0.0)


def stencil_residual(spec : GreensSpec, xi : float, eta : float, grid : StripGrid, separation : float = 0.5) -> Tuple[Field,np.ndarray]:
    """Applies -d_xx - (1/L^2) d_yy + omega with the strip difference operators
    to g sampled on `grid` (rescaled y = eta/L).  Returns the residual and the
    mask of nodes at distance >= separation from the source line, the defect
    line and the Dirichlet columns, where the continuum residual is 0."""
    X,Y = grid.mesh()
    Yp = spec.L*Y
    if np.any((X == xi) & (Yp == eta)):
        Xs = np.where((X == xi) & (Yp == eta), X + grid.hx, X)
    else:
        Xs = X
    g = Field(grid,np.asarray(greens_eval(Xs,Yp,xi,eta,spec)))
    r = (-strip.laplacian_x(g).values - strip.laplacian_y_neumann(g).values/spec.L**2
         + spec.omega*g.values)
    mask = ((np.abs(X - xi) >= separation) & (np.abs(X) >= separation)
            & (np.abs(X) <= grid.x_extent - separation))
    return Field(grid,np.where(mask,r,0.0)),mask


def decay_slope(spec : GreensSpec, xi : float, eta : float, y : Optional[float] = None,
                window : Tuple[float,float] = (5.0,15.0), n : int = 101) -> float:
    """Slope of log g(x, y) against x - xi over the window; -sqrt(omega) for
    large separations."""
    y = eta if y is None else y
    d = np.linspace(window[0],window[1],n)
    vals = greens_line(spec,xi,eta,y,xi + d)
    slope,_ = np.polyfit(d,np.log(vals),1)
    return float(slope)


def verify_solution_via_green(u : Field, params : ProblemParams, x_nodes : Optional[np.ndarray] = None,
                              k_max : Optional[int] = None) -> float:
    """Sup over sample nodes of |u - G * (|u|^{p-1} u)|.

    u lives on the rescaled strip; the convolution is taken in physical
    coordinates (y = L y~), with trapezoid weights in xi and eta.  The samples are
    the nodes of nine x columns in [-X/2, X/2] and all y rows.
    """
    params.check_action()
    grid = u.grid
    spec = GreensSpec(omega=params.omega,gamma=params.gamma,L=params.L,k_max=k_max)
    N = np.abs(u.values)**(params.p-1)*u.values
    if not np.any(N):
        return float(np.max(np.abs(u.values)))
    K = min(default_k_max(spec),grid.ny-1)
    yp = params.L*grid.y()
    wy = np.asarray(strip.y_weights(grid))
    wx = np.asarray(strip.x_weights(grid))
    xs = grid.x()
    if x_nodes is None:
        idx = np.unique(np.round(np.linspace(grid.center - (grid.nx-1)//4, grid.center + (grid.nx-1)//4, 9)).astype(int))
    else:
        idx = np.searchsorted(xs,np.asarray(x_nodes,dtype=float))
    conv = np.zeros((len(idx),grid.ny))
    for k in range(K+1):
        th = basis(k,yp,spec)
        nk = params.L*(N @ (wy*th))
        gk = mode_coefficient(k,xs[idx][:,None],xs[None,:],spec)
        conv += np.outer(gk @ (wx*nk),th)
    return float(np.max(np.abs(conv - u.values[idx])))
