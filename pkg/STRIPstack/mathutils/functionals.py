"""Discrete action, Nehari functional, energy and mass on the rescaled strip,
their gradients, and identity-based diagnostics.

With h = 1/L^2 and the strip_core quadratures,

    Q(u) = ||d_x u||^2 + h ||d_y u||^2 + omega M(u) + gamma T(u)
    S(u) = Q(u)/2 - ||u||_{p+1}^{p+1}/(p+1)
    I(u) = Q(u) - ||u||_{p+1}^{p+1}
    E(u) = S(u) - omega M(u)/2

Gradients are taken under the quadrature inner product and vanish on the
Dirichlet columns.
"""
from ..state.grid import StripGrid, Field
from ..state.params import ProblemParams
from ..state.reports import FunctionalReport, PohozaevResiduals
from ..utils.errors import InadmissibleParamsError
from ..utils import settings
from . import strip
from .differences import directional_derivative_central
from typing import Optional
import numpy as np


def _omega(params : ProblemParams, omega : Optional[float] = None) -> float:
    if omega is not None:
        return omega
    return params.omega if params.omega is not None else 0.0

def _check(params : ProblemParams) -> None:
    params.check_basic()
    if params.omega is not None and params.gamma < 0 and not params.omega > params.gamma**2/4.0:
        raise InadmissibleParamsError("omega must exceed gamma^2/4", omega=params.omega, gamma=params.gamma)


def quadratic_form(u : Field, params : ProblemParams, omega : Optional[float] = None) -> float:
    """<L_{omega,gamma} u, u> = ||d_x u||^2 + h||d_y u||^2 + omega M + gamma T."""
    om = _omega(params,omega)
    return (strip.kinetic_x(u) + params.h*strip.kinetic_y(u)
            + om*strip.mass(u) + params.gamma*strip.trace_sq(u))


def eval_all(u : Field, params : ProblemParams) -> FunctionalReport:
    """All functionals of u.  The Nehari value is cross-checked against the
    assembled sparse quadratic form."""
    _check(params)
    om = _omega(params)
    p = params.p
    kx = strip.kinetic_x(u)
    ky = strip.kinetic_y(u)
    M = strip.mass(u)
    T = strip.trace_sq(u)
    P = strip.potential(u,p)
    Q = kx + params.h*ky + om*M + params.gamma*T
    I = Q - P
    S = 0.5*Q - P/(p+1)
    E = S - 0.5*om*M

    K = strip.stiffness_matrices(u.grid)
    flat = u.values.ravel()
    A = K['x'] + params.h*K['y'] + om*K['mass'] + params.gamma*K['trace']
    I_forms = float(flat @ (A @ flat)) - P
    scale = abs(kx) + params.h*abs(ky) + abs(om*M) + abs(params.gamma*T) + abs(P)
    rtol = settings.get('functionals.crosscheck_rtol',1e-11)
    assert abs(I - I_forms) <= rtol*scale + 1e-300, "Nehari cross-check failed: {} vs {}".format(I,I_forms)
    return FunctionalReport(action=S,nehari=I,energy=E,mass=M,trace=T,
                            kinetic_x=kx,kinetic_y=ky,potential=P)


def action(u : Field, params : ProblemParams) -> float:
    return 0.5*quadratic_form(u,params) - strip.potential(u,params.p)/(params.p+1)

def energy(u : Field, params : ProblemParams) -> float:
    return 0.5*quadratic_form(u,params,0.0) - strip.potential(u,params.p)/(params.p+1)

def nehari(u : Field, params : ProblemParams) -> float:
    return quadratic_form(u,params) - strip.potential(u,params.p)

def scaled_action(u : Field, params : ProblemParams, lam : float) -> float:
    """S(lam u) from the closed form lam^2/2 Q(u) - lam^{p+1}/(p+1) P(u)."""
    p = params.p
    return 0.5*lam**2*quadratic_form(u,params) - abs(lam)**(p+1)*strip.potential(u,p)/(p+1)


def grad_action(u : Field, params : ProblemParams, omega : Optional[float] = None) -> Field:
    """-Delta_h u + omega u + gamma (trace adjoint) u - |u|^{p-1} u."""
    om = _omega(params,omega)
    v = u.values
    g = (-strip.laplacian_x(u).values - params.h*strip.laplacian_y_neumann(u).values
         + om*v + params.gamma*strip.trace_adjoint(u).values
         - np.abs(v)**(params.p-1)*v)
    return u.with_values(strip.apply_dirichlet(g))

def grad_energy(u : Field, params : ProblemParams) -> Field:
    return grad_action(u,params,0.0)


def check_gradient(u : Field, v : Field, params : ProblemParams, eps : float = 1e-5, verbose : bool = False) -> float:
    """Relative mismatch between <grad_action(u), v> and a central difference
    of the action in direction v (v should vanish on the Dirichlet columns)."""
    f = lambda w : action(Field(u.grid,w),params)
    fd = directional_derivative_central(f,u.values,v.values,eps)
    an = strip.inner(grad_action(u,params),v)
    err = abs(fd-an)/max(abs(fd),abs(an),1e-300)
    if verbose and err > 1e-6:
        print("check_gradient: analytic",an,"finite difference",fd,"relative error",err)
    return err


def rayleigh_lambda(u : Field, gamma : float, h : float) -> float:
    """(||d_x u||^2 + h||d_y u||^2 + gamma T(u)) / M(u)."""
    M = strip.mass(u)
    if M == 0:
        raise ValueError("rayleigh_lambda: zero field")
    return (strip.kinetic_x(u) + h*strip.kinetic_y(u) + gamma*strip.trace_sq(u))/M


def recover_omega(u : Field, params : ProblemParams) -> float:
    """Frequency of a stationary point of the fixed-mass energy, from the
    Nehari and x-dilation identities:

        omega M = [-2(p+3) E + (p-1) gamma T + 2(p-1) h ||d_y u||^2] / (5-p)

    Total for any nonzero field; only meaningful for stationary points.
    """
    p = params.p
    if p == 5:
        raise InadmissibleParamsError("omega recovery is singular at p=5", p=p)
    M = strip.mass(u)
    if M == 0:
        raise ValueError("recover_omega: zero field")
    E = energy(u,params)
    T = strip.trace_sq(u)
    ky = strip.kinetic_y(u)
    return (-2.0*(p+3)*E + (p-1)*params.gamma*T + 2.0*(p-1)*params.h*ky)/((5.0-p)*M)


def pohozaev_residuals(u : Field, params : ProblemParams, omega : Optional[float] = None) -> PohozaevResiduals:
    """Signed residuals (r1, r2) of

        ||d_x u||^2 + h||d_y u||^2 + omega M - ||u||^{p+1} + gamma T = 0
        ||d_x u||^2 - h||d_y u||^2 - omega M + 2/(p+1) ||u||^{p+1} = 0
    """
    om = _omega(params,omega)
    p = params.p
    kx = strip.kinetic_x(u)
    ky = params.h*strip.kinetic_y(u)
    M = strip.mass(u)
    P = strip.potential(u,p)
    r1 = kx + ky + om*M - P + params.gamma*strip.trace_sq(u)
    r2 = kx - ky - om*M + 2.0*P/(p+1)
    rec = recover_omega(u,params) if (M > 0 and p != 5) else None
    return PohozaevResiduals(nehari=r1,dilation=r2,omega_recovered=rec)


def residual_norm(u : Field, params : ProblemParams, omega : Optional[float] = None) -> float:
    """Quadrature L2 norm of the stationary-equation residual."""
    return strip.norm(grad_action(u,params,omega))


def transverse_variation(u : Field) -> float:
    """||u - (y-mean of u)|| / ||u||, 0 for y-constant fields."""
    n = strip.norm(u)
    if n == 0:
        return 0.0
    return strip.norm(u.values - strip.mean_y(u)[:,None],u.grid)/n


def defect_eigenfunction(grid : StripGrid, gamma : float) -> Field:
    """sqrt(-gamma/2) exp(gamma|x|/2), constant in y: unit mass on the
    rescaled strip and the minimizer of the Rayleigh quotient, -gamma^2/4."""
    if not gamma < 0:
        raise InadmissibleParamsError("the defect eigenfunction needs gamma<0", gamma=gamma)
    f = lambda X,Y : np.sqrt(-gamma/2.0)*np.exp(gamma*np.abs(X)/2.0)
    return Field.from_function(grid,f)
