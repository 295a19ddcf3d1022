"""Closed-form solitons of the 1D delta-NLS

    -phi'' + omega phi + gamma delta_0 phi - phi^p = 0,

    phi(x) = A sech^{2/(p-1)}(b|x| - a),
    A = ((p+1) omega/2)^{1/(p-1)},  b = (p-1) sqrt(omega)/2,  a = atanh(gamma/(2 sqrt(omega))),

their mass and energy maps, the inversion omega(m), and the extension to the
strip as a y-constant field.
"""
from ..state.soliton import Soliton1D
from ..state.grid import StripGrid, Field
from ..utils.errors import InadmissibleParamsError, BranchAmbiguityError
from ..utils import settings
from . import strip
from .differences import derivative_central
from typing import List
import math
import numpy as np
from scipy import integrate, optimize


def _sech(z):
    z = np.abs(z)
    e = np.exp(-z)
    return 2.0*e/(1.0 + e*e)

def amplitude(s : Soliton1D) -> float:
    return ((s.p+1)*s.omega/2.0)**(1.0/(s.p-1))

def rate(s : Soliton1D) -> float:
    return (s.p-1)*math.sqrt(s.omega)/2.0

def shift(s : Soliton1D) -> float:
    """a = atanh(gamma/(2 sqrt(omega))); the profile peaks at |x| = a/b when
    a > 0 and at x=0 otherwise."""
    return math.atanh(s.gamma/(2.0*math.sqrt(s.omega)))


def eval_profile(s : Soliton1D, x):
    """phi_{omega,gamma}(x); x may be an array."""
    s.check()
    z = rate(s)*np.abs(x) - shift(s)
    return amplitude(s)*_sech(z)**(2.0/(s.p-1))

def derivative_profile(s : Soliton1D, x):
    """phi'(x) = -sqrt(omega) sign(x) tanh(b|x| - a) phi(x); 0 at x=0."""
    z = rate(s)*np.abs(x) - shift(s)
    return -math.sqrt(s.omega)*np.sign(x)*np.tanh(z)*eval_profile(s,x)

def value_at_zero(s : Soliton1D) -> float:
    """phi(0) = ((p+1)/2 (omega - gamma^2/4))^{1/(p-1)}."""
    s.check()
    return ((s.p+1)/2.0*(s.omega - s.gamma**2/4.0))**(1.0/(s.p-1))


def sech_power_integral(nu : float, c : float) -> float:
    """int_c^inf sech^nu(s) ds."""
    if nu == 2.0:
        return 1.0 - math.tanh(c)
    if nu == 4.0:
        t = math.tanh(c)
        return 2.0/3.0 - t + t**3/3.0
    epsrel = settings.get('soliton.quad_epsrel',1e-12)
    val,_ = integrate.quad(lambda z: _sech(z)**nu, c, np.inf, epsabs=0.0, epsrel=epsrel, limit=200)
    return val

def mass_of(s : Soliton1D) -> float:
    """M = A^2 (2/b) int_{-a}^inf sech^{4/(p-1)}; for p=3, 4 sqrt(omega) + 2 gamma."""
    s.check()
    return amplitude(s)**2*2.0/rate(s)*sech_power_integral(4.0/(s.p-1),-shift(s))

def mass_factor(s : Soliton1D) -> float:
    """Q(omega,gamma) with M = Q omega^{(5-p)/(2(p-1))}."""
    return mass_of(s)/s.omega**((5.0-s.p)/(2.0*(s.p-1)))

def potential_1d(s : Soliton1D) -> float:
    """int phi^{p+1} dx."""
    s.check()
    return amplitude(s)**(s.p+1)*2.0/rate(s)*sech_power_integral(2.0*(s.p+1)/(s.p-1),-shift(s))

def energy_1d(s : Soliton1D) -> float:
    """E from 2(p+3)E = -(5-p) omega M + (p-1) gamma phi(0)^2."""
    p = s.p
    return (-(5.0-p)*s.omega*mass_of(s) + (p-1)*s.gamma*value_at_zero(s)**2)/(2.0*(p+3))

def action_1d(s : Soliton1D) -> float:
    return energy_1d(s) + 0.5*s.omega*mass_of(s)


def _halfline_quad(s : Soliton1D, f) -> float:
    """2 int_0^inf f(x) dx, split at the peak."""
    b = rate(s)
    peak = max(shift(s),0.0)/b
    cut = peak + 40.0/b
    epsrel = settings.get('soliton.quad_epsrel',1e-12)
    v1,_ = integrate.quad(f, 0.0, cut, epsabs=0.0, epsrel=epsrel, limit=200, points=[peak] if peak > 0 else None)
    v2,_ = integrate.quad(f, cut, np.inf, epsabs=1e-300, epsrel=epsrel, limit=200)
    return 2.0*(v1+v2)

def mass_quadrature(s : Soliton1D) -> float:
    """Direct quadrature of phi^2."""
    return _halfline_quad(s,lambda x: float(eval_profile(s,x))**2)

def energy_1d_quadrature(s : Soliton1D) -> float:
    """Direct quadrature of 1/2 int phi'^2 + gamma/2 phi(0)^2 - int phi^{p+1}/(p+1)."""
    p = s.p
    kin = _halfline_quad(s,lambda x: float(derivative_profile(s,x))**2)
    pot = _halfline_quad(s,lambda x: float(eval_profile(s,x))**(p+1))
    return 0.5*kin + 0.5*s.gamma*value_at_zero(s)**2 - pot/(p+1)


def mass_derivative(s : Soliton1D, rel : float = 1e-6) -> float:
    """d M / d omega by central differences."""
    return derivative_central(lambda w: mass_of(Soliton1D(w,s.gamma,s.p)),s.omega,rel*s.omega)

def is_monotone_branch(gamma : float, p : float) -> bool:
    """Whether M is increasing in omega on the whole soliton branch."""
    if gamma < 0:
        return 1 < p <= 5
    if gamma == 0:
        return 1 < p < 5
    return 1 < p <= 3


def mass_floor(gamma : float, p : float) -> float:
    """Infimum of the soliton mass over the branch omega > max(gamma^2/4, 0):
    the limit omega -> gamma^2/4 for gamma > 0, else 0 (for p<5)."""
    if gamma <= 0:
        return 0.0
    return mass_of(Soliton1D(gamma**2/4.0*(1.0+1e-12),gamma,p))


def omega_of_mass(m : float, gamma : float, p : float) -> float:
    """The unique omega with mass_of(omega) = m on a monotone branch.

    Brackets omega in (gamma^2/4 (1+1e-12), omega_hi), doubling omega_hi
    until the mass exceeds m, then runs Brent's method.
    """
    if not m > 0:
        raise InadmissibleParamsError("mass must be positive", m=m)
    if not is_monotone_branch(gamma,p):
        raise BranchAmbiguityError("the soliton mass is not monotone in omega here", gamma=gamma, p=p)
    M = lambda w : mass_of(Soliton1D(w,gamma,p))
    hi = settings.get('soliton.omega_hi_start',4.0)
    if gamma != 0:
        hi = max(hi,gamma**2)
    for _ in range(400):
        if M(hi) >= m:
            break
        hi *= 2.0
    else:
        raise InadmissibleParamsError("no omega reaches the requested mass", m=m)
    if gamma != 0:
        lo = gamma**2/4.0*(1.0+1e-12)
    else:
        lo = hi
        while M(lo) >= m:
            lo *= 0.5
    if M(lo) > m:
        raise InadmissibleParamsError("mass below the soliton branch", m=m, gamma=gamma, p=p)
    rtol = settings.get('soliton.root_rtol',1e-12)
    return optimize.brentq(lambda w: M(w) - m, lo, hi, xtol=1e-15*hi, rtol=rtol, maxiter=500)


def extend_to_strip(s : Soliton1D, grid : StripGrid) -> Field:
    """The y-constant field phi(x), with the Dirichlet columns set to 0."""
    col = eval_profile(s,grid.x())
    return Field(grid,strip.apply_dirichlet(np.repeat(col[:,None],grid.ny,axis=1)))


def soliton_table(omegas : List[float], gamma : float, p : float) -> List[dict]:
    """Rows (omega, mass, energy, phi0) for the soliton1d table."""
    rows = []
    for w in omegas:
        s = Soliton1D(w,gamma,p)
        rows.append({'omega':w,'mass':mass_of(s),'energy':energy_1d(s),'phi0':value_at_zero(s)})
    return rows
