"""Experiments over the strip width L.

- sweep_L: unit-mass energy minimizers for a decreasing list of widths,
  warm-started from one width to the next, compared with the y-constant
  (1D) minimizer.
- estimate_L_star: bracket and bisect the width where minimizers stop being
  y-independent.
- l_star_star_bound: the closed-form upper bound on the square of the width
  above which minimizers are necessarily y-dependent.
- transverse_instability_width: the width above which the extended 1D
  profile is linearly unstable to the first transverse mode.
- gamma_star: the repulsive threshold built from shifted copies of a gamma=0
  action minimizer.
"""
from ..state.grid import StripGrid, Field
from ..state.params import ProblemParams
from ..state.soliton import Soliton1D
from ..state.minimize import MinimizeConfig, MinimizeModeEnum, StartEnum, MinimizeResult
from ..state.shrink import SweepRecord, LStarEstimate, LStarStarBound, GammaStarResult
from ..mathutils import strip, functionals, soliton
from ..solvers import minimize
from ..utils.errors import StepFailureError, BracketNotFoundError, GammaStarConsistencyError, InadmissibleParamsError
from ..utils.logging import Logfile, debug_print
from ..utils import settings
from dataclasses import replace
from typing import List,Optional,Callable,Tuple
import copy
import math
import multiprocessing
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import optimize, special

PREFIX = "Shrink:"


def _energy_run(cfg : MinimizeConfig, params : ProblemParams, grid : StripGrid, start : Optional[Field] = None) -> MinimizeResult:
    try:
        return minimize.minimize_energy(cfg,params,grid,start=start)
    except StepFailureError as e:
        debug_print(PREFIX,1,"L=%g: %s",params.L,e.message)
        return e.result


def sweep_params(params : ProblemParams) -> ProblemParams:
    """Unit mass unless a mass is given; omega is determined by the run."""
    m = params.m if params.m is not None else 1.0
    return replace(params,m=m,omega=None)


def sweep_grid(params : ProblemParams, nx : Optional[int] = None, ny : Optional[int] = None, x_extent : Optional[float] = None) -> StripGrid:
    """The grid shared by all widths: X from the 1D frequency of mass m."""
    om = soliton.omega_of_mass(params.m,params.gamma,params.p)
    return StripGrid.for_params(params.with_omega(om),nx,ny,x_extent)


def discrete_1d_reference(cfg : MinimizeConfig, params : ProblemParams, grid : StripGrid) -> Field:
    """The y-constant discrete energy minimizer on `grid`.

    Computed on a two-row grid from the extended soliton; y-constant fields
    stay y-constant under the flow, so the result extends to any ny."""
    flat = StripGrid(grid.x_extent,grid.nx,2)
    ref_cfg = replace(cfg,start=StartEnum.SOLITON_EXTENSION,start_file=None)
    res = _energy_run(ref_cfg,params.with_width(1e-3),flat)
    col = strip.mean_y(res.field)
    return Field(grid,np.repeat(col[:,None],grid.ny,axis=1))


def _h1_distance(u : Field, v : Field, h : float) -> float:
    d = Field(u.grid,u.values - v.values)
    return math.sqrt(strip.kinetic_x(d) + h*strip.kinetic_y(d) + strip.mass(d))


def make_record(L : float, res : MinimizeResult, params : ProblemParams, reference : Field, e1d : float) -> SweepRecord:
    p = params.with_width(L)
    ref_energy = functionals.energy(reference,p)
    dy = p.h*res.report.kinetic_y
    threshold = settings.get('shrink.y_independent_threshold')*res.report.mass
    rec = res.recovered_omega if res.recovered_omega is not None else float('nan')
    lag = res.diagnostics.lagrange_omega if res.diagnostics.lagrange_omega is not None else float('nan')
    return SweepRecord(L=L, energy=res.report.energy, dy_norm_scaled=dy,
                       recovered_omega=rec, lagrange_omega=lag,
                       e1d=e1d, e1d_gap=res.report.energy - ref_energy,
                       e1d_gap_continuum=res.report.energy - e1d,
                       h1_gap=_h1_distance(res.field,reference,p.h),
                       transverse_variation=res.diagnostics.transverse_variation,
                       y_independent=bool(dy < threshold),
                       converged=res.converged, iterations=res.iterations)


def sweep_L(params : ProblemParams, lengths : List[float], cfg : Optional[MinimizeConfig] = None,
            grid : Optional[StripGrid] = None, log : Optional[str] = None,
            fields : Optional[dict] = None) -> List[SweepRecord]:
    """Energy minimizers at mass m over the widths, largest first, each run
    warm-started from the previous minimizer.

    If `fields` is a dict, the converged fields are stored in it by width.
    """
    params = sweep_params(params)
    if not params.gamma < 0:
        raise InadmissibleParamsError("width sweeps need gamma<0", gamma=params.gamma)
    params.check_energy()
    if cfg is None:
        cfg = MinimizeConfig(mode=MinimizeModeEnum.MASS_ENERGY)
    if grid is None:
        grid = sweep_grid(params)
    om1d = soliton.omega_of_mass(params.m,params.gamma,params.p)
    e1d = soliton.energy_1d(Soliton1D(om1d,params.gamma,params.p))
    reference = discrete_1d_reference(cfg,params,grid)
    debug_print(PREFIX,1,"1D reference: omega %.12g, continuum energy %.12g, discrete energy %.12g",
                om1d,e1d,functionals.energy(reference,params))

    records = []
    logfile = Logfile(log) if log is not None else None
    start = None
    try:
        for L in sorted(lengths,reverse=True):
            res = _energy_run(cfg,params.with_width(L),grid,start=start)
            rec = make_record(L,res,params,reference,e1d)
            records.append(rec)
            if fields is not None:
                fields[L] = res.field
            if logfile is not None:
                logfile.log(rec)
            debug_print(PREFIX,1,"L=%g energy %.12g gap %.3e dy %.3e %s",L,rec.energy,rec.e1d_gap,rec.dy_norm_scaled,
                        "y-independent" if rec.y_independent else "y-dependent")
            start = res.field
    finally:
        if logfile is not None:
            logfile.close()
    return records


def make_classifier(params : ProblemParams, cfg : MinimizeConfig, grid : StripGrid, warm : Optional[dict] = None) -> Callable[[float],bool]:
    """L -> whether the energy minimizer at width L is y-independent.  Runs are
    warm-started from the nearest wider field in `warm`, which is updated."""
    params = sweep_params(params)
    warm = warm if warm is not None else {}
    threshold = settings.get('shrink.y_independent_threshold')
    def classify(L : float) -> bool:
        wider = [w for w in warm if w > L]
        start = warm[min(wider)] if wider else None
        res = _energy_run(cfg,params.with_width(L),grid,start=start)
        warm[L] = res.field
        return params.with_width(L).h*res.report.kinetic_y < threshold*res.report.mass
    return classify


def estimate_L_star(sweep : List[SweepRecord], classify : Optional[Callable[[float],bool]] = None,
                    tol : Optional[float] = None, max_refinements : int = 40) -> LStarEstimate:
    """Brackets the first y-dependent width above the y-independent ones and
    bisects with `classify` until the bracket is narrower than tol."""
    recs = sorted(sweep,key=lambda r: r.L)
    first_dep = next((i for i,r in enumerate(recs) if not r.y_independent),None)
    if first_dep is None or first_dep == 0:
        raise BracketNotFoundError("the sweep has no y-independent width below a y-dependent one",
                                   widths=[r.L for r in recs], flags=[r.y_independent for r in recs])
    lo,hi = recs[first_dep-1].L,recs[first_dep].L
    tol = tol if tol is not None else settings.get('shrink.bracket_width')
    n = 0
    if classify is not None:
        while hi - lo > tol and n < max_refinements:
            mid = 0.5*(lo+hi)
            if classify(mid):
                lo = mid
            else:
                hi = mid
            n += 1
            debug_print(PREFIX,2,"L* bracket (%g, %g)",lo,hi)
    return LStarEstimate(lower=lo,upper=hi,estimate=0.5*(lo+hi),refinements=n)


def cosine_moment(q : float) -> float:
    """(1/2pi) int_0^{2pi} |cos t|^q dt."""
    return math.exp(special.gammaln((q+1)/2.0) - special.gammaln(q/2.0+1.0))/math.sqrt(math.pi)

def fixed_profile_quotient(p : float) -> float:
    """int f'^2 / (int f^{p+1} - 1) for f = sqrt(2)|cos(2 pi y)| on [0,1]."""
    return 4.0*math.pi**2/(2.0**((p+1)/2.0)*cosine_moment(p+1) - 1.0)

def perturbative_quotient(p : float) -> float:
    """Limit of the quotient along f = 1 + eps cos(pi y), eps -> 0."""
    return 2.0*math.pi**2/(p*p - 1.0)


def profile_quotient(a : np.ndarray, p : float, nodes : Tuple[np.ndarray,np.ndarray]) -> float:
    """The quotient for f = 1 + sum_k a_k cos(k pi y), normalized to unit L2 norm."""
    a = np.asarray(a,dtype=float)
    k = np.arange(1,len(a)+1)
    y,w = nodes
    f = 1.0 + np.cos(np.pi*np.outer(y,k)) @ a
    n2 = 1.0 + 0.5*np.sum(a*a)
    kin = 0.5*np.sum((a*k*np.pi)**2)/n2
    den = float(np.sum(w*np.abs(f)**(p+1)))/n2**((p+1)/2.0) - 1.0
    if not den > 1e-12:
        return float('inf')
    return kin/den

def optimize_profile_quotient(p : float, modes : Optional[int] = None) -> float:
    """Smallest quotient found over cosine series with `modes` terms (Nelder-Mead
    from a few starts), never above the near-constant limit."""
    modes = modes if modes is not None else int(settings.get('shrink.lstarstar_modes',6))
    g,w = np.polynomial.legendre.leggauss(400)
    nodes = (0.5*(g+1.0),0.5*w)
    best = perturbative_quotient(p)
    for j in range(min(modes,3)):
        a0 = np.zeros(modes)
        a0[j] = 0.5
        res = optimize.minimize(profile_quotient,a0,args=(p,nodes),method='Nelder-Mead',
                                options={'xatol':1e-10,'fatol':1e-12,'maxiter':20000})
        if np.isfinite(res.fun):
            best = min(best,float(res.fun))
    return best


def l_star_star_bound(m : float, gamma : float, p : float, optimize_f : bool = False) -> LStarStarBound:
    """(L**)^2 <= (p+1) m / 2 * quotient / int phi^{p+1}, with phi the 1D
    soliton of mass m.  For p=3 and f = sqrt(2)|cos(2 pi y)| this is
    16 pi^2 m / int phi^4."""
    om = soliton.omega_of_mass(m,gamma,p)
    pot = soliton.potential_1d(Soliton1D(om,gamma,p))
    prefactor = (p+1)*m/(2.0*pot)
    q = fixed_profile_quotient(p)
    sq = prefactor*q
    out = LStarStarBound(m=m,gamma=gamma,p=p,omega=om,potential_1d=pot,quotient=q,
                         squared_bound=sq,bound=math.sqrt(sq))
    if optimize_f:
        qo = min(q,optimize_profile_quotient(p))
        out.optimized_quotient = qo
        out.optimized_squared_bound = prefactor*qo
    return out


def lowest_linearized_eigenvalue(omega : float, gamma : float, p : float,
                                 extent : Optional[float] = None, nodes : Optional[int] = None) -> float:
    """Lowest eigenvalue of -d_xx + omega + gamma delta_0 - p phi^{p-1} on
    [-extent, extent] with Dirichlet ends."""
    extent = extent if extent is not None else settings.get('shrink.transverse_extent')
    nodes = int(nodes if nodes is not None else settings.get('shrink.transverse_nodes'))
    if nodes % 2 == 0:
        nodes += 1
    x = np.linspace(-extent,extent,nodes)[1:-1]
    hx = 2.0*extent/(nodes-1)
    phi = soliton.eval_profile(Soliton1D(omega,gamma,p),x)
    diag = 2.0/hx**2 + omega - p*phi**(p-1)
    diag[len(x)//2] += gamma/hx
    off = -np.ones(len(x)-1)/hx**2
    A = sp.diags([off,diag,off],[-1,0,1],format='csc')
    # the discrete -d_xx + gamma delta_0 is bounded below by -gamma^2/4
    sigma = omega - p*float(np.max(phi))**(p-1) - (gamma**2/4.0 if gamma < 0 else 0.0) - 1.0
    vals = spla.eigsh(A,k=1,sigma=sigma,which='LM',v0=np.exp(-x*x),return_eigenvectors=False)
    return float(vals[0])

def transverse_instability_width(omega : float, gamma : float, p : float, **kwargs) -> float:
    """pi / sqrt(-mu_0): widths above this destabilize the y-constant profile
    through the first Neumann mode cos(pi y/L).  inf if mu_0 >= 0."""
    mu0 = lowest_linearized_eigenvalue(omega,gamma,p,**kwargs)
    if mu0 >= 0:
        return float('inf')
    return math.pi/math.sqrt(-mu0)


def shifted_profile(values : np.ndarray, sigma_cells : int) -> np.ndarray:
    """psi(|x| + sigma, y) on the same grid for an integer number of cells;
    negative shifts move the profile inward.  Nodes with no source are 0."""
    nx = values.shape[0]
    c = (nx-1)//2
    idx = c + np.abs(np.arange(nx) - c) + sigma_cells
    valid = (idx >= 0) & (idx < nx)
    out = np.zeros_like(values)
    out[valid] = values[idx[valid]]
    return out

def shifted_profile_continuous(values : np.ndarray, grid : StripGrid, sigma : float) -> np.ndarray:
    """psi(|x| + sigma, y) by linear interpolation in x."""
    x = grid.x()
    target = np.abs(x) + sigma
    out = np.empty_like(values)
    for j in range(values.shape[1]):
        out[:,j] = np.interp(target,x,values[:,j],left=0.0,right=0.0)
    return out


def gamma_zero_minimizer(omega : float, p : float, L : float, grid : Optional[StripGrid] = None,
                         cfg : Optional[MinimizeConfig] = None) -> MinimizeResult:
    cfg = cfg if cfg is not None else MinimizeConfig()
    cfg = replace(cfg,symmetric_x=True)
    return minimize.minimize_action(cfg,ProblemParams(p=p,gamma=0.0,L=L,omega=omega),grid)


def gamma_star(omega : float, L : float, grid : Optional[StripGrid] = None, p : float = 3.0,
               psi : Optional[Field] = None, cfg : Optional[MinimizeConfig] = None) -> GammaStarResult:
    """gamma* = -I_{omega,0}(psi_{-sigma*}) / T(psi_{-sigma*}), sigma* the
    minimizer of I_{omega,0}(psi_{-sigma}) over sigma in (0, X/2].

    psi is a gamma=0 action minimizer (computed if not given), symmetrized in
    x.  The profile is padded by the largest shift so that integer shifts
    satisfy I(psi_s) + I(psi_-s) = 2 I(psi) exactly; sigma* is then refined
    between the neighbouring integer shifts with interpolated profiles.
    """
    if not omega > 0:
        raise InadmissibleParamsError("gamma* needs omega>0", omega=omega)
    if psi is None:
        psi = gamma_zero_minimizer(omega,p,L,grid,cfg).field
    psi = minimize.enforce_symmetry(psi)
    g0 = psi.grid
    smax = max(1,int(math.floor(0.5*g0.x_extent/g0.hx)))
    padded = g0.pad(smax)
    v = np.zeros(padded.shape)
    v[smax:smax+g0.nx] = psi.values
    params = ProblemParams(p=p,gamma=0.0,L=L,omega=omega)
    I = lambda w : functionals.nehari(Field(padded,w),params)
    I0 = I(v)

    shifts = np.arange(1,smax+1)
    inward = np.empty(len(shifts))
    residual = 0.0
    for n,s in enumerate(shifts):
        inward[n] = I(shifted_profile(v,-s))
        outward = I(shifted_profile(v,s))
        residual = max(residual,abs(outward + inward[n] - 2.0*I0))
    best = int(np.argmin(inward))
    lo = shifts[max(best-1,0)]*padded.hx
    hi = shifts[min(best+1,len(shifts)-1)]*padded.hx
    tol = settings.get('shrink.sigma_tol',1e-6)
    f = lambda sig : I(shifted_profile_continuous(v,padded,-sig))
    if hi > lo:
        opt = optimize.minimize_scalar(f,bounds=(lo,hi),method='bounded',options={'xatol':tol})
        sigma_star,i_star = float(opt.x),float(opt.fun)
    else:
        sigma_star,i_star = float(lo),float(inward[best])
    if inward[best] < i_star:
        sigma_star,i_star = float(shifts[best]*padded.hx),float(inward[best])
        w = shifted_profile(v,-shifts[best])
    else:
        w = shifted_profile_continuous(v,padded,-sigma_star)
    T = strip.trace_sq(Field(padded,w))
    gs = -i_star/T
    debug_print(PREFIX,1,"sigma* %.6g, I(psi_-sigma*) %.6g, gamma* %.6g, identity residual %.3e",sigma_star,i_star,gs,residual)
    if not 0 < gs < 2.0*math.sqrt(omega):
        raise GammaStarConsistencyError("gamma* outside (0, 2 sqrt(omega))", gamma_star=gs, omega=omega)
    return GammaStarResult(omega=omega,L=L,sigma_star=sigma_star,nehari_shifted=i_star,
                           trace_shifted=T,gamma_star=gs,identity_residual=residual)


def symmetric_existence_check(gamma : float, omega : float, p : float, L : float, s0 : float,
                              grid : Optional[StripGrid] = None, cfg : Optional[MinimizeConfig] = None) -> dict:
    """Symmetric action minimization at a repulsive gamma; compares the level
    with twice the gamma=0 level s0, which a run-away pair would reach."""
    cfg = cfg if cfg is not None else MinimizeConfig()
    res = minimize.minimize_action(replace(cfg,symmetric_x=True),ProblemParams(p=p,gamma=gamma,L=L,omega=omega),grid)
    S = res.report.action
    return {'gamma':gamma,'action':S,'two_s0':2.0*s0,'below_dichotomy':bool(S < 2.0*s0),
            'converged':res.converged,'sym_defect':res.diagnostics.sym_defect}


def _cold_worker(task) -> dict:
    L,params,cfg,grid,seed,snapshot = task
    settings.settings().clear()
    settings.settings().update(copy.deepcopy(snapshot))
    res = _energy_run(replace(cfg,start=StartEnum.RANDOM,seed=seed),params.with_width(L),grid)
    return {'L':L,'seed':seed,'energy':res.report.energy,'converged':res.converged,
            'dy_norm_scaled':params.with_width(L).h*res.report.kinetic_y}


def cold_start_verify(records : List[SweepRecord], params : ProblemParams, cfg : Optional[MinimizeConfig] = None,
                      grid : Optional[StripGrid] = None, jobs : int = 1, seed : int = 0,
                      rtol : float = 1e-6) -> List[dict]:
    """Re-runs the sweep at a few sentinel widths from random starts, in
    parallel worker processes when jobs > 1, and compares energies."""
    params = sweep_params(params)
    if cfg is None:
        cfg = MinimizeConfig(mode=MinimizeModeEnum.MASS_ENERGY)
    if grid is None:
        grid = sweep_grid(params)
    recs = sorted(records,key=lambda r: r.L)
    k = min(len(recs),int(settings.get('shrink.sentinels',3)))
    picks = sorted(set(np.round(np.linspace(0,len(recs)-1,k)).astype(int).tolist()))
    snapshot = copy.deepcopy(settings.settings())
    tasks = [(recs[i].L,params,cfg,grid,seed+n,snapshot) for n,i in enumerate(picks)]
    if jobs > 1:
        ctx = multiprocessing.get_context('spawn')
        with ctx.Pool(min(jobs,len(tasks))) as pool:
            cold = pool.map(_cold_worker,tasks)
    else:
        cold = [_cold_worker(t) for t in tasks]
    out = []
    for i,c in zip(picks,cold):
        warm = recs[i].energy
        c['warm_energy'] = warm
        c['agree'] = bool(abs(c['energy'] - warm) <= rtol*abs(warm))
        c['cold_lower'] = bool(c['energy'] < warm - rtol*abs(warm))
        out.append(c)
    return out
