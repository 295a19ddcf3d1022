"""Constrained minimization on the strip.

Two problems share one descent loop:

- ``nehari_action``: minimize the action over the Nehari manifold, i.e. the
  quantity (p-1)/(2(p+1)) ||u||_{p+1}^{p+1} over fields with I(u)=0;
- ``mass_energy``: minimize the energy at fixed mass m.

Directions are Sobolev gradients, d = (-Delta_h + c)^{-1} grad, which keeps
the step independent of the grid spacing.  Every trial point is clamped to
u >= 0, optionally symmetrized in x, and projected back onto the constraint;
steps are accepted by an Armijo test with halving.
"""
from ..state.grid import StripGrid, Field
from ..state.params import ProblemParams
from ..state.soliton import Soliton1D
from ..state.minimize import MinimizeConfig, MinimizeResult, MinimizeDiagnostics, MinimizeModeEnum, StartEnum
from ..state.reports import RearrangementDiagnostics
from ..mathutils import strip, functionals, soliton
from ..utils.errors import ProjectionUndefinedError, StepFailureError, InadmissibleParamsError, BranchAmbiguityError
from ..utils.logging import Logfile, debug_print
from ..utils import settings, snapshot
from dataclasses import replace
from typing import Optional,Tuple
import math
import numpy as np

PREFIX = "Minimize:"
LOG_COLUMNS = ['iter','objective','grad_norm','I','M','dy_norm']


def enforce_symmetry(u : Field) -> Field:
    """Even part in x."""
    return u.with_values(0.5*(u.values + u.values[::-1]))

def symmetry_defect(u : Field) -> float:
    return float(np.max(np.abs(u.values - u.values[::-1])))


def nehari_factor(u : Field, params : ProblemParams) -> float:
    """t(u) = (Q(u)/||u||_{p+1}^{p+1})^{1/(p-1)}, so that I(t u) = 0."""
    Q = functionals.quadratic_form(u,params)
    P = strip.potential(u,params.p)
    if not P > 0:
        raise ProjectionUndefinedError("Nehari projection of a zero field")
    if not Q > 0:
        raise ProjectionUndefinedError("Nehari projection needs a positive quadratic part", quadratic=Q)
    return (Q/P)**(1.0/(params.p-1))

def nehari_project(u : Field, params : ProblemParams) -> Field:
    return u.scaled(nehari_factor(u,params))

def mass_project(u : Field, m : float) -> Field:
    M = strip.mass(u)
    if not M > 0:
        raise ProjectionUndefinedError("mass normalization of a zero field")
    return u.scaled(math.sqrt(m/M))


def _soliton_omega(cfg : MinimizeConfig, params : ProblemParams) -> Optional[float]:
    if cfg.mode == MinimizeModeEnum.NEHARI_ACTION:
        om = params.omega
    else:
        try:
            om = soliton.omega_of_mass(params.m,params.gamma,params.p)
        except (InadmissibleParamsError,BranchAmbiguityError):
            return None
    if om is None or not (om > 0 and om > params.gamma**2/4.0):
        return None
    return om

def gaussian_bump(grid : StripGrid, params : ProblemParams, cfg : MinimizeConfig) -> Field:
    """exp(-((x-x0)/w)^2) times either a corner factor exp(-(L y/w)^2) or
    (1 + a cos(pi y))."""
    w = cfg.bump_width
    def f(X,Y):
        core = np.exp(-((X-cfg.bump_x)/w)**2)
        if cfg.bump_corner:
            return core*np.exp(-(params.L*Y/w)**2)
        return core*(1.0 + cfg.transverse_modulation*np.cos(np.pi*Y))
    return Field.from_function(grid,f)

def random_start(grid : StripGrid, seed : int) -> Field:
    """Positive sum of four random bumps with random transverse modulation."""
    rng = np.random.default_rng(seed)
    X,Y = grid.mesh()
    v = np.zeros(grid.shape)
    for _ in range(4):
        c = rng.uniform(-0.25,0.25)*grid.x_extent
        w = rng.uniform(0.5,2.0)
        k = rng.integers(1,4)
        v += rng.uniform(0.5,1.5)*np.exp(-((X-c)/w)**2)*(1.0 + 0.3*rng.uniform(-1,1)*np.cos(k*np.pi*Y))
    return Field(grid,v)

def initial_field(cfg : MinimizeConfig, params : ProblemParams, grid : StripGrid) -> Field:
    """Starting iterate before clamping and projection."""
    if cfg.start == StartEnum.FILE:
        u,_ = snapshot.load_field(cfg.start_file)
        if u.grid != grid:
            raise ValueError("Start snapshot grid {} does not match {}".format(u.grid,grid))
        return u
    if cfg.start == StartEnum.RANDOM:
        return random_start(grid,cfg.seed)
    if cfg.start == StartEnum.SOLITON_EXTENSION:
        om = _soliton_omega(cfg,params)
        if om is not None:
            return soliton.extend_to_strip(Soliton1D(om,params.gamma,params.p),grid)
        debug_print(PREFIX,1,"no 1D soliton for these parameters, starting from a gaussian bump")
    return gaussian_bump(grid,params,cfg)


def default_grid(cfg : MinimizeConfig, params : ProblemParams) -> StripGrid:
    om = _soliton_omega(cfg,params) if cfg.mode == MinimizeModeEnum.MASS_ENERGY else params.omega
    return StripGrid.for_params(replace(params,omega=om))


def positivity_and_rearrangement_check(u : Field) -> RearrangementDiagnostics:
    """Largest violations of positivity (interior), evenness in x, decay in
    |x| and monotonicity in y.  A y-constant column counts as monotone."""
    v = u.values
    c = u.grid.center
    interior = v[1:-1]
    positivity = max(0.0,-float(np.min(interior))) if interior.size else 0.0
    right = np.diff(v[c:],axis=0)
    left = np.diff(v[:c+1][::-1],axis=0)
    mono_x = max(0.0,float(np.max(right)) if right.size else 0.0,float(np.max(left)) if left.size else 0.0)
    dy = np.diff(v,axis=1)
    inc = np.max(np.maximum(dy,0.0),axis=1)
    dec = np.max(np.maximum(-dy,0.0),axis=1)
    mono_y = float(np.max(np.minimum(inc,dec))) if dy.size else 0.0
    return RearrangementDiagnostics(positivity=positivity,even_symmetry=symmetry_defect(u),
                                    monotone_x=mono_x,monotone_y=mono_y,
                                    sup_norm=float(np.max(np.abs(v))))


def decay_rate(u : Field, window : Optional[Tuple[float,float]] = None, floor : float = 1e-8) -> float:
    """Slope of log(y-mean of u) against x over x in window (default
    [X/4, 3X/4]) where the mean exceeds floor."""
    x = u.grid.x()
    col = strip.mean_y(u)
    lo,hi = window if window is not None else (0.25*u.grid.x_extent,0.75*u.grid.x_extent)
    sel = (x >= lo) & (x <= hi) & (col > floor)
    if np.count_nonzero(sel) < 2:
        raise ValueError("decay_rate: fewer than two samples in the fit window")
    slope,_ = np.polyfit(x[sel],np.log(col[sel]),1)
    return float(slope)


def _recenter(values : np.ndarray, grid : StripGrid) -> np.ndarray:
    u = Field(grid,values)
    k = int(round(strip.centroid_x(u)/grid.hx))
    if k == 0:
        return values
    out = np.zeros_like(values)
    if k > 0:
        out[:-k] = values[k:]
    else:
        out[-k:] = values[:k]
    return out


class _Problem:
    """Objective, projection and direction of one of the two problems."""
    def __init__(self, cfg : MinimizeConfig, params : ProblemParams, grid : StripGrid):
        self.cfg = cfg
        self.params = params
        self.grid = grid
        self.nehari = cfg.mode == MinimizeModeEnum.NEHARI_ACTION
        if self.nehari:
            shift = params.omega
        else:
            shift = settings.get('minimize.preconditioner_shift',1.0)
        self.precondition = strip.sobolev_solver(grid,params.h,float(shift))

    def project(self, values : np.ndarray) -> Field:
        if self.cfg.positivity:
            values = np.maximum(values,0.0)
        u = Field(self.grid,strip.apply_dirichlet(values))
        if self.cfg.symmetric_x:
            u = enforce_symmetry(u)
        if self.nehari:
            return nehari_project(u,self.params)
        return mass_project(u,self.params.m)

    def objective(self, u : Field) -> float:
        p = self.params.p
        if self.nehari:
            return (p-1)/(2.0*(p+1))*strip.potential(u,p)
        return functionals.energy(u,self.params)

    def direction(self, u : Field):
        """Returns (d, slope, stationarity norm, multiplier omega or None)."""
        if self.nehari:
            g = functionals.grad_action(u,self.params)
            d = self.precondition(g.values)
            return d, strip.inner(g,d,self.grid), strip.norm(g), None
        g = functionals.grad_energy(u,self.params)
        M = strip.mass(u)
        mu = strip.inner(g,u)/M
        r = g.values - mu*u.values
        if self.cfg.symmetric_x:
            r = 0.5*(r + r[::-1])
        d = self.precondition(g.values)
        pu = self.precondition(u.values)
        d = d - strip.inner(u,d,self.grid)/strip.inner(u,pu,self.grid)*pu
        return d, strip.inner(g,d,self.grid), strip.norm(r,self.grid), -mu

    def nehari_value(self, u : Field, omega : Optional[float]) -> float:
        if omega is None:
            return float('nan')
        return functionals.quadratic_form(u,self.params,omega) - strip.potential(u,self.params.p)


def _resolve(cfg : MinimizeConfig, name : str):
    v = getattr(cfg,name)
    return v if v is not None else settings.get('minimize.'+name)


def _finish(problem : _Problem, u : Field, diag : MinimizeDiagnostics, history : list) -> MinimizeResult:
    params = problem.params
    if not problem.nehari and diag.lagrange_omega is not None:
        om = diag.lagrange_omega
        if om > 0 and om > params.gamma**2/4.0:
            params = params.with_omega(om)
        else:
            params = replace(params,omega=None)
    report = functionals.eval_all(u,params)
    try:
        rec = functionals.recover_omega(u,problem.params)
    except (ValueError,InadmissibleParamsError):
        rec = None
    diag.dy_norm = problem.params.h*report.kinetic_y
    diag.transverse_variation = functionals.transverse_variation(u)
    diag.centroid = strip.centroid_x(u)
    diag.runaway_score = abs(diag.centroid)/(0.5*u.grid.x_extent)
    diag.sym_defect = symmetry_defect(u)
    return MinimizeResult(field=u,report=report,recovered_omega=rec,diagnostics=diag,history=history)


def _descend(cfg : MinimizeConfig, params : ProblemParams, grid : StripGrid, start : Optional[Field], log : Optional[str]) -> MinimizeResult:
    problem = _Problem(cfg,params,grid)
    step = _resolve(cfg,'step')
    max_iters = int(_resolve(cfg,'max_iters'))
    tol = _resolve(cfg,'tol_grad')
    max_backtracks = int(settings.get('minimize.max_backtracks'))
    armijo = settings.get('minimize.armijo')
    slack = settings.get('minimize.roundoff_slack')
    recenter_every = int(settings.get('minimize.recenter_every'))
    log_every = max(1,int(settings.get('minimize.log_every',1)))
    centroid_limit = settings.get('minimize.runaway_centroid_fraction')*grid.x_extent
    trace_floor = settings.get('minimize.runaway_trace_fraction')

    u0 = start if start is not None else initial_field(cfg,params,grid)
    if u0.grid != grid:
        raise ValueError("Start field grid {} does not match {}".format(u0.grid,grid))
    u = problem.project(u0.values)
    J = problem.objective(u)
    diag = MinimizeDiagnostics()
    history = []
    logfile = Logfile(log,columns=LOG_COLUMNS) if log is not None else None
    try:
        for it in range(max_iters+1):
            d,slope,gnorm,omega_mult = problem.direction(u)
            diag.iterations = it
            diag.grad_norm = gnorm
            diag.objective = J
            diag.lagrange_omega = omega_mult
            row = {'iter':it,'objective':J,'grad_norm':gnorm,
                   'I':problem.nehari_value(u,params.omega if problem.nehari else omega_mult),
                   'M':strip.mass(u),'dy_norm':params.h*strip.kinetic_y(u)}
            history.append(row)
            if logfile is not None and it % log_every == 0:
                logfile.log(row)
            debug_print(PREFIX,2,"iter %d objective %.15g grad %.3e",it,J,gnorm)
            if gnorm < tol:
                diag.converged = True
                diag.exit_reason = 'converged'
                break
            if it == max_iters:
                diag.exit_reason = 'max_iters'
                break
            tau = step
            accepted = None
            for _ in range(max_backtracks+1):
                try:
                    trial = problem.project(u.values - tau*d)
                except ProjectionUndefinedError:
                    trial = None
                if trial is not None:
                    Jt = problem.objective(trial)
                    if Jt <= J - armijo*tau*slope + slack*abs(J):
                        accepted = (trial,Jt)
                        break
                diag.backtracks += 1
                tau *= 0.5
            if accepted is None:
                diag.exit_reason = 'step_failure'
                if not problem.nehari:
                    raise StepFailureError("energy did not decrease after {} halvings".format(max_backtracks),
                                           result=_finish(problem,u,diag,history), iteration=it)
                break
            u,J = accepted
            if params.gamma == 0 and not cfg.symmetric_x and recenter_every > 0 and (it+1) % recenter_every == 0:
                # the grid shift moves mass onto the Dirichlet columns
                u = problem.project(_recenter(u.values,grid))
                J = problem.objective(u)
            if params.gamma != 0:
                M = strip.mass(u)
                if abs(strip.centroid_x(u)) > centroid_limit or strip.trace_sq(u) < trace_floor*M:
                    diag.runaway = True
                    diag.exit_reason = 'runaway'
                    debug_print(PREFIX,1,"run-away detected at iteration %d",it)
                    break
    finally:
        if logfile is not None:
            logfile.close()
    res = _finish(problem,u,diag,history)
    debug_print(PREFIX,1,"%s after %d iterations, objective %.12g, gradient %.3e",diag.exit_reason,diag.iterations,diag.objective,diag.grad_norm)
    return res


def minimize_action(cfg : MinimizeConfig, params : ProblemParams, grid : Optional[StripGrid] = None,
                    start : Optional[Field] = None, log : Optional[str] = None) -> MinimizeResult:
    """Minimizes the action on the Nehari manifold.

    For gamma > 0 outside the symmetric subspace no minimizer exists; the run
    is still carried out and ends flagged as run-away.
    """
    params.check_action()
    cfg = replace(cfg,mode=MinimizeModeEnum.NEHARI_ACTION)
    if params.gamma > 0 and not cfg.symmetric_x:
        debug_print(PREFIX,1,"gamma>0 without the symmetric subspace: expecting run-away")
    if grid is None:
        grid = default_grid(cfg,params)
    return _descend(cfg,params,grid,start,log)


def minimize_energy(cfg : MinimizeConfig, params : ProblemParams, grid : Optional[StripGrid] = None,
                    start : Optional[Field] = None, log : Optional[str] = None) -> MinimizeResult:
    """Minimizes the energy at mass params.m (normalized gradient flow)."""
    params.check_energy()
    if not params.gamma < 0 and not cfg.symmetric_x:
        raise InadmissibleParamsError("full-space energy minimization needs gamma<0", gamma=params.gamma)
    cfg = replace(cfg,mode=MinimizeModeEnum.MASS_ENERGY)
    if grid is None:
        grid = default_grid(cfg,params)
    return _descend(cfg,params,grid,start,log)


def compare_action_energy(cfg : MinimizeConfig, params : ProblemParams, grid : Optional[StripGrid] = None) -> dict:
    """Energy minimizer at mass m, then the action minimizer at its Lagrange
    frequency.  Both are reported; no equivalence is asserted."""
    e = minimize_energy(cfg,params,grid)
    om = e.diagnostics.lagrange_omega
    a = minimize_action(cfg,params.with_omega(om),e.field.grid,start=e.field)
    return {'omega':om,
            'energy_run':{'energy':e.report.energy,'mass':e.report.mass,'converged':e.converged},
            'action_run':{'action':a.report.action,'mass':a.report.mass,'converged':a.converged},
            'mass_gap':a.report.mass - e.report.mass,
            'field_gap':strip.norm(a.field.values - e.field.values,e.field.grid)}
