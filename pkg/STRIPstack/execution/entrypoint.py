"""Parses run configurations and dispatches them to the solvers.

A run writes into one output folder: settings.yaml and meta.yaml, the
command's CSV tables, field snapshots and summary.json, or error.json when a
domain error stops it.  Exit codes: 0 success, 2 finished without
convergence, 1 error.
"""
from ..utils import settings,config,serialization
from ..utils.errors import StripError,ConfigValidationError,StepFailureError,InadmissibleParamsError,BranchAmbiguityError
from ..utils.serialization import to_dict
from ..state import RunConfig,ProblemParams,GreensSpec,MinimizeModeEnum,MinimizeResult
from ..mathutils import functionals,soliton,greens
from ..solvers import minimize
from ..experiments import shrink_lab
from ..utils import snapshot
from .logging import LoggingManager
from dataclasses import replace
from typing import Optional
import datetime
import traceback
import dacite
import numpy as np
import os

EXECUTION_PREFIX = "Execution:"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def from_document(data : dict) -> RunConfig:
    """Validated RunConfig from an already parsed document."""
    if not isinstance(data,dict):
        raise ConfigValidationError('<root>','the configuration must be a mapping')
    try:
        cfg = serialization.from_dict(RunConfig,data,strict=True)
    except dacite.UnexpectedDataError as e:
        raise ConfigValidationError(','.join(sorted(e.keys)),'unknown key')
    except dacite.MissingValueError as e:
        raise ConfigValidationError(e.field_path,'missing value')
    except dacite.WrongTypeError as e:
        raise ConfigValidationError(e.field_path,'expected {}, got {!r}'.format(getattr(e.field_type,'__name__',e.field_type),e.value))
    except dacite.DaciteError as e:
        raise ConfigValidationError(getattr(e,'field_path',None) or '<root>',str(e))
    except (ValueError,TypeError) as e:
        #casting a non-numeric value to float
        raise ConfigValidationError('<root>',str(e))
    cfg.validate()
    return cfg


def parse_config(text : str, fmt : str = 'json') -> RunConfig:
    """Builds a validated RunConfig from JSON (default) or YAML text.

    Raises ConfigParseError (line, column) on malformed text and
    ConfigValidationError (field, rule) on unknown keys, wrong types or
    inadmissible parameters.
    """
    return from_document(config.parse_config_text(text,fmt))


def load_run_config(fn : str) -> RunConfig:
    """Loads a run file, following !include directives.  A top-level `run`
    key holding the configuration is accepted too."""
    data = config.load_config_recursive(fn)
    if isinstance(data,dict) and set(data.keys()) == {'run'}:
        data = data['run']
    return from_document(data)


def output_folder(cfg : RunConfig) -> str:
    if cfg.outputs.out_dir is not None:
        return cfg.outputs.out_dir
    topfolder = settings.get('run.out_dir','logs')
    name = cfg.command if cfg.subcommand is None else cfg.command+'_'+cfg.subcommand
    suffix = datetime.datetime.now().strftime('%Y-%m-%d_%H-%M-%S')
    return os.path.join(topfolder,name+'_'+suffix)


def _problem_record(params : ProblemParams) -> dict:
    return to_dict(params)


def _energy_grid_omega(params : ProblemParams) -> Optional[float]:
    try:
        return soliton.omega_of_mass(params.m,params.gamma,params.p)
    except (InadmissibleParamsError,BranchAmbiguityError):
        return None


def _minimize_summary(res : MinimizeResult, params : ProblemParams, omega : Optional[float]) -> dict:
    u = res.field
    p_eval = params if omega is None else params.with_omega(omega)
    summary = {'E':res.report.energy,
               'S':res.report.action,
               'M':res.report.mass,
               'omega':omega,
               'recovered_omega':res.recovered_omega,
               'dy_norm':res.diagnostics.dy_norm,
               'residuals':to_dict(functionals.pohozaev_residuals(u,p_eval,omega)),
               'report':to_dict(res.report),
               'diagnostics':to_dict(res.diagnostics),
               'rearrangement':to_dict(minimize.positivity_and_rearrangement_check(u)),
               'converged':res.converged,
               'grid':to_dict(u.grid),
               'problem':_problem_record(params)}
    if omega is not None:
        summary['stationary_residual'] = functionals.residual_norm(u,p_eval,omega)
    try:
        summary['decay_rate'] = minimize.decay_rate(u)
    except ValueError:
        summary['decay_rate'] = None
    return summary


def run_soliton1d(cfg : RunConfig, logger : LoggingManager) -> int:
    prob = cfg.problem
    rows = soliton.soliton_table(cfg.soliton1d.omegas,prob.gamma,prob.p)
    t = logger.table(cfg.outputs.table,['omega','mass','energy','phi0'])
    for r in rows:
        t.log(r)
    logger.write_summary(cfg.outputs.summary,{'gamma':prob.gamma,'p':prob.p,'rows':rows,
                                             'monotone_branch':soliton.is_monotone_branch(prob.gamma,prob.p),
                                             'mass_floor':soliton.mass_floor(prob.gamma,prob.p)})
    return EXIT_OK


def run_minimize(cfg : RunConfig, logger : LoggingManager) -> int:
    prob = cfg.problem
    mcfg = cfg.minimize
    if cfg.seed is not None:
        mcfg = replace(mcfg,seed=cfg.seed)
    log = logger.path(cfg.outputs.log)
    if cfg.subcommand == 'action':
        grid = cfg.grid.build(prob)
        res = minimize.minimize_action(mcfg,prob,grid,log=log)
        omega = prob.omega
    else:
        grid = cfg.grid.build(prob.with_omega(_energy_grid_omega(prob)))
        try:
            res = minimize.minimize_energy(mcfg,prob,grid,log=log)
        except StepFailureError as e:
            if e.result is not None:
                logger.write_snapshot(cfg.outputs.snapshot,e.result.field,_problem_record(prob))
            raise
        omega = res.diagnostics.lagrange_omega
    logger.write_snapshot(cfg.outputs.snapshot,res.field,_problem_record(prob))
    logger.write_summary(cfg.outputs.summary,_minimize_summary(res,prob,omega))
    if res.diagnostics.runaway:
        logger.event('run-away')
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def run_greens(cfg : RunConfig, logger : LoggingManager) -> int:
    prob = cfg.problem
    g = cfg.greens
    spec = GreensSpec(omega=prob.omega,gamma=prob.gamma,L=prob.L,k_max=g.k_max,even_modes_only=g.even_modes_only)
    y = g.eta if g.y is None else g.y
    xs = np.linspace(g.x_min,g.x_max,g.n)
    vals,bound = greens.greens_eval(xs,y,g.xi,g.eta,spec,with_bound=True)
    t = logger.table(cfg.outputs.greens,['x','y','g'])
    for x,v in zip(xs,vals):
        t.log({'x':float(x),'y':y,'g':float(v)})
    logger.write_summary(cfg.outputs.summary,{'spec':to_dict(spec),'xi':g.xi,'eta':g.eta,'y':y,
                                             'k_max':greens.default_k_max(spec),'tail_bound':bound,
                                             'decay_slope':greens.decay_slope(spec,g.xi,g.eta,y),
                                             'mode_jump_0':greens.mode_jump(0,g.xi,spec)})
    return EXIT_OK


def _sweep_setup(cfg : RunConfig):
    params = shrink_lab.sweep_params(cfg.problem)
    mcfg = replace(cfg.minimize,mode=MinimizeModeEnum.MASS_ENERGY)
    if cfg.seed is not None:
        mcfg = replace(mcfg,seed=cfg.seed)
    grid = shrink_lab.sweep_grid(params,cfg.grid.nx,cfg.grid.ny,cfg.grid.x_extent)
    return params,mcfg,grid


def run_shrink(cfg : RunConfig, logger : LoggingManager) -> int:
    prob = cfg.problem
    sub = cfg.subcommand
    if sub == 'lstarstar':
        b = shrink_lab.l_star_star_bound(prob.m,prob.gamma,prob.p,cfg.shrink.optimize_f)
        logger.write_summary(cfg.outputs.summary,{'bound':to_dict(b)})
        return EXIT_OK
    if sub == 'gammastar':
        psi = None
        grid = cfg.grid.build(prob)
        if cfg.shrink.snapshot is not None:
            psi,_ = snapshot.load_field(cfg.shrink.snapshot)
            s0 = functionals.action(psi,replace(prob,gamma=0.0))
        else:
            r0 = shrink_lab.gamma_zero_minimizer(prob.omega,prob.p,prob.L,grid,cfg.minimize)
            psi,s0 = r0.field,r0.report.action
            logger.write_snapshot('gamma0_'+cfg.outputs.snapshot,psi,_problem_record(replace(prob,gamma=0.0)))
        res = shrink_lab.gamma_star(prob.omega,prob.L,psi.grid,prob.p,psi=psi)
        summary = {'gamma_star':to_dict(res),'s0':s0}
        code = EXIT_OK
        if cfg.shrink.existence_check:
            chk = shrink_lab.symmetric_existence_check(0.5*res.gamma_star,prob.omega,prob.p,prob.L,s0,psi.grid,cfg.minimize)
            summary['existence_check'] = chk
            if not chk['converged']:
                code = EXIT_NOT_CONVERGED
        logger.write_summary(cfg.outputs.summary,summary)
        return code

    params,mcfg,grid = _sweep_setup(cfg)
    fields = {}
    records = shrink_lab.sweep_L(params,cfg.shrink.lengths,mcfg,grid,log=logger.path(cfg.outputs.sweep),fields=fields)
    summary = {'problem':_problem_record(params),'grid':to_dict(grid),'records':[to_dict(r) for r in records]}
    if cfg.shrink.verify_cold:
        summary['cold_start'] = shrink_lab.cold_start_verify(records,params,mcfg,grid,jobs=cfg.jobs,seed=mcfg.seed)
    if sub == 'lstar':
        classify = shrink_lab.make_classifier(params,mcfg,grid,fields) if cfg.shrink.refine else None
        est = shrink_lab.estimate_L_star(records,classify)
        summary['l_star'] = to_dict(est)
        om = soliton.omega_of_mass(params.m,params.gamma,params.p)
        summary['transverse_instability_width'] = shrink_lab.transverse_instability_width(om,params.gamma,params.p)
    logger.write_summary(cfg.outputs.summary,summary)
    return EXIT_OK if all(r.converged for r in records) else EXIT_NOT_CONVERGED


def run_verify(cfg : RunConfig, logger : LoggingManager) -> int:
    if cfg.verify.snapshot is None:
        raise ConfigValidationError('verify.snapshot','verify needs a snapshot')
    u,stored = snapshot.load_field(cfg.verify.snapshot)
    prob = cfg.problem
    summary = {'report':to_dict(functionals.eval_all(u,prob)),
               'residuals':to_dict(functionals.pohozaev_residuals(u,prob)),
               'rearrangement':to_dict(minimize.positivity_and_rearrangement_check(u)),
               'snapshot_params':stored,
               'grid':to_dict(u.grid)}
    try:
        summary['recovered_omega'] = functionals.recover_omega(u,prob)
    except (ValueError,InadmissibleParamsError):
        summary['recovered_omega'] = None
    if prob.omega is not None:
        try:
            summary['green_discrepancy'] = greens.verify_solution_via_green(u,prob)
            summary['stationary_residual'] = functionals.residual_norm(u,prob)
        except InadmissibleParamsError as e:
            summary['green_discrepancy'] = None
            logger.event('green check skipped: '+e.message)
    logger.write_summary(cfg.outputs.summary,summary)
    return EXIT_OK


DISPATCH = {
    'soliton1d' : run_soliton1d,
    'minimize' : run_minimize,
    'greens' : run_greens,
    'shrink' : run_shrink,
    'verify' : run_verify,
}


def run(cfg : RunConfig) -> dict:
    """Runs a validated configuration.  Returns the exit report
    {exit_code, status, out_dir, error}."""
    logger = LoggingManager()
    folder = output_folder(cfg)
    logger.set_log_folder(folder,serialization.to_dict(cfg))
    print(EXECUTION_PREFIX,"Logging to",folder)
    report = {'out_dir':folder,'error':None}
    try:
        code = DISPATCH[cfg.command](cfg,logger)
        report['status'] = 'ok' if code == EXIT_OK else 'not_converged'
    except StripError as e:
        print(EXECUTION_PREFIX,"Error:",e.message)
        report['error'] = logger.write_error(e)
        report['status'] = 'error'
        code = EXIT_ERROR
    except Exception as e:
        traceback.print_exc()
        report['error'] = logger.write_error(e)
        report['status'] = 'error'
        code = EXIT_ERROR
    report['exit_code'] = code
    logger.set_exit_reason(report['status'],code)
    logger.close()
    print(EXECUTION_PREFIX,"---------------- DONE ({}) ----------------".format(report['status']))
    return report
