#needed to import STRIPstack from top level directory
import sys
import os
sys.path.append(os.getcwd())

from STRIPstack.state import StripGrid, Field, ProblemParams, Soliton1D, MinimizeConfig, StartEnum
from STRIPstack.mathutils import strip, functionals, soliton
from STRIPstack.solvers import minimize
from STRIPstack.utils.errors import ProjectionUndefinedError, InadmissibleParamsError
from STRIPstack.utils.logging import Logfile
from STRIPstack.utils import settings
import tempfile
import numpy as np

GRID = StripGrid(8.0,65,9)

def bump(grid, cx=0.0, w=1.5):
    return Field(grid,strip.apply_dirichlet(np.exp(-((grid.x()[:,None]-cx)/w)**2)*(1.0+0.2*np.cos(np.pi*grid.y()[None,:]))))

def non_increasing(values, rtol=1e-12):
    return all(b <= a + rtol*abs(a) for a,b in zip(values[:-1],values[1:]))

def test_projections():
    params = ProblemParams(p=3.0,gamma=-1.0,L=0.5,omega=1.0)
    u = bump(GRID)
    v = minimize.nehari_project(u,params)
    rep = functionals.eval_all(v,params)
    assert abs(rep.nehari) < 1e-12*rep.potential
    w = minimize.nehari_project(u.scaled(3.0),params)
    assert np.allclose(w.values,v.values,rtol=1e-12,atol=1e-15)
    assert abs(strip.mass(minimize.mass_project(u,2.5)) - 2.5) < 1e-12
    for f in [lambda z: minimize.nehari_project(z,params), lambda z: minimize.mass_project(z,1.0)]:
        try:
            f(Field.zeros(GRID))
            assert False
        except ProjectionUndefinedError:
            pass

def test_symmetry():
    even = bump(GRID)
    assert np.allclose(minimize.enforce_symmetry(even).values,even.values,atol=1e-14)
    odd = Field(GRID,strip.apply_dirichlet(np.sin(GRID.x())[:,None]*np.ones(GRID.ny)))
    assert np.max(np.abs(minimize.enforce_symmetry(odd).values)) < 1e-14
    shifted = bump(GRID,cx=1.0)
    s = minimize.enforce_symmetry(shifted)
    assert minimize.symmetry_defect(s) < 1e-15
    assert minimize.symmetry_defect(shifted) > 0.1

def test_rearrangement_check():
    u = soliton.extend_to_strip(Soliton1D(1.0,-1.0,3.0),StripGrid(12.0,97,5))
    d = minimize.positivity_and_rearrangement_check(u)
    assert d.worst() < 1e-13
    assert abs(d.sup_norm - soliton.value_at_zero(Soliton1D(1.0,-1.0,3.0))) < 1e-12
    d = minimize.positivity_and_rearrangement_check(u.scaled(-1.0))
    assert d.positivity > 1.0
    d = minimize.positivity_and_rearrangement_check(bump(GRID,cx=2.0))
    assert d.monotone_x > 0 and d.even_symmetry > 0
    assert d.monotone_y == 0.0

def test_decay_rate():
    u = soliton.extend_to_strip(Soliton1D(1.0,0.0,3.0),StripGrid(16.0,257,5))
    assert abs(minimize.decay_rate(u) + 1.0) < 1e-3

def test_recenter():
    u = bump(GRID,cx=0.5)
    v = Field(GRID,minimize._recenter(u.values,GRID))
    assert abs(strip.centroid_x(v)) < 0.5*GRID.hx

def test_recentered_run_stays_on_nehari():
    grid = StripGrid(16.0,257,5)
    params = ProblemParams(p=3.0,gamma=0.0,L=0.5,omega=1.0)
    cfg = MinimizeConfig(tol_grad=1e-9,max_iters=60)
    settings.set('minimize.recenter_every',5)
    try:
        res = minimize.minimize_action(cfg,params,grid,start=bump(grid,cx=1.0))
    finally:
        settings.reset()
    assert res.iterations >= 5
    assert abs(strip.centroid_x(res.field)) < grid.hx
    assert np.all(res.field.values[0] == 0) and np.all(res.field.values[-1] == 0)
    assert non_increasing([r['objective'] for r in res.history])
    assert all(abs(r['I']) < 1e-10 for r in res.history)

def test_nehari_project_of_doubled_soliton():
    grid = StripGrid(16.0,513,5)
    params = ProblemParams(p=3.0,gamma=-1.0,L=1.0,omega=1.0)
    phi = soliton.extend_to_strip(Soliton1D(1.0,-1.0,3.0),grid)
    v = minimize.nehari_project(phi.scaled(2.0),params)
    assert np.allclose(v.values,minimize.nehari_project(phi,params).values,rtol=1e-12,atol=1e-15)
    assert strip.norm(v.values - phi.values,grid) < 2e-2*strip.norm(phi)

def test_starts():
    a = minimize.random_start(GRID,5)
    b = minimize.random_start(GRID,5)
    c = minimize.random_start(GRID,6)
    assert np.array_equal(a.values,b.values)
    assert not np.array_equal(a.values,c.values)
    assert np.all(a.values > 0)
    params = ProblemParams(p=3.0,gamma=-1.0,L=0.5,omega=1.0)
    u = minimize.initial_field(MinimizeConfig(),params,GRID)
    assert np.all(u.values == u.values[:,:1])
    # no soliton below gamma^2/4: falls back to the bump
    u = minimize.initial_field(MinimizeConfig(bump_x=1.0),ProblemParams(p=3.0,gamma=-2.0,omega=0.5),GRID)
    assert abs(strip.centroid_x(u) - 1.0) < 1e-6

def test_minimize_action():
    grid = StripGrid(12.0,257,5)
    params = ProblemParams(p=3.0,gamma=-1.0,L=0.5,omega=1.0)
    cfg = MinimizeConfig(tol_grad=1e-7,max_iters=3000)
    res = minimize.minimize_action(cfg,params,grid)
    assert res.converged and res.diagnostics.exit_reason == 'converged'
    assert not res.diagnostics.runaway
    assert non_increasing([r['objective'] for r in res.history])
    assert abs(res.report.nehari) < 1e-9*res.report.potential
    assert res.diagnostics.transverse_variation < 1e-10
    ref = soliton.extend_to_strip(Soliton1D(1.0,-1.0,3.0),grid)
    assert strip.norm(res.field.values - ref.values,grid) < 2e-2*strip.norm(ref)
    assert minimize.positivity_and_rearrangement_check(res.field).worst() < 1e-10
    # the attractive defect lowers the ground state action
    res0 = minimize.minimize_action(MinimizeConfig(tol_grad=1e-7,max_iters=3000,symmetric_x=True),ProblemParams(p=3.0,gamma=0.0,L=0.5,omega=1.0),grid)
    assert res0.converged
    assert res.report.action < res0.report.action

def test_action_log_is_reproducible():
    grid = StripGrid(10.0,129,5)
    params = ProblemParams(p=3.0,gamma=-1.0,L=0.5,omega=1.0)
    cfg = MinimizeConfig(tol_grad=1e-6,max_iters=500)
    folder = tempfile.mkdtemp()
    texts = []
    for name in ['a.csv','b.csv']:
        fn = os.path.join(folder,name)
        res = minimize.minimize_action(cfg,params,grid,log=fn)
        with open(fn) as f:
            texts.append(f.read())
        with Logfile(fn,mode='r') as log:
            rows = log.read()
        assert len(rows) == res.iterations + 1
        assert list(rows[0].keys()) == minimize.LOG_COLUMNS
    assert texts[0] == texts[1]

def test_runaway():
    grid = StripGrid(12.0,193,5)
    params = ProblemParams(p=3.0,gamma=1.0,L=0.5,omega=1.0)
    cfg = MinimizeConfig(start=StartEnum.GAUSSIAN_BUMP,bump_x=7.2,max_iters=200)
    res = minimize.minimize_action(cfg,params,grid)
    assert res.diagnostics.runaway
    assert res.diagnostics.exit_reason == 'runaway'
    assert not res.converged

def test_minimize_energy():
    grid = StripGrid(20.0,321,5)
    params = ProblemParams(p=2.5,gamma=-1.0,L=0.25,m=1.0)
    cfg = MinimizeConfig(tol_grad=1e-6,max_iters=5000)
    res = minimize.minimize_energy(cfg,params,grid)
    assert res.converged
    assert abs(res.report.mass - 1.0) < 1e-12
    assert res.report.energy < 0
    assert non_increasing([r['objective'] for r in res.history])
    om = res.diagnostics.lagrange_omega
    assert om > 0.25
    assert abs(om - soliton.omega_of_mass(1.0,-1.0,2.5)) < 2e-2*om
    assert abs(res.recovered_omega - om) < 2e-2*om
    # the field solves the stationary equation at the multiplier
    assert functionals.residual_norm(res.field,params,om) < 1e-5

def test_energy_flow_from_soliton_is_stationary():
    grid = StripGrid(20.0,1281,3)
    params = ProblemParams(p=2.5,gamma=-1.0,L=0.25,m=1.0)
    om = soliton.omega_of_mass(1.0,-1.0,2.5)
    start = soliton.extend_to_strip(Soliton1D(om,-1.0,2.5),grid)
    res = minimize.minimize_energy(MinimizeConfig(tol_grad=1e-6,max_iters=5000),params,grid,start=start)
    assert res.converged
    assert strip.norm(res.field.values - start.values,grid) < 1e-3*strip.norm(start)
    assert abs(res.diagnostics.lagrange_omega - om) < 5e-3*om

def test_strict_subadditivity():
    grid = StripGrid(20.0,321,5)
    cfg = MinimizeConfig(tol_grad=1e-5,max_iters=5000)
    e = {}
    for m in [0.5,1.0]:
        res = minimize.minimize_energy(cfg,ProblemParams(p=2.5,gamma=-1.0,L=0.25,m=m),grid)
        assert res.converged, m
        e[m] = res.report.energy
    assert e[0.5]/0.5 > e[1.0]/1.0

def test_decay_rate_of_minimizer():
    grid = StripGrid(16.0,257,5)
    params = ProblemParams(p=3.0,gamma=-1.0,L=0.5,omega=1.0)
    res = minimize.minimize_action(MinimizeConfig(tol_grad=1e-7,max_iters=3000),params,grid)
    assert res.converged
    rate = minimize.decay_rate(res.field)
    assert abs(rate + np.sqrt(params.omega)) < 5e-2*np.sqrt(params.omega), rate

def test_minimize_energy_inadmissible():
    cfg = MinimizeConfig()
    for params in [ProblemParams(p=3.0,gamma=-1.0,m=1.0),
                   ProblemParams(p=2.5,gamma=0.5,m=1.0),
                   ProblemParams(p=2.5,gamma=-1.0,m=-1.0)]:
        try:
            minimize.minimize_energy(cfg,params,GRID)
            assert False
        except InadmissibleParamsError:
            pass

def test_compare_action_energy():
    grid = StripGrid(16.0,257,5)
    params = ProblemParams(p=2.5,gamma=-1.0,L=0.25,m=1.0)
    out = minimize.compare_action_energy(MinimizeConfig(tol_grad=1e-6,max_iters=5000),params,grid)
    assert out['energy_run']['converged'] and out['action_run']['converged']
    assert abs(out['mass_gap']) < 1e-3
    assert out['field_gap'] < 1e-3

if __name__=='__main__':
    test_projections()
    test_symmetry()
    test_rearrangement_check()
    test_decay_rate()
    test_recenter()
    test_recentered_run_stays_on_nehari()
    test_nehari_project_of_doubled_soliton()
    test_starts()
    test_minimize_action()
    test_action_log_is_reproducible()
    test_runaway()
    test_minimize_energy()
    test_energy_flow_from_soliton_is_stationary()
    test_strict_subadditivity()
    test_decay_rate_of_minimizer()
    test_minimize_energy_inadmissible()
    test_compare_action_energy()
