#needed to import STRIPstack from top level directory
import sys
import os
sys.path.append(os.getcwd())

from STRIPstack.state import StripGrid, ProblemParams, Soliton1D, MinimizeConfig, MinimizeModeEnum, SweepRecord
from STRIPstack.mathutils import soliton
from STRIPstack.experiments import shrink_lab
from STRIPstack.utils.errors import BracketNotFoundError, InadmissibleParamsError
import math
import numpy as np

def record(L, flag):
    return SweepRecord(L=L,energy=-1.0,dy_norm_scaled=0.0 if flag else 1.0,recovered_omega=1.0,lagrange_omega=1.0,
                       e1d=-1.0,e1d_gap=0.0,e1d_gap_continuum=0.0,h1_gap=0.0,transverse_variation=0.0,
                       y_independent=flag,converged=True,iterations=1)

def test_cosine_moment():
    assert abs(shrink_lab.cosine_moment(0) - 1.0) < 1e-14
    assert abs(shrink_lab.cosine_moment(2) - 0.5) < 1e-14
    assert abs(shrink_lab.cosine_moment(4) - 0.375) < 1e-14

def test_profile_quotients():
    assert abs(shrink_lab.fixed_profile_quotient(3.0) - 8*math.pi**2) < 1e-10
    g,w = np.polynomial.legendre.leggauss(400)
    nodes = (0.5*(g+1.0),0.5*w)
    for p in [2.0,3.0]:
        q = shrink_lab.profile_quotient(np.array([1e-3]),p,nodes)
        assert abs(q - shrink_lab.perturbative_quotient(p)) < 1e-4*q
    assert shrink_lab.profile_quotient(np.zeros(3),3.0,nodes) == float('inf')

def test_l_star_star():
    for m in [1.0,2.0]:
        b = shrink_lab.l_star_star_bound(m,0.0,3.0)
        assert abs(b.squared_bound - 192*math.pi**2/m**2) < 1e-8*b.squared_bound
        assert abs(b.bound**2 - b.squared_bound) < 1e-10*b.squared_bound
    b = shrink_lab.l_star_star_bound(1.0,-1.0,3.0)
    assert abs(b.squared_bound - 16*math.pi**2/b.potential_1d) < 1e-10*b.squared_bound
    # the attractive defect concentrates the profile and lowers the bound
    assert b.squared_bound < shrink_lab.l_star_star_bound(1.0,0.0,3.0).squared_bound
    b = shrink_lab.l_star_star_bound(1.0,-1.0,3.0,optimize_f=True)
    assert b.optimized_quotient <= min(b.quotient,shrink_lab.perturbative_quotient(3.0))
    assert b.optimized_squared_bound <= b.squared_bound

def test_estimate_L_star():
    sweep = [record(1.0,True),record(2.0,True),record(3.0,False),record(4.0,False)]
    est = shrink_lab.estimate_L_star(sweep)
    assert (est.lower,est.upper,est.estimate,est.refinements) == (2.0,3.0,2.5,0)
    est = shrink_lab.estimate_L_star(list(reversed(sweep)),classify=lambda L: L < 2.37,tol=1e-3)
    assert est.upper - est.lower <= 1e-3
    assert est.lower < 2.37 <= est.upper
    assert abs(est.estimate - 2.37) < 1e-3
    for flags in [[True,True],[False,False],[False,True]]:
        try:
            shrink_lab.estimate_L_star([record(1.0,flags[0]),record(2.0,flags[1])])
            assert False
        except BracketNotFoundError as e:
            assert e.to_record()['error'] == 'bracket_not_found'

def test_transverse_width():
    w = shrink_lab.transverse_instability_width(1.0,0.0,3.0)
    assert abs(w - math.pi/math.sqrt(3.0)) < 1e-3*w
    w = shrink_lab.transverse_instability_width(0.5,-1.0,3.0)
    assert 2.5 < w < 6.0

def test_shifted_profile():
    grid = StripGrid(4.0,33,3)
    v = soliton.extend_to_strip(Soliton1D(1.0,0.0,3.0),grid).values
    assert np.array_equal(shrink_lab.shifted_profile(v,0),v)
    out = shrink_lab.shifted_profile(v,2)
    assert np.array_equal(out[grid.center],v[grid.center+2])
    assert np.all(out[:2] == 0) and np.all(out[-2:] == 0)
    inward = shrink_lab.shifted_profile(v,-2)
    assert np.allclose(inward[grid.center],v[grid.center+2],rtol=1e-14,atol=0)
    assert np.array_equal(inward[grid.center+2],v[grid.center])
    cont = shrink_lab.shifted_profile_continuous(v,grid,2*grid.hx)
    assert np.allclose(cont,out,atol=1e-14)

def test_gamma_star():
    grid = StripGrid(12.0,385,5)
    psi = soliton.extend_to_strip(Soliton1D(1.0,0.0,3.0),grid)
    res = shrink_lab.gamma_star(1.0,1.0,grid,p=3.0,psi=psi)
    assert res.identity_residual < 1e-10
    assert res.nehari_shifted < 0
    assert 0 < res.gamma_star < 2.0
    assert abs(res.gamma_star - 2.0/math.sqrt(3.0)) < 2e-2
    assert abs(res.sigma_star - math.acosh(math.sqrt(1.5))) < 5e-2

def test_sweep():
    grid = StripGrid(16.0,129,5)
    params = ProblemParams(p=2.5,gamma=-1.0,m=1.0)
    cfg = MinimizeConfig(mode=MinimizeModeEnum.MASS_ENERGY,tol_grad=1e-7,max_iters=5000)
    fields = {}
    recs = shrink_lab.sweep_L(params,[0.25,0.5],cfg,grid,fields=fields)
    assert [r.L for r in recs] == [0.5,0.25]
    assert set(fields.keys()) == {0.25,0.5}
    for r in recs:
        assert r.converged and r.y_independent
        assert abs(r.e1d_gap) < 1e-8
        assert r.h1_gap < 1e-4
        assert abs(r.e1d_gap_continuum) < 2e-2
        assert abs(r.recovered_omega - r.lagrange_omega) < 5e-2*r.lagrange_omega
    try:
        shrink_lab.sweep_L(ProblemParams(p=2.5,gamma=0.5,m=1.0),[0.5],cfg,grid)
        assert False
    except InadmissibleParamsError:
        pass
    rows = shrink_lab.cold_start_verify(recs,params,MinimizeConfig(mode=MinimizeModeEnum.MASS_ENERGY,max_iters=300),grid,jobs=1,seed=4)
    assert len(rows) == 2
    for row in rows:
        assert set(['L','seed','energy','converged','warm_energy','agree','cold_lower']) <= set(row.keys())
        assert np.isfinite(row['energy'])

def test_symmetric_existence_check():
    grid = StripGrid(12.0,129,5)
    cfg = MinimizeConfig(tol_grad=1e-7,max_iters=3000)
    s0 = shrink_lab.gamma_zero_minimizer(1.0,3.0,0.5,grid,cfg).report.action
    out = shrink_lab.symmetric_existence_check(0.5,1.0,3.0,0.5,s0,grid,cfg)
    assert out['action'] > s0
    # a symmetric minimizer at small repulsive gamma sits below a run-away pair
    assert out['below_dichotomy']
    assert out['action'] < 2*s0
    assert out['two_s0'] == 2*s0
    assert out['sym_defect'] < 1e-12

if __name__=='__main__':
    test_cosine_moment()
    test_profile_quotients()
    test_l_star_star()
    test_estimate_L_star()
    test_transverse_width()
    test_shifted_profile()
    test_gamma_star()
    test_sweep()
    test_symmetric_existence_check()
