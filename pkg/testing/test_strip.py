#needed to import STRIPstack from top level directory
import sys
import os
sys.path.append(os.getcwd())

from STRIPstack.state import StripGrid, Field
from STRIPstack.mathutils import strip, functionals, differences
import numpy as np

GRID = StripGrid(8.0,65,9)

def random_field(grid, seed=0, dirichlet=True):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=grid.shape)
    if dirichlet:
        v = strip.apply_dirichlet(v)
    return Field(grid,v)

def bilinear(f, u, v):
    """Polarization of a quadratic form."""
    return 0.5*(f(Field(u.grid,u.values+v.values)) - f(u) - f(v))

def test_grid():
    g = GRID
    assert g.center == 32
    assert abs(g.x()[g.center]) < 1e-14
    assert abs(g.hx - 0.25) < 1e-15 and abs(g.hy - 0.125) < 1e-15
    r = g.refine()
    assert r.nx == 129 and r.ny == 17
    assert np.allclose(r.x()[::2],g.x(),atol=1e-14)
    p = g.pad(4)
    assert p.nx == 73 and abs(p.hx - g.hx) < 1e-14
    for bad in [(8.0,64,9),(8.0,1,9),(8.0,65,1),(-1.0,65,9)]:
        try:
            StripGrid(*bad)
            assert False, "accepted {}".format(bad)
        except ValueError:
            pass

def test_field_validation():
    try:
        Field(GRID,np.zeros((3,3)))
        assert False
    except ValueError:
        pass
    v = np.zeros(GRID.shape)
    v[3,3] = np.nan
    try:
        Field(GRID,v)
        assert False
    except ValueError:
        pass

def test_quadrature():
    one = Field(GRID,np.ones(GRID.shape))
    assert abs(strip.quadrature(one) - 16.0) < 1e-12
    assert abs(float(np.sum(strip.y_weights(GRID))) - 1.0) < 1e-15
    u = random_field(GRID,1)
    assert abs(strip.mass(u) - strip.inner(u,u)) < 1e-12*strip.mass(u)
    assert abs(strip.potential(u,1.0) - strip.mass(u)) < 1e-12*strip.mass(u)

def test_sparse_forms_match():
    K = strip.stiffness_matrices(GRID)
    u = random_field(GRID,2,dirichlet=False)
    flat = u.values.ravel()
    for key,f in [('x',strip.kinetic_x),('y',strip.kinetic_y),('mass',strip.mass),('trace',strip.trace_sq)]:
        a = float(flat @ (K[key] @ flat))
        b = f(u)
        assert abs(a-b) <= 1e-12*abs(b), (key,a,b)

def test_summation_by_parts():
    u = random_field(GRID,3)
    v = random_field(GRID,4)
    lx = -strip.inner(strip.laplacian_x(u),v)
    assert abs(lx - bilinear(strip.kinetic_x,u,v)) < 1e-10*strip.kinetic_x(u)
    ly = -strip.inner(strip.laplacian_y_neumann(u),v)
    assert abs(ly - bilinear(strip.kinetic_y,u,v)) < 1e-10*strip.kinetic_y(u)
    t = strip.inner(strip.trace_adjoint(u),v)
    assert abs(t - bilinear(strip.trace_sq,u,v)) < 1e-12*max(strip.trace_sq(u),1.0)

def test_laplacian_x_exact_on_quadratics():
    u = Field.from_function(GRID,lambda X,Y: X**2)
    l = strip.laplacian_x(u).values
    assert np.max(np.abs(l[1:-1] - 2.0)) < 1e-9
    assert np.all(l[0] == 0) and np.all(l[-1] == 0)

def test_laplacian_x_refinement_order():
    X = GRID.x_extent
    errors = []
    grid = GRID
    for _ in range(3):
        u = Field.from_function(grid,lambda X_,Y: np.cos(np.pi*X_/X))
        l = strip.laplacian_x(u).values
        exact = -(np.pi/X)**2*np.cos(np.pi*grid.x()/X)
        errors.append(np.max(np.abs(l[1:-1] - exact[1:-1,None])))
        grid = grid.refine()
    order = differences.observed_order(errors)
    assert np.all(order >= 1.9), order

def test_trace_examples():
    one = Field(GRID,np.ones(GRID.shape))
    assert abs(strip.trace_sq(one) - 1.0) < 1e-14
    f = functionals.defect_eigenfunction(GRID,-1.0)
    assert abs(strip.trace_sq(f) - 0.5) < 1e-14
    c = Field.from_function(GRID,lambda X,Y: np.cos(2*np.pi*Y))
    assert abs(strip.trace_sq(c) - 0.5) < 1e-12

def test_quadrature_examples():
    u = Field.from_function(GRID,lambda X,Y: np.sqrt(2.0)/np.cosh(X))
    assert abs(strip.quadrature(u,lambda v: np.abs(v)**4) - 16.0/3.0) < 1e-8
    f = functionals.defect_eigenfunction(StripGrid(16.0,4801,3),-1.0)
    assert abs(strip.mass(f) - 1.0) < 1e-5

def test_neumann_laplacian_exact_on_quadratics():
    # cos(pi y) is in the Neumann class; the stencil factor is off by (pi hy)^2/12
    u = Field.from_function(GRID,lambda X,Y: np.cos(np.pi*Y))
    l = strip.laplacian_y_neumann(u).values
    exact = -np.pi**2*np.cos(np.pi*GRID.y())
    assert np.max(np.abs(l[10] - exact)) < 0.02*np.pi**2

def test_sobolev_solver():
    h,shift = 4.0,0.7
    solve = strip.sobolev_solver(GRID,h,shift)
    g = random_field(GRID,5,dirichlet=False)
    d = solve(g.values)
    assert np.all(d[0] == 0) and np.all(d[-1] == 0)
    K = strip.stiffness_matrices(GRID)
    A = K['x'] + h*K['y'] + shift*K['mass']
    r = (A @ d.ravel() - K['mass'] @ g.values.ravel()).reshape(GRID.shape)
    assert np.max(np.abs(r[1:-1])) < 1e-10
    try:
        strip.sobolev_solver(GRID,1.0,0.0)
        assert False
    except ValueError:
        pass

def test_centroid_and_mean():
    u = Field.from_function(GRID,lambda X,Y: np.exp(-(X-1.0)**2))
    assert abs(strip.centroid_x(u) - 1.0) < 1e-6
    assert np.allclose(strip.mean_y(u),np.exp(-(GRID.x()-1.0)**2))
    assert strip.centroid_x(Field.zeros(GRID)) == 0.0

def test_trace_inequality_constant():
    c = strip.trace_inequality_constant(GRID,n_samples=20,seed=0)
    assert 0 < c <= 1.0 + 1e-12

if __name__=='__main__':
    test_grid()
    test_field_validation()
    test_quadrature()
    test_sparse_forms_match()
    test_summation_by_parts()
    test_laplacian_x_exact_on_quadratics()
    test_laplacian_x_refinement_order()
    test_trace_examples()
    test_quadrature_examples()
    test_neumann_laplacian_exact_on_quadratics()
    test_sobolev_solver()
    test_centroid_and_mean()
    test_trace_inequality_constant()
