from __future__ import annotations
from dataclasses import dataclass,field
from ..utils.serialization import register
import math
import numpy as np
from typing import Optional,Tuple

@dataclass(frozen=True)
@register
class StripGrid:
    """Tensor grid on the truncated, rescaled strip [-X,X] x [0,1].

    x nodes are ``linspace(-X,X,nx)`` with nx odd so that x=0 is the node
    ``center``; y nodes are ``linspace(0,1,ny)``.  The boundary columns
    x=+-X carry homogeneous Dirichlet values.
    """
    x_extent : float
    nx : int
    ny : int

    def __post_init__(self):
        if not self.x_extent > 0:
            raise ValueError("StripGrid: x_extent must be positive, got {}".format(self.x_extent))
        if self.nx < 3 or self.nx % 2 == 0:
            raise ValueError("StripGrid: nx must be odd and >= 3, got {}".format(self.nx))
        if self.ny < 2:
            raise ValueError("StripGrid: ny must be >= 2, got {}".format(self.ny))

    @property
    def hx(self) -> float:
        return 2.0*self.x_extent/(self.nx-1)

    @property
    def hy(self) -> float:
        return 1.0/(self.ny-1)

    @property
    def center(self) -> int:
        """Index of the x=0 column."""
        return (self.nx-1)//2

    @property
    def shape(self) -> Tuple[int,int]:
        return (self.nx,self.ny)

    def x(self) -> np.ndarray:
        return np.linspace(-self.x_extent,self.x_extent,self.nx)

    def y(self) -> np.ndarray:
        return np.linspace(0.0,1.0,self.ny)

    def mesh(self) -> Tuple[np.ndarray,np.ndarray]:
        return np.meshgrid(self.x(),self.y(),indexing='ij')

    def refine(self) -> StripGrid:
        """Halves both spacings; old nodes stay nodes."""
        return StripGrid(self.x_extent,2*self.nx-1,2*self.ny-1)

    def pad(self, cells : int) -> StripGrid:
        """Extends the grid by `cells` x-cells on each side at the same spacing."""
        return StripGrid(self.x_extent + cells*self.hx, self.nx + 2*cells, self.ny)

    @staticmethod
    def default_extent(omega : Optional[float], gamma : float, min_extent : float = 16.0, decay_lengths : float = 10.0) -> float:
        """X = max(min_extent, decay_lengths/sqrt(omega-gamma^2/4)) for gamma<0,
        decay_lengths/sqrt(omega) otherwise."""
        if omega is None:
            return min_extent
        gap = omega - (gamma**2/4.0 if gamma < 0 else 0.0)
        if gap <= 0:
            return min_extent
        return max(min_extent, decay_lengths/math.sqrt(gap))

    @staticmethod
    def for_params(params, nx : Optional[int] = None, ny : Optional[int] = None, x_extent : Optional[float] = None) -> StripGrid:
        from ..utils import settings
        nx = nx if nx is not None else settings.get('grid.nx')
        ny = ny if ny is not None else settings.get('grid.ny')
        if x_extent is None:
            x_extent = StripGrid.default_extent(params.omega, params.gamma,
                                                settings.get('grid.min_extent'),
                                                settings.get('grid.decay_lengths'))
        return StripGrid(float(x_extent),int(nx),int(ny))


@dataclass
class Field:
    """Real samples of a function on a StripGrid, shape (nx, ny)."""
    grid : StripGrid
    values : np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values,dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("Field: values have shape {}, grid needs {}".format(self.values.shape,self.grid.shape))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Field: values must be finite")

    def copy(self) -> Field:
        return Field(self.grid,self.values.copy())

    def with_values(self, values : np.ndarray) -> Field:
        return Field(self.grid,values)

    def scaled(self, c : float) -> Field:
        return Field(self.grid,c*self.values)

    @staticmethod
    def zeros(grid : StripGrid) -> Field:
        return Field(grid,np.zeros(grid.shape))

    @staticmethod
    def from_function(grid : StripGrid, f) -> Field:
        """Samples f(X,Y) on the grid mesh."""
        X,Y = grid.mesh()
        return Field(grid,np.broadcast_to(f(X,Y),grid.shape).astype(float))


@dataclass
@register
class FieldSnapshotHeader:
    """Header of a field snapshot; the payload is a row-major float64 sidecar."""
    grid : StripGrid
    dtype : str = '<f8'
    order : str = 'C'
    payload : str = ''
    params : dict = field(default_factory=dict)
