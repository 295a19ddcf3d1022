from __future__ import annotations
from dataclasses import dataclass,field
from enum import Enum
from ..utils.serialization import register
from .grid import Field
from .reports import FunctionalReport
from typing import Optional,List


class MinimizeModeEnum(Enum):
    NEHARI_ACTION = 'nehari_action'
    MASS_ENERGY = 'mass_energy'


class StartEnum(Enum):
    SOLITON_EXTENSION = 'soliton_extension'
    GAUSSIAN_BUMP = 'gaussian_bump'
    RANDOM = 'random'
    FILE = 'file'


@dataclass
@register
class MinimizeConfig:
    """Settings of one minimization run.  Numeric fields left as None fall
    back to the `minimize` section of the settings."""
    mode : MinimizeModeEnum = MinimizeModeEnum.NEHARI_ACTION
    symmetric_x : bool = False
    step : Optional[float] = None
    max_iters : Optional[int] = None
    tol_grad : Optional[float] = None
    seed : int = 0
    start : StartEnum = StartEnum.SOLITON_EXTENSION
    start_file : Optional[str] = None
    positivity : bool = True
    bump_x : float = 0.0             #center of the gaussian bump in x
    bump_width : float = 1.0
    bump_corner : bool = False       #center the bump at the wall y=0
    transverse_modulation : float = 0.0

    def validate(self) -> None:
        from ..utils.errors import ConfigValidationError
        if self.step is not None and not self.step > 0:
            raise ConfigValidationError('minimize.step','step must be positive')
        if self.tol_grad is not None and not self.tol_grad > 0:
            raise ConfigValidationError('minimize.tol_grad','tol_grad must be positive')
        if self.max_iters is not None and self.max_iters < 0:
            raise ConfigValidationError('minimize.max_iters','max_iters must be nonnegative')
        if self.start == StartEnum.FILE and not self.start_file:
            raise ConfigValidationError('minimize.start_file','start=file needs start_file')


@dataclass
@register
class MinimizeDiagnostics:
    iterations : int = 0
    converged : bool = False
    exit_reason : str = 'unknown'
    grad_norm : float = float('nan')
    objective : float = float('nan')
    backtracks : int = 0
    runaway : bool = False
    runaway_score : float = 0.0        #|centroid| / (X/2)
    centroid : float = 0.0
    dy_norm : float = 0.0              #(1/L^2) ||d_y u||^2
    transverse_variation : float = 0.0 #||u - y-mean of u|| / ||u||
    sym_defect : float = 0.0
    lagrange_omega : Optional[float] = None


@dataclass
class MinimizeResult:
    field : Field
    report : FunctionalReport
    recovered_omega : Optional[float]
    diagnostics : MinimizeDiagnostics
    history : List[dict] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return self.diagnostics.iterations

    @property
    def converged(self) -> bool:
        return self.diagnostics.converged
