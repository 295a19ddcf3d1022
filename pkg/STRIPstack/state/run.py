from __future__ import annotations
from dataclasses import dataclass,field
from ..utils.serialization import register
from ..utils.errors import ConfigValidationError
from .grid import StripGrid
from .params import ProblemParams
from .minimize import MinimizeConfig,MinimizeModeEnum
from typing import Optional,List
import os

COMMANDS = {
    'soliton1d' : [None],
    'minimize' : ['action','energy'],
    'greens' : ['slice'],
    'shrink' : ['sweep','lstar','lstarstar','gammastar'],
    'verify' : [None],
}


@dataclass
@register
class GridSpec:
    """Grid request; missing values are taken from the grid settings and the
    decay rule for X."""
    nx : Optional[int] = None
    ny : Optional[int] = None
    x_extent : Optional[float] = None

    def build(self, params : ProblemParams) -> StripGrid:
        return StripGrid.for_params(params, self.nx, self.ny, self.x_extent)


@dataclass
@register
class OutputSpec:
    out_dir : Optional[str] = None
    snapshot : str = 'field'
    log : str = 'iterations.csv'
    summary : str = 'summary.json'
    sweep : str = 'sweep.csv'
    greens : str = 'greens.csv'
    table : str = 'soliton1d.csv'


@dataclass
@register
class Soliton1DSpec:
    omegas : List[float] = field(default_factory=lambda : [1.0])


@dataclass
@register
class GreensSliceSpec:
    """A slice of g(., y, xi, eta) at fixed y, in physical coordinates."""
    xi : float = 0.5
    eta : float = 0.25
    y : Optional[float] = None
    x_min : float = -5.0
    x_max : float = 5.0
    n : int = 201
    k_max : Optional[int] = None
    even_modes_only : bool = False


@dataclass
@register
class ShrinkSpec:
    lengths : List[float] = field(default_factory=lambda : [2.0,1.0,0.5,0.25,0.125,0.0625])
    verify_cold : bool = False
    refine : bool = True
    optimize_f : bool = False
    snapshot : Optional[str] = None     #converged gamma=0 action minimizer for gammastar
    existence_check : bool = False      #gammastar: symmetric minimization at gamma*/2


@dataclass
@register
class VerifySpec:
    snapshot : Optional[str] = None


@dataclass
@register
class RunConfig:
    """A complete run request, as read from a JSON/YAML document or built
    from command-line flags."""
    command : str
    problem : ProblemParams
    subcommand : Optional[str] = None
    grid : GridSpec = field(default_factory=GridSpec)
    minimize : MinimizeConfig = field(default_factory=MinimizeConfig)
    outputs : OutputSpec = field(default_factory=OutputSpec)
    soliton1d : Soliton1DSpec = field(default_factory=Soliton1DSpec)
    greens : GreensSliceSpec = field(default_factory=GreensSliceSpec)
    shrink : ShrinkSpec = field(default_factory=ShrinkSpec)
    verify : VerifySpec = field(default_factory=VerifySpec)
    seed : Optional[int] = None
    jobs : int = 1

    def needs_energy(self) -> bool:
        if self.command == 'minimize':
            return self.subcommand == 'energy'
        return self.command == 'shrink' and self.subcommand in ('sweep','lstar')

    def needs_action(self) -> bool:
        if self.command == 'minimize':
            return self.subcommand == 'action'
        if self.command == 'shrink':
            return self.subcommand == 'gammastar'
        return self.command in ('greens','soliton1d')

    def validate(self) -> None:
        """Checks the command and every admissibility rule.  Raises
        ConfigValidationError naming the offending field."""
        if self.command not in COMMANDS:
            raise ConfigValidationError('command','unknown command {}, expected one of {}'.format(self.command,sorted(COMMANDS)))
        if self.command == 'minimize' and self.subcommand is None:
            self.subcommand = 'energy' if self.minimize.mode == MinimizeModeEnum.MASS_ENERGY else 'action'
        if self.subcommand not in COMMANDS[self.command]:
            raise ConfigValidationError('subcommand','{} expects one of {}'.format(self.command,COMMANDS[self.command]))
        if self.command == 'minimize':
            self.minimize.mode = MinimizeModeEnum.MASS_ENERGY if self.subcommand == 'energy' else MinimizeModeEnum.NEHARI_ACTION

        prob = self.problem
        if not prob.p > 1:
            raise ConfigValidationError('problem.p','p must exceed 1')
        if not prob.L > 0:
            raise ConfigValidationError('problem.L','L must be positive')
        if self.needs_action() and self.command != 'soliton1d':
            if prob.omega is None:
                raise ConfigValidationError('problem.omega','omega is required')
            if prob.gamma < 0 and not prob.omega > prob.gamma**2/4.0:
                raise ConfigValidationError('problem.omega','omega <= gamma^2/4 with gamma<0')
            if not prob.omega > 0:
                raise ConfigValidationError('problem.omega','omega must be positive')
        if self.needs_energy() or self.minimize.mode == MinimizeModeEnum.MASS_ENERGY and self.command == 'minimize':
            if not prob.p < 3:
                raise ConfigValidationError('problem.p','mass_energy requires 1<p<3')
            if prob.m is None or not prob.m > 0:
                raise ConfigValidationError('problem.m','mass must be positive')
        if self.command == 'shrink' and self.subcommand == 'lstarstar':
            if prob.m is None or not prob.m > 0:
                raise ConfigValidationError('problem.m','mass must be positive')
        if self.command == 'shrink' and self.subcommand in ('sweep','lstar') and not prob.gamma < 0:
            raise ConfigValidationError('problem.gamma','width sweeps need gamma<0')
        if (self.command == 'minimize' and self.subcommand == 'action' and prob.gamma > 0
                and not self.minimize.symmetric_x):
            raise ConfigValidationError('minimize.symmetric_x','gamma>0 action minimization needs the symmetric subspace')
        if self.command == 'shrink' and sorted(self.shrink.lengths) != sorted(set(self.shrink.lengths)):
            raise ConfigValidationError('shrink.lengths','widths must be distinct')
        if any(not l > 0 for l in self.shrink.lengths):
            raise ConfigValidationError('shrink.lengths','widths must be positive')
        if self.jobs < 1:
            raise ConfigValidationError('jobs','jobs must be >= 1')
        try:
            if self.grid.nx is not None or self.grid.ny is not None or self.grid.x_extent is not None:
                self.grid.build(prob)
        except ValueError as e:
            raise ConfigValidationError('grid',str(e))
        self.minimize.validate()
        if self.outputs.out_dir is not None:
            target = os.path.abspath(self.outputs.out_dir)
            while not os.path.exists(target):
                target = os.path.dirname(target)
            if not os.access(target,os.W_OK):
                raise ConfigValidationError('outputs.out_dir','{} is not writable'.format(self.outputs.out_dir))
