"""Data types of the strip solvers.  All registered types serialize through
:mod:`STRIPstack.utils.serialization`."""
__all__ = ['StripGrid','Field','FieldSnapshotHeader',
           'ProblemParams',
           'FunctionalReport','PohozaevResiduals','RearrangementDiagnostics',
           'Soliton1D',
           'GreensSpec',
           'MinimizeModeEnum','StartEnum','MinimizeConfig','MinimizeDiagnostics','MinimizeResult',
           'SweepRecord','LStarEstimate','LStarStarBound','GammaStarResult',
           'RunConfig','GridSpec','OutputSpec']
from .grid import StripGrid, Field, FieldSnapshotHeader
from .params import ProblemParams
from .reports import FunctionalReport, PohozaevResiduals, RearrangementDiagnostics
from .soliton import Soliton1D
from .greens import GreensSpec
from .minimize import MinimizeModeEnum, StartEnum, MinimizeConfig, MinimizeDiagnostics, MinimizeResult
from .shrink import SweepRecord, LStarEstimate, LStarStarBound, GammaStarResult
from .run import RunConfig, GridSpec, OutputSpec
