"""Error kinds raised by the strip solvers.

Every error carries a stable ``code`` so that the run entry point can turn it
into a machine-readable JSON record.
"""
from typing import Optional


class StripError(Exception):
    code = 'strip_error'

    def __init__(self, message : str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_record(self) -> dict:
        rec = {'error':self.code,'message':self.message}
        for k,v in self.details.items():
            rec[k] = v if isinstance(v,(int,float,str,bool,type(None),list,dict)) else str(v)
        return rec


class InadmissibleParamsError(StripError, ValueError):
    """Parameters outside the region where the requested object exists."""
    code = 'inadmissible_params'


class ProjectionUndefinedError(StripError, ValueError):
    """Nehari projection of a field whose quadratic part is not positive."""
    code = 'projection_undefined'


class BranchAmbiguityError(StripError, ValueError):
    """omega(m) requested where the mass is not monotone in omega."""
    code = 'branch_ambiguity'


class BracketNotFoundError(StripError, ValueError):
    code = 'bracket_not_found'


class GammaStarConsistencyError(StripError, RuntimeError):
    code = 'gamma_star_consistency'


class OnDiagonalError(StripError, ValueError):
    code = 'on_diagonal'


class StepFailureError(StripError, RuntimeError):
    """Backtracking exhausted without an acceptable step.  ``result`` holds the
    last accepted iterate as a MinimizeResult."""
    code = 'step_failure'

    def __init__(self, message : str, result=None, **details):
        super().__init__(message, **details)
        self.result = result


class ConfigParseError(StripError, ValueError):
    code = 'config_parse'

    def __init__(self, message : str, line : Optional[int] = None, column : Optional[int] = None):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class ConfigValidationError(StripError, ValueError):
    code = 'config_validation'

    def __init__(self, field : str, rule : str):
        super().__init__("Invalid value for {}: {}".format(field,rule), field=field, rule=rule)
        self.field = field
        self.rule = rule
