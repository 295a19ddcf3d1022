from dataclasses import dataclass
from ..utils.serialization import register
from typing import Optional


@dataclass
@register
class FunctionalReport:
    """All functionals of one field on the rescaled strip.

    kinetic_y is the raw ||d_y u||^2; it enters the functionals with weight
    1/L^2.  potential is ||u||_{p+1}^{p+1}.
    """
    action : float
    nehari : float
    energy : float
    mass : float
    trace : float
    kinetic_x : float
    kinetic_y : float
    potential : float


@dataclass
@register
class PohozaevResiduals:
    """Signed residuals of the Nehari and x-dilation identities, plus the
    frequency recovered from them."""
    nehari : float
    dilation : float
    omega_recovered : Optional[float] = None


@dataclass
@register
class RearrangementDiagnostics:
    """Violations of the symmetry properties expected of a ground state,
    all zero for an ideal minimizer."""
    positivity : float
    even_symmetry : float
    monotone_x : float
    monotone_y : float
    sup_norm : float

    def worst(self) -> float:
        return max(self.positivity,self.even_symmetry,self.monotone_x,self.monotone_y)
