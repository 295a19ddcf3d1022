from dataclasses import dataclass
from ..utils.serialization import register
from ..utils.errors import InadmissibleParamsError


@dataclass
@register
class Soliton1D:
    """The positive even solution of the 1D delta-NLS at frequency omega.

    Exists iff omega > gamma^2/4 (for either sign of gamma; for gamma > 0 this
    is the condition gamma < 2 sqrt(omega) of the profile shift)."""
    omega : float
    gamma : float
    p : float

    def check(self) -> None:
        if not self.p > 1:
            raise InadmissibleParamsError("p must exceed 1", p=self.p)
        if not (self.omega > 0 and self.omega > self.gamma**2/4.0):
            raise InadmissibleParamsError("omega must exceed gamma^2/4", omega=self.omega, gamma=self.gamma)
