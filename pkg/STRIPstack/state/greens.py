from dataclasses import dataclass
from ..utils.serialization import register
from ..utils.errors import InadmissibleParamsError
from typing import Optional
import math


@dataclass
@register
class GreensSpec:
    """Green's function of -Laplacian + gamma delta_0(x) + omega on the physical
    strip of width L with Neumann walls.

    With even_modes_only only the modes cos(2k pi y/L) are summed; otherwise
    the full basis cos(k pi y/L).  k_max=None picks the truncation from the
    greens settings.
    """
    omega : float
    gamma : float
    L : float = 1.0
    k_max : Optional[int] = None
    even_modes_only : bool = False

    def check(self) -> None:
        if not self.omega > 0 or not self.L > 0:
            raise InadmissibleParamsError("omega and L must be positive", omega=self.omega, L=self.L)
        if self.gamma < 0 and not self.gamma + 2.0*math.sqrt(self.omega) > 0:
            raise InadmissibleParamsError("gamma + 2 sqrt(omega) must be positive", omega=self.omega, gamma=self.gamma)
