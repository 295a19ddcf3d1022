from __future__ import annotations
from dataclasses import dataclass,replace
from ..utils.serialization import register
from ..utils.errors import InadmissibleParamsError
from typing import Optional


@dataclass
@register
class ProblemParams:
    """Physical parameters of the strip problem.

    p is the power of the nonlinearity, gamma the strength of the line defect
    at x=0 (negative is attractive), L the strip width.  omega is the
    frequency of the action problem and m the prescribed mass of the energy
    problem; either may be absent depending on which problem is solved.
    """
    p : float
    gamma : float
    L : float = 1.0
    omega : Optional[float] = None
    m : Optional[float] = None

    @property
    def h(self) -> float:
        """Weight of the transverse kinetic energy on the rescaled strip."""
        return 1.0/self.L**2

    def with_omega(self, omega : float) -> ProblemParams:
        return replace(self,omega=omega)

    def with_width(self, L : float) -> ProblemParams:
        return replace(self,L=L)

    def check_basic(self) -> None:
        if not self.p > 1:
            raise InadmissibleParamsError("p must exceed 1", p=self.p)
        if not self.L > 0:
            raise InadmissibleParamsError("strip width L must be positive", L=self.L)

    def check_action(self) -> None:
        """Admissibility of the Nehari action problem: omega > gamma^2/4 for
        gamma < 0, omega > 0 otherwise."""
        self.check_basic()
        if self.omega is None:
            raise InadmissibleParamsError("omega is required for the action problem")
        if self.gamma < 0 and not self.omega > self.gamma**2/4.0:
            raise InadmissibleParamsError("omega must exceed gamma^2/4", omega=self.omega, gamma=self.gamma)
        if not self.omega > 0:
            raise InadmissibleParamsError("omega must be positive", omega=self.omega)

    def check_energy(self) -> None:
        """Admissibility of the fixed-mass energy problem: 1 < p < 3, m > 0."""
        self.check_basic()
        if not self.p < 3:
            raise InadmissibleParamsError("the energy problem needs 1 < p < 3", p=self.p)
        if self.m is None or not self.m > 0:
            raise InadmissibleParamsError("mass m must be positive", m=self.m)

    def check_soliton(self) -> None:
        """Existence of the 1D soliton: omega > gamma^2/4 and omega > 0."""
        self.check_action()
