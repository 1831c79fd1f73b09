"""Central numeric configuration: tolerances, comparison policy, cost budgets.

Every module pulls its tolerance constants from here so that the numbers
the test suite asserts against live in exactly one place.
"""
from __future__ import annotations

from dataclasses import dataclass, field


# -- tolerances used across modules ------------------------------------------

#: relative tolerance for FFT roundtrips and discrete Plancherel
TOL_ROUNDTRIP = 1e-12
#: slack added to the sharp Gagliardo-Nirenberg constant 4/pi^2
TOL_GN = 1e-6
#: mass normalisation accuracy of generated test data
TOL_MASS_NORM = 1e-10
#: fraction of total mass allowed near the box boundary before the
#: antiderivative-based gauge transforms become unreliable
BOUNDARY_MASS_WARN = 1e-10
#: relative floor below which |alpha_6| inside the non-resonant set is treated
#: as a resonance leak (scaled by the square of the largest frequency)
SIGMA6_ALPHA_FLOOR = 1e-8
#: amplitude growth factor that triggers blow-up detection in the solver
BLOWUP_FACTOR = 1e6

#: default cost budget for brute-force hyperplane sums (tuples enumerated)
LAMBDA_BUDGET = 300_000_000

#: default lattice truncations (max |mode index|) per multilinear order
DEFAULT_TRUNC = {6: 32, 8: 16, 10: 8}


@dataclass(frozen=True)
class ComparisonPolicy:
    """Numeric realisation of the asymptotic relations ~, >>, >~.

    ``a ~ b``  means  max(a,b) <= C_sim * min(a,b)
    ``a >> b`` means  a >= C_gg * b
    ``a >~ N`` means  a >= C_gtr * N
    """

    C_sim: float = 2.0
    C_gg: float = 8.0
    C_gtr: float = 0.5

    def __post_init__(self) -> None:
        if not self.C_sim > 1.0:
            raise ValueError(f"C_sim must exceed 1, got {self.C_sim}")
        if not self.C_gg > self.C_sim:
            raise ValueError(
                f"C_gg must exceed C_sim ({self.C_sim}), got {self.C_gg}"
            )
        if not 0.0 < self.C_gtr <= 1.0:
            raise ValueError(f"C_gtr must lie in (0, 1], got {self.C_gtr}")

    def similar(self, a, b):
        """a ~ b (both nonnegative)."""
        import numpy as np

        hi = np.maximum(a, b)
        lo = np.minimum(a, b)
        return hi <= self.C_sim * lo

    def much_greater(self, a, b):
        """a >> b (both nonnegative; 0 is never much greater than anything)."""
        import numpy as np

        return np.asarray(a > 0) & (a >= self.C_gg * b)

    def at_least(self, a, n):
        """a >~ n (both nonnegative)."""
        return a >= self.C_gtr * n

    def as_dict(self) -> dict:
        return {"C_sim": self.C_sim, "C_gg": self.C_gg, "C_gtr": self.C_gtr}


@dataclass(frozen=True)
class TruncationConfig:
    """Lattice truncation (max |mode index|) for each multilinear order."""

    L6: int = DEFAULT_TRUNC[6]
    L8: int = DEFAULT_TRUNC[8]
    L10: int = DEFAULT_TRUNC[10]
    budget: int = LAMBDA_BUDGET

    def for_order(self, n: int) -> int:
        if n <= 6:
            return self.L6
        if n <= 8:
            return self.L8
        return self.L10

    def as_dict(self) -> dict:
        return {"L6": self.L6, "L8": self.L8, "L10": self.L10, "budget": self.budget}


DEFAULT_POLICY = ComparisonPolicy()
