from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError
from .geometry import Cube, Hyperplane

EMPIRICAL = "empirical"
CERTIFIED = "certified-parameters"
MODES = (EMPIRICAL, CERTIFIED)


@dataclass(frozen=True)
class ConstructionConfig:
    """Everything that determines a construction run.

    The band function is fixed to F(k) = R**(k/3) and the ancestor rule to
    h_k = floor(k / (3n)).  ``hyperplanes[i]`` is avoided from generation i+1
    on.  The three optional constants are only used in certified-parameters
    mode, where they stand in for the unspecified const(m,n) of the removal
    budget and const'''(m,n,eps), eps of the final parameter condition.
    """

    m: int
    n: int
    cube: Cube
    gamma: tuple
    c: Fraction
    R: int
    hyperplanes: tuple = ()
    mode: str = EMPIRICAL
    const_mn: Fraction = None
    cond5_const: Fraction = None
    cond5_eps: Fraction = None
    node_budget: int = field(default=200_000, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(Fraction(g) for g in self.gamma))
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "hyperplanes", tuple(self.hyperplanes))
        for name in ("const_mn", "cond5_const", "cond5_eps"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, Fraction(v))
        self.validate()

    def validate(self):
        if self.m < 1 or self.n < 1:
            raise ConfigError("m and n must be positive")
        if self.m + self.n < 3:
            raise ConfigError("m+n ≥ 3 required")
        if (self.cube.m, self.cube.n) != (self.m, self.n):
            raise ConfigError("cube shape does not match m x n")
        if self.cube.edge <= 0:
            raise ConfigError("cube edge must be positive")
        if len(self.gamma) != self.m:
            raise ConfigError("gamma must have m entries")
        if self.c <= 0:
            raise ConfigError("c must be positive")
        if self.R < 2:
            raise ConfigError("R must be at least 2")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        for H in self.hyperplanes:
            if not isinstance(H, Hyperplane):
                raise ConfigError("hyperplanes must be Hyperplane instances")
            if len(H.coefficients) != self.m or any(len(r) != self.n for r in H.coefficients):
                raise ConfigError("hyperplane shape does not match m x n")
        if self.const_mn is not None and self.const_mn <= 0:
            raise ConfigError("const_mn must be positive")
        if self.cond5_eps is not None and not 0 < self.cond5_eps < 1:
            raise ConfigError("cond5_eps must lie in (0, 1)")

    @property
    def edge(self):
        return self.cube.edge

    @property
    def l(self):
        return self.m * self.n

    @property
    def homogeneous(self):
        return not any(self.gamma)

    def h(self, k):
        return k // (3 * self.n)

    def hyperplane(self, index):
        """H_index for index >= 1 (H_0 is empty), or None past the list."""
        if 1 <= index <= len(self.hyperplanes):
            return self.hyperplanes[index - 1]
        return None
