"""Phase-space model: degrees of freedom, Hamiltonian and symplectic forms."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigurationError
from .poly import Poly, variables
from .scalar import Scalar


def standard_omega(n: int) -> tuple[tuple[int, ...], ...]:
    """omega^{ab}: block [[0, 1], [-1, 0]] per degree of freedom."""
    m = [[0] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        m[2 * k][2 * k + 1] = 1
        m[2 * k + 1][2 * k] = -1
    return tuple(map(tuple, m))


def _inverse_omega(upper) -> tuple[tuple[int, ...], ...]:
    # the inverse of a block-standard symplectic matrix is its negative
    return tuple(tuple(-x for x in row) for row in upper)


@dataclass(frozen=True)
class PhaseSpaceModel:
    """n degrees of freedom with a polynomial Hamiltonian.

    ``omega_upper[a][b]`` is omega^{ab}; ``omega_lower[a][b]`` is omega_{ab},
    its inverse: omega^{ab} omega_{bc} = delta^a_c.
    """

    n: int
    H: Poly
    omega_upper: tuple[tuple[int, ...], ...] = field(default=None)  # type: ignore[assignment]
    omega_lower: tuple[tuple[int, ...], ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError("need at least one degree of freedom")
        if self.H.nvars != 2 * self.n:
            raise ConfigurationError(
                f"Hamiltonian has {self.H.nvars} variables, model needs {2 * self.n}"
            )
        if self.omega_upper is None:
            object.__setattr__(self, "omega_upper", standard_omega(self.n))
        if self.omega_lower is None:
            object.__setattr__(self, "omega_lower", _inverse_omega(self.omega_upper))
        d = self.dim
        for a in range(d):
            for c in range(d):
                s = sum(self.omega_upper[a][b] * self.omega_lower[b][c] for b in range(d))
                if s != (a == c):
                    raise ConfigurationError("omega_upper * omega_lower is not the identity")

    @property
    def dim(self) -> int:
        return 2 * self.n

    def flow_field(self) -> list[Poly]:
        """Hamiltonian vector field omega^{ab} d_b H, one polynomial per a."""
        dH = [self.H.diff(b) for b in range(self.dim)]
        out = []
        for a in range(self.dim):
            v = Poly(self.dim)
            for b in range(self.dim):
                if self.omega_upper[a][b]:
                    v = v + dH[b] * self.omega_upper[a][b]
            out.append(v)
        return out

    def to_dict(self) -> dict:
        return {"dof": self.n, "hamiltonian": str(self.H)}


def model(n: int, H) -> PhaseSpaceModel:
    """Convenience: ``H`` may be a Poly or a callable of the variable list."""
    if callable(H) and not isinstance(H, Poly):
        H = H(*variables(n))
    if not isinstance(H, Poly):
        H = Poly.const(2 * n, Scalar.coerce(H))
    return PhaseSpaceModel(n, H)


def corpus() -> dict[str, PhaseSpaceModel]:
    """Hamiltonians every exact check runs over."""
    half = Scalar("1/2")
    quarter = Scalar("1/4")
    return {
        "harmonic": model(1, lambda q, p: (q**2 + p**2) * half),
        "quartic": model(1, lambda q, p: p**2 * half + q**4 * quarter),
        "cubic": model(1, lambda q, p: q**3),
        "linear_potential": model(1, lambda q, p: p**2 * half + q),
        "harmonic_2d": model(2, lambda q1, p1, q2, p2: (q1**2 + p1**2 + q2**2 + p2**2) * half),
        "coupled_2d": model(2, lambda q1, p1, q2, p2: q1 * p2),
    }
