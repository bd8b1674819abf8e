"""Phase-space grid, KvN wavefunctions on it, and quadrature.

All reductions use numpy's pairwise summation over a fixed memory layout, so
norms and expectations come out bitwise identical on every run.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import ConfigurationError, DomainError, ResolutionError


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform tensor grid over ``[q_min, q_max] x [p_min, p_max]``, endpoints included."""

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    n_q: int
    n_p: int

    def __post_init__(self):
        if self.n_q < 8 or self.n_p < 8:
            raise ConfigurationError(f"grid needs at least 8 points per axis, got {self.n_q}x{self.n_p}")
        if not (self.q_min < self.q_max and self.p_min < self.p_max):
            raise ConfigurationError("grid extents must be strictly ordered")
        for v in (self.q_min, self.q_max, self.p_min, self.p_max):
            if not np.isfinite(v):
                raise ConfigurationError("grid extents must be finite")

    @classmethod
    def square(cls, half_width: float, n: int) -> PhaseSpaceGrid:
        return cls(-half_width, half_width, -half_width, half_width, n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_q, self.n_p)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    @property
    def q(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_q)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")

    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        wq = np.full(self.n_q, self.dq)
        wq[[0, -1]] *= 0.5
        wp = np.full(self.n_p, self.dp)
        wp[[0, -1]] *= 0.5
        return np.outer(wq, wp)

    def to_index(self, q, p) -> tuple[np.ndarray, np.ndarray]:
        """Fractional array indices of physical points."""
        return (np.asarray(q) - self.q_min) / self.dq, (np.asarray(p) - self.p_min) / self.dp

    def contains(self, q: float, p: float) -> bool:
        return bool(self.q_min <= q <= self.q_max and self.p_min <= p <= self.p_max)

    def sample(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
        Q, P = self.mesh()
        return np.broadcast_to(np.asarray(f(Q, P)), self.shape).copy()

    def to_dict(self) -> dict:
        return {
            "q_min": self.q_min,
            "q_max": self.q_max,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "n_q": self.n_q,
            "n_p": self.n_p,
        }


@dataclass(frozen=True)
class KvNState:
    """Complex amplitudes psi(q, p) at one time. Treated as immutable."""

    grid: PhaseSpaceGrid
    amplitudes: np.ndarray
    time: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != self.grid.shape:
            raise ConfigurationError(f"amplitudes have shape {a.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(a)):
            raise ConfigurationError("amplitudes must be finite")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def with_amplitudes(self, amplitudes: np.ndarray, time: float | None = None) -> KvNState:
        return KvNState(self.grid, amplitudes, self.time if time is None else time)

    def __add__(self, other: KvNState) -> KvNState:
        _same_grid(self, other)
        return self.with_amplitudes(self.amplitudes + other.amplitudes)

    def __mul__(self, c: complex) -> KvNState:
        return self.with_amplitudes(self.amplitudes * c)

    __rmul__ = __mul__


def _same_grid(a: KvNState, b: KvNState) -> None:
    if a.grid != b.grid:
        raise ConfigurationError("states live on different grids")


def gaussian_state(
    grid: PhaseSpaceGrid,
    center: tuple[float, float],
    sigma: float,
    phase: tuple[float, float] = (0.0, 0.0),
) -> KvNState:
    """Normalised Gaussian exp(-|phi - phi0|^2 / (2 sigma^2)) times an
    optional plane-wave factor exp(i (k_q q + k_p p))."""
    q0, p0 = center
    if not grid.contains(q0, p0):
        raise DomainError(f"center ({q0}, {p0}) lies outside the grid")
    h = max(grid.dq, grid.dp)
    if not sigma >= 2 * h:
        raise ResolutionError(f"sigma = {sigma} is below 2 grid spacings ({2 * h})")
    Q, P = grid.mesh()
    psi = gaussian_amplitude(Q, P, center, sigma, phase)
    psi /= np.sqrt(float(np.sum(grid.weights() * np.abs(psi) ** 2)))
    return KvNState(grid, psi)


def gaussian_amplitude(q, p, center, sigma: float, phase=(0.0, 0.0)) -> np.ndarray:
    """Unnormalised Gaussian profile at arbitrary points."""
    q0, p0 = center
    kq, kp = phase
    return np.exp(-((q - q0) ** 2 + (p - p0) ** 2) / (2 * sigma**2) + 1j * (kq * q + kp * p))


def density(state: KvNState) -> np.ndarray:
    a = state.amplitudes
    return a.real**2 + a.imag**2


def inner(a: KvNState, b: KvNState, observable: np.ndarray | None = None) -> complex:
    """<a|O|b> by trapezoid quadrature (O a multiplication operator)."""
    _same_grid(a, b)
    integrand = np.conj(a.amplitudes) * b.amplitudes
    if observable is not None:
        integrand = integrand * observable
    return complex(np.sum(a.grid.weights() * integrand))


def norm(state: KvNState) -> float:
    return float(np.sqrt(np.sum(state.grid.weights() * density(state))))


def expectation(state: KvNState, observable: np.ndarray) -> complex:
    """<psi|O|psi> / <psi|psi> for O sampled on the state's grid."""
    observable = np.asarray(observable)
    if observable.shape not in ((), state.grid.shape):
        raise ConfigurationError(f"observable shape {observable.shape} does not match grid {state.grid.shape}")
    w = state.grid.weights() * density(state)
    return complex(np.sum(w * observable)) / float(np.sum(w))


def relative_l2_error(state: KvNState, reference: np.ndarray) -> float:
    w = state.grid.weights()
    diff = state.amplitudes - reference
    return float(np.sqrt(np.sum(w * np.abs(diff) ** 2) / np.sum(w * np.abs(reference) ** 2)))


# ---------------------------------------------------------------------------
# export


def state_header(state: KvNState) -> dict:
    return {"grid": state.grid.to_dict(), "time": state.time, "norm": norm(state)}


def write_csv(state: KvNState, path: str | Path) -> None:
    """One row per grid point: q, p, Re psi, Im psi, rho (q varies slowest)."""
    Q, P = state.grid.mesh()
    rho = density(state)
    a = state.amplitudes
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "p", "re_psi", "im_psi", "rho"])
        for row in zip(Q.ravel(), P.ravel(), a.real.ravel(), a.imag.ravel(), rho.ravel()):
            w.writerow([repr(float(x)) for x in row])


def write_header(state: KvNState, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_header(state), indent=2, sort_keys=True) + "\n")


def read_csv(path: str | Path, grid: PhaseSpaceGrid, time: float = 0.0) -> KvNState:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.shape != (grid.n_q * grid.n_p, 5):
        raise ConfigurationError(f"{path}: expected {grid.n_q * grid.n_p} rows of 5 columns")
    psi = (data[:, 2] + 1j * data[:, 3]).reshape(grid.shape)
    return KvNState(grid, psi, time)
