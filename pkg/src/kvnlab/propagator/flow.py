"""Characteristic maps of Hamiltonian flow for one degree of freedom."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnsupportedHamiltonianError, UnsupportedInputError
from ..model import PhaseSpaceModel
from ..poly import Poly

INTEGRATORS = ("identity", "exact-rotation", "exact-shear", "leapfrog")


def _as_array(x, like: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(x, dtype=float), like.shape)


def _rotation_frequency(H: Poly) -> float | None:
    """w when H = w/2 (q^2 + p^2) + const with w != 0, else None."""
    quad = {e: c for e, c in H.terms.items() if sum(e) > 0}
    a = quad.get((2, 0))
    if a is None or set(quad) != {(2, 0), (0, 2)} or quad[(0, 2)] != a:
        return None
    return 2 * float(a)


def classify_hamiltonian(model: PhaseSpaceModel) -> str:
    if model.n != 1:
        raise UnsupportedInputError("the grid propagator handles one degree of freedom only")
    H = model.H
    if not H.is_real():
        raise UnsupportedHamiltonianError("Hamiltonian has complex coefficients")
    if all(sum(e) == 0 for e in H.terms):
        return "identity"
    if _rotation_frequency(H) is not None:
        return "exact-rotation"
    if not H.depends_on(0) or not H.depends_on(1):
        return "exact-shear"
    if H.is_separable():
        return "leapfrog"
    raise UnsupportedHamiltonianError(
        f"no characteristic integrator for non-separable H = {H}"
    )


@dataclass(frozen=True)
class FlowMap:
    """One step of length ``dt`` of the Hamiltonian flow.

    ``forward`` advances points by ``dt``; ``backward`` gives the foot of the
    characteristic, which is what the semi-Lagrangian step samples.
    Leapfrog is symmetric, so its inverse is the same map with ``-dt``.
    """

    model: PhaseSpaceModel
    dt: float
    integrator: str = ""

    def __post_init__(self):
        kind = classify_hamiltonian(self.model)
        if self.integrator and self.integrator != kind:
            if not (self.integrator == "leapfrog" and kind == "exact-shear"):
                raise UnsupportedHamiltonianError(
                    f"integrator {self.integrator!r} does not apply to H = {self.model.H}"
                )
            kind = "leapfrog"
        object.__setattr__(self, "integrator", kind)
        V, T = self.model.H.split_qp() if self.model.H.is_separable() else (None, None)
        object.__setattr__(self, "_dV", V.diff(0) if V is not None else None)
        object.__setattr__(self, "_dT", T.diff(1) if T is not None else None)

    def forward(self, q, p) -> tuple[np.ndarray, np.ndarray]:
        return self._step(np.asarray(q, dtype=float), np.asarray(p, dtype=float), self.dt)

    def backward(self, q, p) -> tuple[np.ndarray, np.ndarray]:
        return self._step(np.asarray(q, dtype=float), np.asarray(p, dtype=float), -self.dt)

    def _step(self, q: np.ndarray, p: np.ndarray, h: float):
        kind = self.integrator
        if kind == "identity":
            return q.copy(), p.copy()
        if kind == "exact-rotation":
            w = _rotation_frequency(self.model.H)
            c, s = np.cos(w * h), np.sin(w * h)
            return c * q + s * p, c * p - s * q
        dV = lambda x: _as_array(self._dV.evaluate(x, np.zeros_like(x)), x)  # noqa: E731
        dT = lambda y: _as_array(self._dT.evaluate(np.zeros_like(y), y), y)  # noqa: E731
        if kind == "exact-shear":
            # one of the two gradients vanishes identically, so kick and
            # drift commute and one of each is the exact flow
            p1 = p - h * dV(q)
            return q + h * dT(p1), p1
        p_half = p - 0.5 * h * dV(q)
        q1 = q + h * dT(p_half)
        return q1, p_half - 0.5 * h * dV(q1)

    def trajectory(self, q0: float, p0: float, n_steps: int) -> np.ndarray:
        pts = np.empty((n_steps + 1, 2))
        q, p = np.array(q0, dtype=float), np.array(p0, dtype=float)
        pts[0] = (q, p)
        for k in range(n_steps):
            q, p = self.forward(q, p)
            pts[k + 1] = (q, p)
        return pts

    def jacobian_det(self, q, p, eps: float = 1e-6) -> np.ndarray:
        """Determinant of the forward map's Jacobian by central differences."""
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        qa, pa = self.forward(q + eps, p)
        qb, pb = self.forward(q - eps, p)
        qc, pc = self.forward(q, p + eps)
        qd, pd = self.forward(q, p - eps)
        dq_dq, dp_dq = (qa - qb) / (2 * eps), (pa - pb) / (2 * eps)
        dq_dp, dp_dp = (qc - qd) / (2 * eps), (pc - pd) / (2 * eps)
        return dq_dq * dp_dp - dq_dp * dp_dq
