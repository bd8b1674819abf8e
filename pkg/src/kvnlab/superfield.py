"""Superfield construction, Berezin reduction and the action identity.

The superfield packages the phase-space variable with its ghost, antighost
and response-field partners,

    Phi^a = phi^a + theta c^a + thetabar omega^{ab} cbar_b
            + i thetabar theta omega^{ab} lam_b,

and integrating a function of it over theta, thetabar recovers the
Lie-derivative Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedInputError
from .model import PhaseSpaceModel
from .poly import Poly
from .report import Report
from .scalar import I, Scalar
from .superops import OperatorSum
from .superspace import Fields, SuperspaceExpression, Sym

BEREZIN_MEASURE = ("theta", "thetabar")


@dataclass(frozen=True)
class Superfield:
    fields: Fields
    components: tuple[SuperspaceExpression, ...]

    def __getitem__(self, a: int) -> SuperspaceExpression:
        return self.components[a]

    def __len__(self) -> int:
        return len(self.components)

    def nilpotent_parts(self) -> list[SuperspaceExpression]:
        """Phi^a - phi^a for every a."""
        return [self.components[a] - self.fields.phi(a) for a in range(len(self))]

    def time_derivative(self) -> tuple[SuperspaceExpression, ...]:
        return tuple(x.time_derivative() for x in self.components)


def omega_contract(model: PhaseSpaceModel, a: int, vec, upper: bool = True):
    """sum_b omega^{ab} vec(b) (or omega_{ab} with ``upper=False``)."""
    w = model.omega_upper if upper else model.omega_lower
    out = None
    for b in range(model.dim):
        if w[a][b]:
            term = vec(b) * w[a][b]
            out = term if out is None else out + term
    return out


def build_superfield(model: PhaseSpaceModel, fields: Fields | None = None) -> Superfield:
    f = fields or Fields(model.n)
    comps = []
    for a in range(model.dim):
        x = (
            f.phi(a)
            + f.theta * f.c(a)
            + f.thetabar * omega_contract(model, a, f.cbar)
            + f.thetabar * f.theta * omega_contract(model, a, f.lam) * I
        )
        comps.append(x)
    return Superfield(f, tuple(comps))


def taylor_shift(
    expr: SuperspaceExpression, shifts: dict[Sym, SuperspaceExpression], order: int = 2
) -> SuperspaceExpression:
    """expr with each symbol s replaced by s + shifts[s], by Taylor expansion
    truncated at ``order``. Shifts must be even; when they are nilpotent with
    vanishing cubes the second-order truncation is exact."""
    out = expr
    term = expr
    syms = list(shifts)
    fact = 1
    for k in range(1, order + 1):
        nxt = SuperspaceExpression(expr.registry)
        for s in syms:
            nxt = nxt + shifts[s] * term.diff(s)
        term = nxt
        fact *= k
        out = out + term * (Scalar(1) / fact)
    return out


def evaluate_on_superfield(F: Poly, Phi: Superfield, order: int = 2) -> SuperspaceExpression:
    """F(Phi) by nilpotent Taylor expansion around phi."""
    f = Phi.fields
    shifts = {("phi", a, 0): n for a, n in enumerate(Phi.nilpotent_parts())}
    return taylor_shift(f.poly(F), shifts, order)


def classical_image(op: OperatorSum, fields: Fields) -> SuperspaceExpression:
    """Read a normal-ordered operator as a classical expression: hats removed,
    ghosts become Grassmann generators in the normal-order sequence."""
    out = fields.zero()
    for m, c in op.terms.items():
        term = fields.const(c)
        for a, k in enumerate(m.phi):
            if k:
                term = term * fields.phi(a) ** k
        for a in range(op.dim):
            if m.c >> a & 1:
                term = term * fields.c(a)
        for a in range(op.dim):
            if m.cbar >> a & 1:
                term = term * fields.cbar(a)
        for a, k in enumerate(m.lam):
            if k:
                term = term * fields.lam(a) ** k
        out = out + term
    return out


def berezin_reduce(F: Poly, model: PhaseSpaceModel, fields: Fields | None = None) -> SuperspaceExpression:
    """i * int dtheta dthetabar F(Phi)."""
    Phi = build_superfield(model, fields)
    return evaluate_on_superfield(F, Phi).berezin(BEREZIN_MEASURE) * I


def lie_hamiltonian_classical(model: PhaseSpaceModel, fields: Fields) -> SuperspaceExpression:
    """lam_a omega^{ab} d_b H + i cbar_a omega^{ab} d_b d_d H c^d as a classical expression."""
    f = fields
    out = f.zero()
    H = model.H
    for a in range(model.dim):
        for b in range(model.dim):
            w = model.omega_upper[a][b]
            if not w:
                continue
            out = out + f.lam(a) * f.poly(H.diff(b)) * w
            for d in range(model.dim):
                hess = H.diff(b).diff(d)
                if not hess.is_zero():
                    out = out + f.cbar(a) * f.poly(hess) * f.c(d) * (I * w)
    return out


def lagrangian_tilde(model: PhaseSpaceModel, fields: Fields) -> SuperspaceExpression:
    """lam_a phi'^a + i cbar_a c'^a - Htilde."""
    f = fields
    kin = f.zero()
    for a in range(model.dim):
        kin = kin + f.lam(a) * f.phi(a, 1) + f.cbar(a) * f.c(a, 1) * I
    return kin - lie_hamiltonian_classical(model, f)


def check_berezin_identity(model: PhaseSpaceModel) -> Report:
    from .superops import lie_derivative

    f = Fields(model.n)
    lhs = berezin_reduce(model.H, model, f)
    rhs = classical_image(lie_derivative(model), f)
    r = lhs - rhs
    report = Report()
    report.add("berezin_reduce(H) - Htilde", r.is_zero(), str(r), {"berezin": str(lhs)})
    return report


# ---------------------------------------------------------------------------
# Euler operator


def field_variables(fields: Fields) -> list[tuple[str, object]]:
    """Dependent variables of the jet space: (kind, symbol-or-label)."""
    reg = fields.registry
    out: list[tuple[str, object]] = []
    for a in range(2 * fields.n):
        out.append(("even", ("phi", a, 0)))
        out.append(("even", ("lam", a, 0)))
        out.append(("odd", reg.find("ghost", a, 0)))
        out.append(("odd", reg.find("antighost", a, 0)))
    return out


def _dot(var: tuple[str, object], fields: Fields):
    kind, v = var
    if kind == "even":
        field, a, k = v  # type: ignore[misc]
        return (field, a, k + 1)
    g = fields.registry[v]  # type: ignore[index]
    return fields.registry.find(g.kind, g.index, g.order + 1)


def euler_operator(D: SuperspaceExpression, var: tuple[str, object], fields: Fields) -> SuperspaceExpression:
    """Variational derivative dD/du - d/dt dD/du' (left derivatives for odd u)."""
    kind, v = var
    if kind == "even":
        return D.diff(v) - D.diff(_dot(var, fields)).time_derivative()  # type: ignore[arg-type]
    return D.gderiv(v) - D.gderiv(_dot(var, fields)).time_derivative()  # type: ignore[arg-type]


def variational_derivatives(D: SuperspaceExpression, fields: Fields) -> dict[str, SuperspaceExpression]:
    if D.max_order() > 1:
        raise UnsupportedInputError("expression contains derivatives beyond first order")
    out = {}
    for var in field_variables(fields):
        e = euler_operator(D, var, fields)
        name = var[1] if var[0] == "odd" else _sym_name(var[1])
        out[name] = e  # type: ignore[index]
    return out


def _sym_name(s) -> str:
    from .superspace import sym_label

    return sym_label(s)


def total_derivative_test(D: SuperspaceExpression, fields: Fields | None = None) -> bool:
    """True iff D is a total time derivative (all Euler operators vanish)."""
    fields = fields or Fields(D.registry.n, D.registry)
    return all(e.is_zero() for e in variational_derivatives(D, fields).values())


def phase_space_lagrangian(model: PhaseSpaceModel, fields: Fields, kinetic: bool = True) -> SuperspaceExpression:
    """1/2 phi^a omega_{ab} phi'^b - H(phi)."""
    f = fields
    L = -f.poly(model.H)
    if kinetic:
        half = Scalar("1/2")
        for a in range(model.dim):
            for b in range(model.dim):
                w = model.omega_lower[a][b]
                if w:
                    L = L + f.phi(a) * f.phi(b, 1) * (half * w)
    return L


def superspace_action_density(model: PhaseSpaceModel, fields: Fields, kinetic: bool = True) -> SuperspaceExpression:
    """L_ps[Phi, Phi'] before the Berezin integral."""
    Phi = build_superfield(model, fields)
    dPhi = Phi.time_derivative()
    L = phase_space_lagrangian(model, fields, kinetic)
    syms = {("phi", a, 0): Phi[a] for a in range(model.dim)}
    syms |= {("phi", a, 1): dPhi[a] for a in range(model.dim)}
    return L.substitute(syms)


def check_action_identity(model: PhaseSpaceModel, kinetic: bool = True) -> Report:
    """i int dtheta dthetabar L_ps[Phi, Phi'] - Ltilde must be a total derivative."""
    f = Fields(model.n)
    lhs = superspace_action_density(model, f, kinetic).berezin(BEREZIN_MEASURE) * I
    Lt = lagrangian_tilde(model, f) if kinetic else -lie_hamiltonian_classical(model, f)
    D = lhs - Lt
    ev = variational_derivatives(D, f)
    bad = {k: str(v) for k, v in ev.items() if not v.is_zero()}
    report = Report()
    report.add(
        "action_identity (surface term)",
        not bad,
        "0" if not bad else "; ".join(f"E[{k}] = {v}" for k, v in bad.items()),
        {"D": str(D), "kinetic": kinetic},
    )
    return report


# ---------------------------------------------------------------------------
# superfield equation of motion

THETA_SECTORS = ("", "theta", "thetabar", "thetabar theta")


def superfield_eom(model: PhaseSpaceModel) -> Report:
    """Expand Phi'^a = omega^{ab} d_b H(Phi) in the theta basis and check the
    components against Hamilton's equations, the tangent flow, and the
    Euler-Lagrange equations of Ltilde."""
    f = Fields(model.n)
    Phi = build_superfield(model, f)
    dPhi = Phi.time_derivative()
    flow = model.flow_field()
    Lt = lagrangian_tilde(model, f)
    el = variational_derivatives(Lt, f)
    report = Report()
    sectors: dict[str, list[str]] = {s: [] for s in THETA_SECTORS}
    for a in range(model.dim):
        resid = dPhi[a] - evaluate_on_superfield(flow[a], Phi)
        comps = {s: resid.theta_component(s) for s in THETA_SECTORS}
        for s in THETA_SECTORS:
            sectors[s].append(f"{comps[s]} = 0")
        # theta^0: Hamilton's equations
        hamilton = f.phi(a, 1) - f.poly(flow[a])
        # theta: tangent (Jacobi) flow c'^a = omega^{ab} d_b d_d H c^d
        tangent = f.c(a, 1)
        for d in range(model.dim):
            tangent = tangent - f.poly(flow[a].diff(d)) * f.c(d)
        checks = [
            (f"theta^0 sector a={a}: Hamilton", comps[""] - hamilton),
            (f"theta sector a={a}: tangent flow", comps["theta"] - tangent),
            (f"theta^0 sector a={a}: = E[lam]", comps[""] - el[_sym_name(("lam", a, 0))]),
            (
                f"theta sector a={a}: = -i E[cbar]",
                comps["theta"] + el[f.registry.find("antighost", a, 0)] * I,
            ),
            (
                f"thetabar sector a={a}: = -i omega E[c]",
                comps["thetabar"]
                + omega_contract(model, a, lambda b: el[f.registry.find("ghost", b, 0)]) * I,
            ),
            (
                f"thetabar theta sector a={a}: = -i omega E[phi]",
                comps["thetabar theta"]
                + omega_contract(model, a, lambda b: el[_sym_name(("phi", b, 0))]) * I,
            ),
        ]
        for name, r in checks:
            report.add(name, r.is_zero(), str(r))
    report.details = {"sectors": sectors}
    return report
