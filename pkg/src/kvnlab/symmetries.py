"""Local superspace symmetries, observable classification and picture change.

The three local transformations act on the component fields with a
time-dependent nilpotent parameter eps:

    T1:  phi^a -> phi^a + eps theta c^a,                c^a    -> (1 - eps) c^a
    T2:  phi^a -> phi^a + eps thetabar omega^{ab} cbar_b, cbar_b -> (1 - eps) cbar_b
    T3:  phi^a -> phi^a + i eps thetabar theta phi^a,  lam_b  -> lam_b - eps omega_{bc} phi^c

Time-differentiated fields transform by the time derivative of the shift,
which brings in eps'. Because eps and eps' are first-order nilpotent, every
invariance statement below is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .errors import ConfigurationError, UnsupportedInputError
from .grassmann import reorder_sign
from .model import PhaseSpaceModel
from .poly import Poly
from .report import Report
from .scalar import I, Scalar
from .superfield import build_superfield, omega_contract, taylor_shift
from .superops import Charges, OperatorSum, charges, commutator, compose
from .superspace import Fields, SuperspaceExpression

KINDS = ("T1", "T2", "T3")


@dataclass(frozen=True)
class LocalTransformation:
    kind: str
    model: PhaseSpaceModel
    parameter: str = "eps"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown local transformation {self.kind!r}")

    def images(self, fields: Fields) -> tuple[dict, dict]:
        """Images of the undifferentiated fields: (symbol map, generator map)."""
        reg = fields.registry
        eps = SuperspaceExpression.gen(reg, self.parameter)
        reg.position(reg.find("epsilon_dot"))
        m = self.model
        f = fields
        syms: dict = {}
        gens: dict = {}
        for a in range(m.dim):
            phi = f.phi(a)
            if self.kind == "T1":
                syms[("phi", a, 0)] = phi + eps * f.theta * f.c(a)
                gens[reg.find("ghost", a, 0)] = f.c(a) - eps * f.c(a)
            elif self.kind == "T2":
                syms[("phi", a, 0)] = phi + eps * f.thetabar * omega_contract(m, a, f.cbar)
                gens[reg.find("antighost", a, 0)] = f.cbar(a) - eps * f.cbar(a)
            else:
                syms[("phi", a, 0)] = phi + eps * f.thetabar * f.theta * phi * I
                syms[("lam", a, 0)] = f.lam(a) - eps * omega_contract(m, a, f.phi, upper=False)
        return syms, gens

    def prolonged_images(self, fields: Fields) -> tuple[dict, dict]:
        """Images including first time derivatives of every transformed field."""
        syms, gens = self.images(fields)
        reg = fields.registry
        for (fld, a, k), img in list(syms.items()):
            syms[(fld, a, k + 1)] = img.time_derivative()
        for lab, img in list(gens.items()):
            g = reg[lab]
            gens[reg.find(g.kind, g.index, g.order + 1)] = img.time_derivative()
        return syms, gens


def local_transform(expr: SuperspaceExpression, t: LocalTransformation) -> SuperspaceExpression:
    """Apply ``t`` (with jet prolongation) to an expression."""
    if expr.max_order() > 1:
        raise UnsupportedInputError("local transformations are prolonged to first derivatives only")
    fields = Fields(t.model.n, expr.registry)
    syms, gens = t.prolonged_images(fields)
    return expr.substitute(syms, gens)


def transform_residual(expr: SuperspaceExpression, t: LocalTransformation) -> SuperspaceExpression:
    return local_transform(expr, t) - expr


def is_invariant(
    expr: SuperspaceExpression,
    kinds: Iterable[str],
    model: PhaseSpaceModel,
    include_dot: bool = False,
) -> bool:
    targets = [expr, expr.time_derivative()] if include_dot else [expr]
    for kind in kinds:
        t = LocalTransformation(kind, model)
        if any(not transform_residual(x, t).is_zero() for x in targets):
            return False
    return True


class Verdict(NamedTuple):
    accepted: bool
    failing: str | None
    residual: SuperspaceExpression | None
    reduced: SuperspaceExpression

    def __str__(self) -> str:
        if self.accepted:
            return "ACCEPTED"
        return f"REJECTED ({self.failing}: {self.residual})"


def classify_observable(expr: SuperspaceExpression, model: PhaseSpaceModel) -> Verdict:
    """ACCEPTED iff invariant under T1, T2, T3 together with its time
    derivative; otherwise names the first failing transformation.

    ``reduced`` is the theta = thetabar = 0, ghost-free part, a diagnostic
    reading of the underlying function of phi.
    """
    reduced = _ghost_free(expr.drop(["theta", "thetabar"]))
    for kind in KINDS:
        t = LocalTransformation(kind, model)
        for x in (expr, expr.time_derivative()):
            r = transform_residual(x, t)
            if not r.is_zero():
                return Verdict(False, kind, r, reduced)
    return Verdict(True, None, None, reduced)


def _ghost_free(expr: SuperspaceExpression) -> SuperspaceExpression:
    return SuperspaceExpression(expr.registry, {k: c for k, c in expr.terms.items() if not k[1]})


def check_local_symmetries(model: PhaseSpaceModel) -> Report:
    """Superfield invariance, sub-piece exclusivity and action invariance."""
    from .superfield import BEREZIN_MEASURE, superspace_action_density

    f = Fields(model.n)
    Phi = build_superfield(model, f)
    report = Report()
    for a in range(model.dim):
        for kind in KINDS:
            t = LocalTransformation(kind, model)
            r0 = transform_residual(Phi[a], t)
            r1 = transform_residual(Phi[a].time_derivative(), t)
            report.add(f"Phi^{a} invariant under {kind}", r0.is_zero(), str(r0))
            report.add(f"Phi'^{a} invariant under {kind}", r1.is_zero(), str(r1))
        pieces = {
            "phi+theta c": (f.phi(a) + f.theta * f.c(a), {"T1"}),
            "phi+thetabar omega cbar": (f.phi(a) + f.thetabar * omega_contract(model, a, f.cbar), {"T2"}),
        }
        for name, (x, allowed) in pieces.items():
            for kind in KINDS:
                r = transform_residual(x, LocalTransformation(kind, model))
                expect = kind in allowed
                report.add(
                    f"{name} (a={a}) {'invariant' if expect else 'not invariant'} under {kind}",
                    r.is_zero() == expect,
                    str(r),
                )
    density = superspace_action_density(model, f)
    reduced = density.berezin(BEREZIN_MEASURE)
    for kind in KINDS:
        t = LocalTransformation(kind, model)
        r = transform_residual(density, t)
        report.add(f"action density invariant under {kind}", r.is_zero(), str(r))
        r2 = local_transform(density, t).berezin(BEREZIN_MEASURE) - reduced
        report.add(f"integrated action invariant under {kind}", r2.is_zero(), str(r2))
    return report


# ---------------------------------------------------------------------------
# operator-valued superspace


class SuperOperatorExpression:
    """sum over theta-blades B of theta^B O_B with OperatorSum coefficients.

    Blade masks: bit 0 = theta, bit 1 = thetabar; mask 3 is theta*thetabar.
    theta and thetabar anticommute with ghost operators and commute with
    phi-hat, lam-hat.
    """

    __slots__ = ("dim", "blades")

    def __init__(self, dim: int, blades: Mapping[int, OperatorSum] | None = None):
        self.dim = dim
        self.blades = {m: o for m, o in (blades or {}).items() if not o.is_zero()}

    @classmethod
    def op(cls, O: OperatorSum) -> SuperOperatorExpression:
        return cls(O.dim, {0: O})

    @classmethod
    def identity(cls, dim: int) -> SuperOperatorExpression:
        return cls.op(OperatorSum.identity(dim))

    @classmethod
    def theta(cls, dim: int) -> SuperOperatorExpression:
        return cls(dim, {1: OperatorSum.identity(dim)})

    @classmethod
    def thetabar(cls, dim: int) -> SuperOperatorExpression:
        return cls(dim, {2: OperatorSum.identity(dim)})

    def _lift(self, other) -> SuperOperatorExpression:
        if isinstance(other, SuperOperatorExpression):
            return other
        if isinstance(other, OperatorSum):
            return SuperOperatorExpression.op(other)
        return SuperOperatorExpression.op(OperatorSum.scalar(self.dim, other))

    def __add__(self, other) -> SuperOperatorExpression:
        other = self._lift(other)
        out = dict(self.blades)
        for m, o in other.blades.items():
            out[m] = out[m] + o if m in out else o
        return SuperOperatorExpression(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> SuperOperatorExpression:
        return SuperOperatorExpression(self.dim, {m: -o for m, o in self.blades.items()})

    def __sub__(self, other) -> SuperOperatorExpression:
        return self + (-self._lift(other))

    def __mul__(self, other) -> SuperOperatorExpression:
        if not isinstance(other, (SuperOperatorExpression, OperatorSum)):
            c = Scalar.coerce(other)
            return SuperOperatorExpression(self.dim, {m: o * c for m, o in self.blades.items()})
        other = self._lift(other)
        out: dict[int, OperatorSum] = {}
        for ma, oa in self.blades.items():
            even, odd = oa.graded_parts()
            for mb, ob in other.blades.items():
                if ma & mb:
                    continue
                sign = reorder_sign(ma, mb)
                # moving theta^B left past O_A costs (-1)^{|O_A||B|}
                flip = bin(mb).count("1") & 1
                prod = compose(even, ob) + (compose(odd, ob) * (-1 if flip else 1))
                prod = prod * sign
                m = ma | mb
                out[m] = out[m] + prod if m in out else prod
        return SuperOperatorExpression(self.dim, out)

    def __rmul__(self, other) -> SuperOperatorExpression:
        return self._lift(other) * self if isinstance(other, OperatorSum) else self * other

    def __pow__(self, k: int) -> SuperOperatorExpression:
        out = SuperOperatorExpression.identity(self.dim)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.blades

    def theta_free(self) -> bool:
        return set(self.blades) <= {0}

    def body(self) -> OperatorSum:
        return self.blades.get(0, OperatorSum(self.dim))

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        return self.blades == other.blades

    def __hash__(self) -> int:
        return hash(frozenset(self.blades.items()))

    def __str__(self) -> str:
        if not self.blades:
            return "0"
        names = {0: "", 1: "theta", 2: "thetabar", 3: "theta*thetabar"}
        parts = []
        for m in sorted(self.blades):
            o = str(self.blades[m])
            parts.append(o if m == 0 else f"{names[m]}*({o})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SuperOperatorExpression({self})"


def operator_superfield(model: PhaseSpaceModel) -> list[SuperOperatorExpression]:
    """Phi-hat^a = phi^a + theta c^a + thetabar omega^{ab} cbar_b
    + i thetabar theta omega^{ab} lam_b."""
    d = model.dim
    th = SuperOperatorExpression.theta(d)
    tb = SuperOperatorExpression.thetabar(d)
    out = []
    for a in range(d):
        x = SuperOperatorExpression.op(OperatorSum.phi(d, a))
        x = x + th * OperatorSum.c(d, a)
        x = x + tb * omega_contract(model, a, lambda b: OperatorSum.cbar(d, b))
        x = x + tb * th * omega_contract(model, a, lambda b: OperatorSum.lam(d, b)) * I
        out.append(x)
    return out


def evaluate_operator(G: Poly, args: list[SuperOperatorExpression]) -> SuperOperatorExpression:
    """G evaluated on operator arguments, factors multiplied in index order."""
    dim = args[0].dim
    out = SuperOperatorExpression(dim)
    for e, c in G.terms.items():
        term = SuperOperatorExpression.op(OperatorSum.scalar(dim, c))
        for a, k in enumerate(e):
            if k:
                term = term * args[a] ** k
        out = out + term
    return out


def _exp_nilpotent(X: SuperOperatorExpression) -> SuperOperatorExpression:
    X2 = X * X
    if not (X2 * X).is_zero():
        raise UnsupportedInputError("conjugator is not nilpotent of order 3")
    return SuperOperatorExpression.identity(X.dim) + X + X2 * Scalar("1/2")


def picture_generator(model: PhaseSpaceModel, Q: Charges | None = None) -> SuperOperatorExpression:
    """X = theta Q_BRS + Qbar_BRS thetabar."""
    Q = Q or charges(model)
    d = model.dim
    return SuperOperatorExpression.theta(d) * Q.Q_BRS + SuperOperatorExpression.op(Q.Qbar_BRS) * SuperOperatorExpression.thetabar(d)


def picture_change(O: SuperOperatorExpression, model: PhaseSpaceModel) -> SuperOperatorExpression:
    """e^{-X} O e^{X}: Heisenberg picture in theta, thetabar -> Schroedinger."""
    X = picture_generator(model)
    return _exp_nilpotent(-X) * O * _exp_nilpotent(X)


def check_picture_change(G: Poly, model: PhaseSpaceModel, name: str | None = None) -> Report:
    name = name or str(G)
    O = evaluate_operator(G, operator_superfield(model))
    S = picture_change(O, model)
    report = Report()
    report.add(f"picture_change {name}: theta-free", S.theta_free(), str(S))
    r = S.body() - OperatorSum.mult(G)
    report.add(f"picture_change {name}: = G(phi)", S.theta_free() and r.is_zero(), str(r))
    return report


def check_generators(model: PhaseSpaceModel) -> Report:
    """[Q_BRS, phi^a] = c^a and [phi^a, Qbar_BRS] = omega^{ab} cbar_b."""
    d = model.dim
    Q = charges(model)
    report = Report()
    for a in range(d):
        r = commutator(Q.Q_BRS, OperatorSum.phi(d, a)) - OperatorSum.c(d, a)
        report.add(f"[Q_BRS, phi^{a}] = c^{a}", r.is_zero(), str(r))
        target = omega_contract(model, a, lambda b: OperatorSum.cbar(d, b))
        r = commutator(OperatorSum.phi(d, a), Q.Qbar_BRS) - target
        report.add(f"[phi^{a}, Qbar_BRS] = omega^(ab) cbar_b", r.is_zero(), str(r))
    return report


# ---------------------------------------------------------------------------
# states


def _check_state(psi: SuperspaceExpression) -> None:
    reg = psi.registry
    for s in psi.symbols():
        if s[0] != "phi" or s[2] != 0:
            raise UnsupportedInputError(f"state depends on {s}; only phi and c are allowed")
    for g in psi.generators():
        e = reg[g]
        if e.kind != "ghost" or e.order != 0:
            raise UnsupportedInputError(f"state depends on {g}; only phi and c are allowed")


def schrodinger_state(psi: SuperspaceExpression, model: PhaseSpaceModel) -> SuperspaceExpression:
    """psi(phi^a + theta c^a + thetabar omega^{ab} cbar_b, c)."""
    _check_state(psi)
    f = Fields(model.n, psi.registry)
    shifts = {
        ("phi", a, 0): f.theta * f.c(a) + f.thetabar * omega_contract(model, a, f.cbar)
        for a in range(model.dim)
    }
    return taylor_shift(psi, shifts, 2)


class ZeroFormProjection(NamedTuple):
    zero_form: SuperspaceExpression
    is_pure: bool


def zero_form_project(state: SuperspaceExpression) -> ZeroFormProjection:
    """Keep the ghost-number-zero part; ``is_pure`` when nothing was dropped."""
    _check_state(state)
    z = _ghost_free(state)
    return ZeroFormProjection(z, z == state)
