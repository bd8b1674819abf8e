"""Polynomials in commuting jet fields with Grassmann coefficients.

Commuting symbols are ``(field, index, order)`` with ``field`` one of
``"phi"``/``"lam"`` and ``order`` the number of time derivatives. Grassmann
content (ghosts and their derivatives, theta, thetabar, eps, eps') lives in a
:class:`~kvnlab.grassmann.GeneratorRegistry`. Terms are stored flat as
``(monomial, odd_mask, even_mask) -> Scalar``.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import ConfigurationError, UnsupportedInputError
from .grassmann import (
    GeneratorRegistry,
    Multivector,
    _join_terms,
    _term_str,
    phase_label,
    reorder_sign,
    superspace_registry,
)
from .poly import Poly
from .scalar import Scalar, ScalarLike

Sym = tuple[str, int, int]
Mono = tuple[tuple[Sym, int], ...]
TermKey = tuple[Mono, int, int]


def sym_label(s: Sym) -> str:
    field, a, k = s
    base = phase_label(a) if field == "phi" else f"lam_{phase_label(a)}"
    return base + "'" * k


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for s, k in m2:
        d[s] = d.get(s, 0) + k
    return tuple(sorted(d.items()))


class SuperspaceExpression:
    __slots__ = ("registry", "terms")

    def __init__(self, registry: GeneratorRegistry, terms: Mapping[TermKey, ScalarLike] | None = None):
        self.registry = registry
        clean: dict[TermKey, Scalar] = {}
        for key, c in (terms or {}).items():
            c = Scalar.coerce(c)
            if c and bin(key[2]).count("1") <= 1:
                clean[key] = c
        self.terms = clean

    # ---- constructors ----
    @classmethod
    def const(cls, registry: GeneratorRegistry, c: ScalarLike = 1) -> SuperspaceExpression:
        return cls(registry, {((), 0, 0): c})

    @classmethod
    def sym(cls, registry: GeneratorRegistry, field: str, a: int, order: int = 0) -> SuperspaceExpression:
        if field not in ("phi", "lam"):
            raise ConfigurationError(f"unknown commuting field {field!r}")
        if not 0 <= a < 2 * registry.n:
            raise ConfigurationError(f"index {a} outside phase space")
        return cls(registry, {((((field, a, order), 1),), 0, 0): 1})

    @classmethod
    def gen(cls, registry: GeneratorRegistry, label: str, c: ScalarLike = 1) -> SuperspaceExpression:
        return cls.from_multivector(Multivector.gen(registry, label, c))

    @classmethod
    def from_multivector(cls, mv: Multivector, mono: Mono = ()) -> SuperspaceExpression:
        return cls(mv.registry, {(mono, o, e): c for (o, e), c in mv.terms.items()})

    @classmethod
    def from_poly(cls, registry: GeneratorRegistry, f: Poly) -> SuperspaceExpression:
        """Embed a phase-space polynomial in the undifferentiated phi's."""
        out = {}
        for e, c in f.terms.items():
            mono = tuple(sorted(((("phi", a, 0), k) for a, k in enumerate(e) if k)))
            out[(mono, 0, 0)] = c
        return cls(registry, out)

    # ---- queries ----
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def components(self) -> dict[Mono, Multivector]:
        """View as polynomial with Multivector coefficients."""
        grouped: dict[Mono, dict] = {}
        for (m, o, e), c in self.terms.items():
            grouped.setdefault(m, {})[(o, e)] = c
        return {m: Multivector(self.registry, t) for m, t in grouped.items()}

    def symbols(self) -> set[Sym]:
        return {s for (m, _, _) in self.terms for s, _ in m}

    def generators(self) -> set[str]:
        mask = 0
        for _, o, e in self.terms:
            mask |= o | e
        return set(self.registry.labels(mask))

    def max_order(self) -> int:
        orders = [s[2] for s in self.symbols()]
        orders += [self.registry[g].order for g in self.generators()]
        return max(orders, default=0)

    def parity(self) -> int | None:
        ps = {bin(o).count("1") & 1 for (_, o, _) in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    # ---- arithmetic ----
    def _lift(self, other) -> SuperspaceExpression:
        if isinstance(other, SuperspaceExpression):
            if other.registry != self.registry:
                raise ConfigurationError("expressions over different registries")
            return other
        if isinstance(other, Multivector):
            return SuperspaceExpression.from_multivector(other)
        return SuperspaceExpression.const(self.registry, other)

    def __add__(self, other) -> SuperspaceExpression:
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Scalar(0)) + c
        return SuperspaceExpression(self.registry, out)

    __radd__ = __add__

    def __neg__(self) -> SuperspaceExpression:
        return SuperspaceExpression(self.registry, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> SuperspaceExpression:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> SuperspaceExpression:
        return self._lift(other) - self

    def __mul__(self, other) -> SuperspaceExpression:
        if isinstance(other, (SuperspaceExpression, Multivector)):
            other = self._lift(other)
            out: dict[TermKey, Scalar] = {}
            for (m1, o1, e1), c1 in self.terms.items():
                for (m2, o2, e2), c2 in other.terms.items():
                    if o1 & o2 or (e1 and e2):
                        continue
                    c = c1 * c2
                    if reorder_sign(o1, o2) < 0:
                        c = -c
                    key = (_mono_mul(m1, m2), o1 | o2, e1 | e2)
                    out[key] = out.get(key, Scalar(0)) + c
            return SuperspaceExpression(self.registry, out)
        c = Scalar.coerce(other)
        return SuperspaceExpression(self.registry, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other) -> SuperspaceExpression:
        if isinstance(other, Multivector):
            return SuperspaceExpression.from_multivector(other) * self
        return self * other

    def __pow__(self, k: int) -> SuperspaceExpression:
        out = SuperspaceExpression.const(self.registry, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except (TypeError, ConfigurationError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # ---- calculus ----
    def diff(self, s: Sym) -> SuperspaceExpression:
        """Partial derivative with respect to a commuting jet symbol."""
        out: dict[TermKey, Scalar] = {}
        for (m, o, e), c in self.terms.items():
            d = dict(m)
            k = d.get(s, 0)
            if not k:
                continue
            if k == 1:
                del d[s]
            else:
                d[s] = k - 1
            key = (tuple(sorted(d.items())), o, e)
            out[key] = out.get(key, Scalar(0)) + c * k
        return SuperspaceExpression(self.registry, out)

    def gderiv(self, label: str) -> SuperspaceExpression:
        """Left derivative with respect to an odd generator."""
        i = self.registry.position(label)
        if not self.registry.entries[i].odd:
            raise ConfigurationError(f"derivative with respect to even parameter {label!r}")
        bit = 1 << i
        out: dict[TermKey, Scalar] = {}
        for (m, o, e), c in self.terms.items():
            if o & bit:
                sign = -1 if bin(o & (bit - 1)).count("1") & 1 else 1
                out[(m, o ^ bit, e)] = c * sign
        return SuperspaceExpression(self.registry, out)

    def berezin(self, measure: Iterable[str]) -> SuperspaceExpression:
        measure = list(measure)
        if len(set(measure)) != len(measure):
            raise ConfigurationError(f"repeated generator in Berezin measure {measure}")
        x = self
        for lab in reversed(measure):
            x = x.gderiv(lab)
        return x

    def drop(self, labels: Iterable[str]) -> SuperspaceExpression:
        """Set the named generators to zero."""
        mask = 0
        for lab in labels:
            mask |= 1 << self.registry.position(lab)
        return SuperspaceExpression(
            self.registry, {k: c for k, c in self.terms.items() if not (k[1] | k[2]) & mask}
        )

    def theta_component(self, blade: str) -> SuperspaceExpression:
        """Coefficient X_B in ``expr = X + theta X_t + thetabar X_tb + thetabar theta X_tbt``.

        ``blade`` is one of ``""``, ``"theta"``, ``"thetabar"``, ``"thetabar theta"``.
        """
        if blade == "":
            return self.drop(["theta", "thetabar"])
        if blade == "theta":
            return self.drop(["thetabar"]).gderiv("theta")
        if blade == "thetabar":
            return self.drop(["theta"]).gderiv("thetabar")
        if blade == "thetabar theta":
            return self.berezin(["theta", "thetabar"])
        raise ValueError(f"unknown theta blade {blade!r}")

    def time_derivative(self) -> SuperspaceExpression:
        """Total d/dt: raises jet order of fields and ghosts, eps -> eps'.

        theta and thetabar are constants.
        """
        reg = self.registry
        out = SuperspaceExpression(reg)
        for (m, o, e), c in self.terms.items():
            grass = Multivector(reg, {(o, e): c})
            # commuting factors
            for s, k in m:
                d = dict(m)
                if k == 1:
                    del d[s]
                else:
                    d[s] = k - 1
                ds = (s[0], s[1], s[2] + 1)
                d[ds] = d.get(ds, 0) + 1
                out = out + SuperspaceExpression.from_multivector(grass * k, tuple(sorted(d.items())))
            # Grassmann factors, each replaced in place by its derivative
            labels = reg.labels(o)
            evens = reg.labels(e)
            for i, lab in enumerate(labels):
                dl = _dot_label(reg, lab)
                if dl is None:
                    continue
                mv = Multivector.blade(reg, evens + labels[:i] + [dl] + labels[i + 1 :], c)
                out = out + SuperspaceExpression.from_multivector(mv, m)
            for lab in evens:
                dl = _dot_label(reg, lab)
                if dl is None:
                    continue
                mv = Multivector.blade(reg, [dl] + labels, c)
                out = out + SuperspaceExpression.from_multivector(mv, m)
        return out

    def substitute(
        self,
        syms: Mapping[Sym, SuperspaceExpression] | None = None,
        gens: Mapping[str, SuperspaceExpression] | None = None,
    ) -> SuperspaceExpression:
        """Replace commuting symbols and generators by expressions.

        Generator images must have the parity of the generator they replace.
        """
        syms = syms or {}
        gens = gens or {}
        reg = self.registry
        out = SuperspaceExpression(reg)
        cache: dict[tuple[Sym, int], SuperspaceExpression] = {}
        for (m, o, e), c in self.terms.items():
            term = SuperspaceExpression(reg, {((), 0, 0): c})
            rest: list[tuple[Sym, int]] = []
            for s, k in m:
                if s in syms:
                    if (s, k) not in cache:
                        cache[(s, k)] = syms[s] ** k
                    term = term * cache[(s, k)]
                else:
                    rest.append((s, k))
            term = term * SuperspaceExpression(reg, {(tuple(rest), 0, 0): 1})
            for lab in reg.labels(e) + reg.labels(o):
                img = gens.get(lab)
                term = term * (img if img is not None else SuperspaceExpression.gen(reg, lab))
            out = out + term
        return out

    # ---- rendering ----
    def sorted_terms(self) -> list[tuple[TermKey, Scalar]]:
        def key(kv):
            (m, o, e), _ = kv
            return (bin(o | e).count("1"), e, o, sum(k for _, k in m), m)

        return sorted(self.terms.items(), key=key)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (m, o, e), c in self.sorted_terms():
            factors = [sym_label(s) + (f"^{k}" if k > 1 else "") for s, k in m]
            factors += self.registry.labels(e) + self.registry.labels(o)
            parts.append(_term_str(c, factors))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"SuperspaceExpression({self})"


def _dot_label(reg: GeneratorRegistry, label: str) -> str | None:
    g = reg[label]
    if g.kind in ("theta", "thetabar"):
        return None
    if g.kind == "epsilon":
        return reg.find("epsilon_dot")
    if g.kind == "epsilon_dot":
        raise UnsupportedInputError("second time derivative of eps is not modelled")
    try:
        return reg.find(g.kind, g.index, g.order + 1)
    except ConfigurationError:
        raise UnsupportedInputError(f"time derivative of {label!r} exceeds the registry jet order") from None


class Fields:
    """Shorthand constructors for the jet fields over one registry."""

    def __init__(self, n: int, registry: GeneratorRegistry | None = None):
        self.n = n
        self.registry = registry or superspace_registry(n)

    def phi(self, a: int, order: int = 0) -> SuperspaceExpression:
        return SuperspaceExpression.sym(self.registry, "phi", a, order)

    def lam(self, a: int, order: int = 0) -> SuperspaceExpression:
        return SuperspaceExpression.sym(self.registry, "lam", a, order)

    def c(self, a: int, order: int = 0) -> SuperspaceExpression:
        return SuperspaceExpression.gen(self.registry, self.registry.find("ghost", a, order))

    def cbar(self, a: int, order: int = 0) -> SuperspaceExpression:
        return SuperspaceExpression.gen(self.registry, self.registry.find("antighost", a, order))

    @property
    def theta(self) -> SuperspaceExpression:
        return SuperspaceExpression.gen(self.registry, "theta")

    @property
    def thetabar(self) -> SuperspaceExpression:
        return SuperspaceExpression.gen(self.registry, "thetabar")

    @property
    def eps(self) -> SuperspaceExpression:
        return SuperspaceExpression.gen(self.registry, "eps")

    @property
    def eps_dot(self) -> SuperspaceExpression:
        return SuperspaceExpression.gen(self.registry, "eps'")

    def const(self, c: ScalarLike) -> SuperspaceExpression:
        return SuperspaceExpression.const(self.registry, c)

    def zero(self) -> SuperspaceExpression:
        return SuperspaceExpression(self.registry)

    def poly(self, f: Poly) -> SuperspaceExpression:
        return SuperspaceExpression.from_poly(self.registry, f)


__all__ = ["SuperspaceExpression", "Fields", "Sym", "sym_label"]
