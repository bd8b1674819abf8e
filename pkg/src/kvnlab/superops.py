"""Normal-ordered operator algebra on the extended KvN space.

Operators are polynomials in phi-hat^a, lambda-hat_a, c-hat^a and cbar-hat_a
subject to

    [phi^a, lam_b] = i delta^a_b,     [c^a, cbar_b]_+ = delta^a_b,

with every other pair commuting (or anticommuting, for two ghosts). Each
monomial is stored in the block order phi, c, cbar, lam with indices
ascending inside a block; that normal form is unique, so two operators are
equal iff their term dictionaries are equal.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Iterable, Mapping, NamedTuple

from .errors import ConfigurationError
from .grassmann import _join_terms, _term_str, phase_label
from .model import PhaseSpaceModel
from .poly import Poly
from .report import Report
from .scalar import I, Scalar, ScalarLike


class OperatorMonomial(NamedTuple):
    """Normal-ordered word phi^phi c^c cbar^cbar lam^lam (coefficient kept
    separately in :class:`OperatorSum`). ``c``/``cbar`` are occupation
    bitmasks over the phase-space index."""

    phi: tuple[int, ...]
    c: int
    cbar: int
    lam: tuple[int, ...]

    @property
    def parity(self) -> int:
        return (bin(self.c).count("1") + bin(self.cbar).count("1")) & 1

    def render(self) -> list[str]:
        out = []
        for a, k in enumerate(self.phi):
            if k:
                out.append(phase_label(a) + (f"^{k}" if k > 1 else ""))
        out += [f"c_{phase_label(a)}" for a in range(len(self.phi)) if self.c >> a & 1]
        out += [f"cbar_{phase_label(a)}" for a in range(len(self.phi)) if self.cbar >> a & 1]
        for a, k in enumerate(self.lam):
            if k:
                out.append(f"lam_{phase_label(a)}" + (f"^{k}" if k > 1 else ""))
        return out


class OperatorSum:
    """Linear combination of normal-ordered monomials over ``dim`` indices."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[OperatorMonomial, ScalarLike] | None = None):
        self.dim = dim
        clean: dict[OperatorMonomial, Scalar] = {}
        for m, c in (terms or {}).items():
            c = Scalar.coerce(c)
            if c:
                clean[m] = c
        self.terms = clean

    # ---- constructors ----
    @classmethod
    def scalar(cls, dim: int, c: ScalarLike = 1) -> OperatorSum:
        z = (0,) * dim
        return cls(dim, {OperatorMonomial(z, 0, 0, z): c})

    @classmethod
    def identity(cls, dim: int) -> OperatorSum:
        return cls.scalar(dim, 1)

    @classmethod
    def phi(cls, dim: int, a: int, power: int = 1) -> OperatorSum:
        z = (0,) * dim
        e = tuple(power if i == a else 0 for i in range(dim))
        return cls(dim, {OperatorMonomial(e, 0, 0, z): 1})

    @classmethod
    def lam(cls, dim: int, a: int, power: int = 1) -> OperatorSum:
        z = (0,) * dim
        e = tuple(power if i == a else 0 for i in range(dim))
        return cls(dim, {OperatorMonomial(z, 0, 0, e): 1})

    @classmethod
    def c(cls, dim: int, a: int) -> OperatorSum:
        z = (0,) * dim
        return cls(dim, {OperatorMonomial(z, 1 << a, 0, z): 1})

    @classmethod
    def cbar(cls, dim: int, a: int) -> OperatorSum:
        z = (0,) * dim
        return cls(dim, {OperatorMonomial(z, 0, 1 << a, z): 1})

    @classmethod
    def mult(cls, f: Poly) -> OperatorSum:
        """Multiplication operator f(phi-hat)."""
        z = (0,) * f.nvars
        return cls(f.nvars, {OperatorMonomial(e, 0, 0, z): c for e, c in f.terms.items()})

    # ---- queries ----
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def monomials(self) -> list[tuple[OperatorMonomial, Scalar]]:
        """Canonical term list: like terms merged, zeros dropped, sorted."""
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))

    def graded_parts(self) -> tuple[OperatorSum, OperatorSum]:
        even = {m: c for m, c in self.terms.items() if not m.parity}
        odd = {m: c for m, c in self.terms.items() if m.parity}
        return OperatorSum(self.dim, even), OperatorSum(self.dim, odd)

    def parity(self) -> int | None:
        ps = {m.parity for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def ghost_sector(self, c_count: int, cbar_count: int) -> OperatorSum:
        return OperatorSum(
            self.dim,
            {
                m: v
                for m, v in self.terms.items()
                if bin(m.c).count("1") == c_count and bin(m.cbar).count("1") == cbar_count
            },
        )

    # ---- arithmetic ----
    def _lift(self, other) -> OperatorSum:
        if isinstance(other, OperatorSum):
            if other.dim != self.dim:
                raise ConfigurationError("operators over different phase spaces")
            return other
        return OperatorSum.scalar(self.dim, other)

    def __add__(self, other) -> OperatorSum:
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Scalar(0)) + c
        return OperatorSum(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> OperatorSum:
        return OperatorSum(self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> OperatorSum:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> OperatorSum:
        return self._lift(other) - self

    def __mul__(self, other) -> OperatorSum:
        if isinstance(other, OperatorSum):
            return compose(self, other)
        c = Scalar.coerce(other)
        return OperatorSum(self.dim, {m: v * c for m, v in self.terms.items()})

    def __rmul__(self, other) -> OperatorSum:
        c = Scalar.coerce(other)
        return OperatorSum(self.dim, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, k: int) -> OperatorSum:
        out = OperatorSum.identity(self.dim)
        for _ in range(k):
            out = compose(out, self)
        return out

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except (TypeError, ConfigurationError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return _join_terms([_term_str(c, m.render()) for m, c in self.monomials()])

    def __repr__(self) -> str:
        return f"OperatorSum({self})"


def _sort_key(m: OperatorMonomial):
    deg = sum(m.phi) + sum(m.lam) + bin(m.c).count("1") + bin(m.cbar).count("1")
    return (deg, tuple(-k for k in m.lam), -m.cbar, -m.c, tuple(-k for k in m.phi))


# ---------------------------------------------------------------------------
# reordering kernels


@lru_cache(maxsize=None)
def _fermi_normal(word: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int, int], ...]:
    """Normal-order a word of ghost letters ``(block, index)`` (block 0 = c,
    block 1 = cbar). Returns ``((c_mask, cbar_mask, coeff), ...)``."""
    for i in range(len(word) - 1):
        x, y = word[i], word[i + 1]
        if x < y:
            continue
        if x == y:
            return ()
        swapped = word[:i] + (y, x) + word[i + 2 :]
        out: dict[tuple[int, int], int] = {}
        for cm, bm, k in _fermi_normal(swapped):
            out[(cm, bm)] = out.get((cm, bm), 0) - k
        if x[0] == 1 and y[0] == 0 and x[1] == y[1]:
            # cbar_a c^a = 1 - c^a cbar_a
            for cm, bm, k in _fermi_normal(word[:i] + word[i + 2 :]):
                out[(cm, bm)] = out.get((cm, bm), 0) + k
        return tuple((cm, bm, k) for (cm, bm), k in out.items() if k)
    cm = bm = 0
    for block, a in word:
        if block == 0:
            cm |= 1 << a
        else:
            bm |= 1 << a
    return ((cm, bm, 1),)


def _letters(mask: int, block: int) -> tuple[tuple[int, int], ...]:
    out = []
    a = 0
    while mask:
        if mask & 1:
            out.append((block, a))
        mask >>= 1
        a += 1
    return tuple(out)


@lru_cache(maxsize=None)
def _lam_phi_single(m: int, k: int) -> tuple[tuple[int, Scalar], ...]:
    """lam^m phi^k = sum_j C(m,j) k!/(k-j)! (-i)^j phi^(k-j) lam^(m-j);
    returns ((j, coefficient), ...)."""
    return tuple(
        (j, Scalar(comb(m, j) * factorial(k) // factorial(k - j)) * (-I) ** j)
        for j in range(min(m, k) + 1)
    )


@lru_cache(maxsize=None)
def _lam_phi(lam: tuple[int, ...], phi: tuple[int, ...]):
    """Reorder lam^lam phi^phi into sum of (phi', lam', coeff), normal order."""
    per_index = [_lam_phi_single(m, k) for m, k in zip(lam, phi)]
    out = []
    for choice in product(*per_index):
        c = Scalar(1)
        for _, v in choice:
            c = c * v
        js = [j for j, _ in choice]
        out.append(
            (
                tuple(k - j for k, j in zip(phi, js)),
                tuple(m - j for m, j in zip(lam, js)),
                c,
            )
        )
    return tuple(out)


@lru_cache(maxsize=None)
def _ghost_product(c1: int, b1: int, c2: int, b2: int):
    word = _letters(c1, 0) + _letters(b1, 1) + _letters(c2, 0) + _letters(b2, 1)
    return _fermi_normal(word)


def compose(A: OperatorSum, B: OperatorSum) -> OperatorSum:
    """Operator product A B, re-normal-ordered."""
    A._lift(B)
    out: dict[OperatorMonomial, Scalar] = {}
    for ma, ca in A.terms.items():
        for mb, cb in B.terms.items():
            ghosts = _ghost_product(ma.c, ma.cbar, mb.c, mb.cbar)
            if not ghosts:
                continue
            bos = _lam_phi(ma.lam, mb.phi)
            base = ca * cb
            for phi_mid, lam_mid, cbos in bos:
                phi = tuple(x + y for x, y in zip(ma.phi, phi_mid))
                lam = tuple(x + y for x, y in zip(lam_mid, mb.lam))
                for cm, bm, k in ghosts:
                    key = OperatorMonomial(phi, cm, bm, lam)
                    out[key] = out.get(key, Scalar(0)) + base * cbos * k
    return OperatorSum(A.dim, out)


def commutator(A: OperatorSum, B: OperatorSum) -> OperatorSum:
    return compose(A, B) - compose(B, A)


def anticommutator(A: OperatorSum, B: OperatorSum) -> OperatorSum:
    return compose(A, B) + compose(B, A)


def bracket(A: OperatorSum, B: OperatorSum, graded: bool = False) -> OperatorSum:
    """Commutator, or with ``graded=True`` the graded bracket: the
    anticommutator between odd parts and the commutator otherwise."""
    if not graded:
        return commutator(A, B)
    a0, a1 = A.graded_parts()
    b0, b1 = B.graded_parts()
    return commutator(a0, B) + commutator(a1, b0) + anticommutator(a1, b1)


# ---------------------------------------------------------------------------
# builders


def _omega_sum(model: PhaseSpaceModel, left, right) -> OperatorSum:
    """sum_{a,b} omega^{ab} left(a) * right(b), composed in that order."""
    d = model.dim
    out = OperatorSum(d)
    for a in range(d):
        for b in range(d):
            w = model.omega_upper[a][b]
            if w:
                out = out + compose(left(a), right(b)) * w
    return out


def liouvillian(model: PhaseSpaceModel) -> OperatorSum:
    """lam_a omega^{ab} d_b H, the ghost-free part of the Lie derivative."""
    d = model.dim
    return _omega_sum(model, lambda a: OperatorSum.lam(d, a), lambda b: OperatorSum.mult(model.H.diff(b)))


def lie_derivative(model: PhaseSpaceModel) -> OperatorSum:
    """lam_a omega^{ab} d_b H + i cbar_a omega^{ab} d_b d_d H c^d."""
    d = model.dim
    H = model.H
    ghost = OperatorSum(d)
    for a in range(d):
        for b in range(d):
            w = model.omega_upper[a][b]
            if not w:
                continue
            for e in range(d):
                hess = H.diff(b).diff(e)
                if hess.is_zero():
                    continue
                term = compose(
                    compose(OperatorSum.cbar(d, a), OperatorSum.mult(hess)), OperatorSum.c(d, e)
                )
                ghost = ghost + term * (I * w)
    return liouvillian(model) + ghost


class Charges(NamedTuple):
    Q_BRS: OperatorSum
    Qbar_BRS: OperatorSum
    Q_H: OperatorSum
    Qbar_H: OperatorSum


def charges(model: PhaseSpaceModel) -> Charges:
    d = model.dim
    H = model.H
    q_brs = OperatorSum(d)
    for a in range(d):
        q_brs = q_brs + compose(OperatorSum.c(d, a), OperatorSum.lam(d, a)) * I
    qbar_brs = _omega_sum(model, lambda a: OperatorSum.cbar(d, a), lambda b: OperatorSum.lam(d, b)) * I
    dh = OperatorSum(d)
    for a in range(d):
        dh = dh + compose(OperatorSum.c(d, a), OperatorSum.mult(H.diff(a)))
    bar_dh = _omega_sum(model, lambda a: OperatorSum.cbar(d, a), lambda b: OperatorSum.mult(H.diff(b)))
    return Charges(q_brs, qbar_brs, q_brs - dh, qbar_brs + bar_dh)


def verify_charge_algebra(model: PhaseSpaceModel) -> Report:
    """Exact residuals of the charge algebra; every one must vanish."""
    Q = charges(model)
    Ht = lie_derivative(model)
    residuals: list[tuple[str, OperatorSum]] = [
        ("susy_closure [Q_H,Qbar_H]_+ - 2i*Htilde", anticommutator(Q.Q_H, Q.Qbar_H) - Ht * (2 * I)),
        ("nilpotent (Q_BRS)^2", compose(Q.Q_BRS, Q.Q_BRS)),
        ("nilpotent (Qbar_BRS)^2", compose(Q.Qbar_BRS, Q.Qbar_BRS)),
        ("nilpotent (Q_H)^2", compose(Q.Q_H, Q.Q_H)),
        ("nilpotent (Qbar_H)^2", compose(Q.Qbar_H, Q.Qbar_H)),
        ("brs_antibrs [Q_BRS,Qbar_BRS]_+", anticommutator(Q.Q_BRS, Q.Qbar_BRS)),
    ]
    for name, X in zip(Q._fields, Q):
        residuals.append((f"symmetry [{name},Htilde]", commutator(X, Ht)))
    residuals.append(
        ("liouvillian_sector Htilde|ghost-free - Liouvillian", Ht.ghost_sector(0, 0) - liouvillian(model))
    )
    report = Report()
    for name, r in residuals:
        report.add(name, r.is_zero(), str(r), {"terms": len(r.terms)})
    report.details = {"Htilde": str(Ht)} | {name: str(X) for name, X in zip(Q._fields, Q)}
    return report


# ---------------------------------------------------------------------------
# adjoint

DEFAULT_ADJOINT_RULES: dict[str, str] = {"phi": "phi", "lam": "lam", "c": "cbar", "cbar": "c"}
_LETTER_KINDS = ("phi", "lam", "c", "cbar")


def _letter(dim: int, kind: str, a: int) -> OperatorSum:
    return {"phi": OperatorSum.phi, "lam": OperatorSum.lam, "c": OperatorSum.c, "cbar": OperatorSum.cbar}[
        kind
    ](dim, a)


def _word(m: OperatorMonomial) -> list[tuple[str, int]]:
    word = []
    for a, k in enumerate(m.phi):
        word += [("phi", a)] * k
    word += [("c", a) for a in range(len(m.phi)) if m.c >> a & 1]
    word += [("cbar", a) for a in range(len(m.phi)) if m.cbar >> a & 1]
    for a, k in enumerate(m.lam):
        word += [("lam", a)] * k
    return word


def adjoint(A: OperatorSum, rules: Mapping[str, str] | None = None) -> OperatorSum:
    """Antilinear anti-automorphism: (z A B)^dagger = conj(z) B^dagger A^dagger.

    ``rules`` maps each letter kind (phi, lam, c, cbar) to the kind of its
    adjoint at the same index; no extra grading signs are introduced.
    """
    rules = dict(DEFAULT_ADJOINT_RULES if rules is None else rules)
    missing = [k for k in _LETTER_KINDS if k not in rules]
    if missing:
        raise ConfigurationError(f"adjoint rule table missing {missing}")
    bad = [v for v in rules.values() if v not in _LETTER_KINDS]
    if bad:
        raise ConfigurationError(f"adjoint rule targets unknown kinds {bad}")
    d = A.dim
    out = OperatorSum(d)
    for m, c in A.terms.items():
        term = OperatorSum.scalar(d, c.conjugate())
        for kind, a in reversed(_word(m)):
            term = compose(term, _letter(d, rules[kind], a))
        out = out + term
    return out


def is_hermitian(A: OperatorSum, rules: Mapping[str, str] | None = None) -> bool:
    return (adjoint(A, rules) - A).is_zero()


def sum_ops(ops: Iterable[OperatorSum], dim: int) -> OperatorSum:
    out = OperatorSum(dim)
    for o in ops:
        out = out + o
    return out
