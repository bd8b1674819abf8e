"""Finite Grassmann algebra with first-order nilpotent even parameters.

Blades are bitmasks over registry positions. A term key is the pair
``(odd_mask, even_mask)``: the odd mask holds anticommuting generators
(ghosts, antighosts, theta, thetabar), the even mask holds nilpotent even
parameters (epsilon, its time derivative). Any product carrying two
epsilon-class factors is dropped, so transformations are first order exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ConfigurationError
from .scalar import Scalar, ScalarLike

ODD_KINDS = frozenset({"ghost", "antighost", "theta", "thetabar"})
EVEN_KINDS = frozenset({"epsilon", "epsilon_dot"})
KINDS = ODD_KINDS | EVEN_KINDS

Key = tuple[int, int]


def phase_label(a: int) -> str:
    """0-based phase-space index -> ``q_k``/``p_k`` (even a are q's)."""
    return f"{'qp'[a % 2]}_{a // 2 + 1}"


@dataclass(frozen=True)
class Generator:
    label: str
    kind: str
    index: int | None = None
    order: int = 0

    @property
    def odd(self) -> bool:
        return self.kind in ODD_KINDS


@dataclass(frozen=True)
class GeneratorRegistry:
    """Ordered, immutable list of generators.

    ``n`` is the number of degrees of freedom; ghost/antighost indices are
    0-based phase-space indices in ``range(2 * n)``.
    """

    n: int
    entries: tuple[Generator, ...]
    _pos: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        pos: dict[str, int] = {}
        for i, g in enumerate(self.entries):
            if g.kind not in KINDS:
                raise ConfigurationError(f"unknown generator kind {g.kind!r}")
            if g.label in pos:
                raise ConfigurationError(f"duplicate generator label {g.label!r}")
            if g.kind in ("ghost", "antighost"):
                if g.index is None or not 0 <= g.index < 2 * self.n:
                    raise ConfigurationError(
                        f"generator {g.label!r}: index {g.index} outside [0, {2 * self.n})"
                    )
            pos[g.label] = i
        object.__setattr__(self, "_pos", pos)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, label: str) -> bool:
        return label in self._pos

    def position(self, label: str) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise ConfigurationError(f"generator {label!r} not in registry") from None

    def __getitem__(self, label: str) -> Generator:
        return self.entries[self.position(label)]

    def find(self, kind: str, index: int | None = None, order: int = 0) -> str:
        for g in self.entries:
            if g.kind == kind and g.index == index and g.order == order:
                return g.label
        raise ConfigurationError(f"no generator of kind {kind} index {index} order {order}")

    def labels(self, mask: int) -> list[str]:
        return [self.entries[i].label for i in _bits(mask)]


def ghost_label(a: int, order: int = 0) -> str:
    return f"c_{phase_label(a)}" + "'" * order


def antighost_label(a: int, order: int = 0) -> str:
    return f"cbar_{phase_label(a)}" + "'" * order


def superspace_registry(n: int, jet_order: int = 2) -> GeneratorRegistry:
    """Registry used by the superspace layer.

    theta, thetabar, then ghosts and antighosts with time derivatives up to
    ``jet_order`` (the Euler operator needs second jets), then eps, eps'.
    """
    entries = [Generator("theta", "theta"), Generator("thetabar", "thetabar")]
    for k in range(jet_order + 1):
        entries += [Generator(ghost_label(a, k), "ghost", a, k) for a in range(2 * n)]
        entries += [Generator(antighost_label(a, k), "antighost", a, k) for a in range(2 * n)]
    entries += [Generator("eps", "epsilon"), Generator("eps'", "epsilon_dot")]
    return GeneratorRegistry(n, tuple(entries))


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def reorder_sign(a: int, b: int) -> int:
    """Sign of bringing the concatenation of blades ``a`` then ``b`` to
    canonical order; assumes ``a & b == 0``."""
    swaps = 0
    for j in _bits(b):
        swaps += bin(a >> (j + 1)).count("1")
    return -1 if swaps & 1 else 1


class Multivector:
    """Element of the Grassmann algebra with exact Scalar coefficients."""

    __slots__ = ("registry", "terms")

    def __init__(self, registry: GeneratorRegistry, terms: Mapping[Key, ScalarLike] | None = None):
        self.registry = registry
        clean: dict[Key, Scalar] = {}
        for key, c in (terms or {}).items():
            c = Scalar.coerce(c)
            if c:
                if bin(key[1]).count("1") > 1:
                    continue
                clean[key] = c
        self.terms = clean

    # ---- constructors ----
    @classmethod
    def scalar(cls, registry: GeneratorRegistry, c: ScalarLike = 1) -> Multivector:
        return cls(registry, {(0, 0): c})

    @classmethod
    def gen(cls, registry: GeneratorRegistry, label: str, c: ScalarLike = 1) -> Multivector:
        i = registry.position(label)
        key = (1 << i, 0) if registry.entries[i].odd else (0, 1 << i)
        return cls(registry, {key: c})

    @classmethod
    def blade(cls, registry: GeneratorRegistry, labels: Iterable[str], c: ScalarLike = 1) -> Multivector:
        """Ordered product of the named generators (order as given)."""
        out = cls.scalar(registry, c)
        for lab in labels:
            out = gmul(out, cls.gen(registry, lab))
        return out

    # ---- queries ----
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, None for mixed (0 for zero)."""
        ps = {bin(k[0]).count("1") & 1 for k in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def graded_parts(self) -> tuple[Multivector, Multivector]:
        even = {k: c for k, c in self.terms.items() if not bin(k[0]).count("1") & 1}
        odd = {k: c for k, c in self.terms.items() if bin(k[0]).count("1") & 1}
        return Multivector(self.registry, even), Multivector(self.registry, odd)

    def scalar_part(self) -> Scalar:
        return self.terms.get((0, 0), Scalar(0))

    def coefficient(self, labels: Iterable[str]) -> Scalar:
        """Coefficient of the canonical blade made of ``labels`` (any order
        given, canonical order assumed for the sign)."""
        odd = even = 0
        for lab in labels:
            i = self.registry.position(lab)
            if self.registry.entries[i].odd:
                odd |= 1 << i
            else:
                even |= 1 << i
        return self.terms.get((odd, even), Scalar(0))

    def uses(self, label: str) -> bool:
        i = self.registry.position(label)
        return any((k[0] | k[1]) >> i & 1 for k in self.terms)

    # ---- arithmetic ----
    def _check(self, other: Multivector) -> None:
        if other.registry is not self.registry and other.registry != self.registry:
            raise ConfigurationError("multivectors over different registries")

    def __add__(self, other) -> Multivector:
        if not isinstance(other, Multivector):
            other = Multivector.scalar(self.registry, other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Scalar(0)) + c
        return Multivector(self.registry, out)

    __radd__ = __add__

    def __neg__(self) -> Multivector:
        return Multivector(self.registry, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> Multivector:
        if not isinstance(other, Multivector):
            other = Multivector.scalar(self.registry, other)
        return self + (-other)

    def __rsub__(self, other) -> Multivector:
        return (-self) + other

    def __mul__(self, other) -> Multivector:
        if isinstance(other, Multivector):
            return gmul(self, other)
        c = Scalar.coerce(other)
        return Multivector(self.registry, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other) -> Multivector:
        c = Scalar.coerce(other)
        return Multivector(self.registry, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, Multivector):
            return self.registry == other.registry and self.terms == other.terms
        try:
            return self.terms == Multivector.scalar(self.registry, other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self) -> list[tuple[Key, Scalar]]:
        return sorted(
            self.terms.items(),
            key=lambda kv: (bin(kv[0][0] | kv[0][1]).count("1"), kv[0][1], kv[0][0]),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (odd, even), c in self.sorted_terms():
            labels = self.registry.labels(even) + self.registry.labels(odd)
            parts.append(_term_str(c, labels))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"Multivector({self})"


def _term_str(c: Scalar, factors: list[str]) -> str:
    if not factors:
        return str(c)
    body = "*".join(factors)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}*{body}"


def _join_terms(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def gmul(x: Multivector, y: Multivector) -> Multivector:
    """Graded product with reordering signs and epsilon truncation."""
    x._check(y)
    out: dict[Key, Scalar] = {}
    for (xo, xe), xc in x.terms.items():
        for (yo, ye), yc in y.terms.items():
            if xo & yo or (xe and ye):
                continue
            key = (xo | yo, xe | ye)
            c = xc * yc
            if reorder_sign(xo, yo) < 0:
                c = -c
            out[key] = out.get(key, Scalar(0)) + c
    return Multivector(x.registry, out)


def gderiv(x: Multivector, label: str) -> Multivector:
    """Left derivative with respect to an odd generator."""
    i = x.registry.position(label)
    if not x.registry.entries[i].odd:
        raise ConfigurationError(f"derivative with respect to even parameter {label!r}")
    bit = 1 << i
    out: dict[Key, Scalar] = {}
    for (odd, even), c in x.terms.items():
        if odd & bit:
            before = bin(odd & (bit - 1)).count("1")
            out[(odd ^ bit, even)] = -c if before & 1 else c
    return Multivector(x.registry, out)


def berezin(x: Multivector, measure: Iterable[str]) -> Multivector:
    """Iterated Berezin integral; the rightmost measure factor acts first.

    With this orientation ``berezin(theta, [theta]) == 1`` and
    ``berezin(thetabar*theta, [theta, thetabar]) == 1``.
    """
    measure = list(measure)
    if len(set(measure)) != len(measure):
        raise ConfigurationError(f"repeated generator in Berezin measure {measure}")
    for lab in measure:
        if not x.registry[lab].odd:
            raise ConfigurationError(f"Berezin measure over even parameter {lab!r}")
    for lab in reversed(measure):
        x = gderiv(x, lab)
    return x
