"""Classical root systems in epsilon coordinates, their Weyl groups, and
classification of dominant points by chamber face.

Every Weyl group element of a classical root system is a signed permutation
of the ambient coordinates, so elements are stored as ``(perm, signs)`` with
``w(e_i) = signs[i] * e_{perm[i]}``. Direct sums of simple root systems are
supported by concatenating coordinates; their label joins the factors with
``x`` (``"A1xA1"``).
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import ConfigurationError, DomainError, IntegrityError, ResourceError

DEFAULT_WEYL_CAP = 10**5

_LABEL_RE = re.compile(r"^[ABCD][0-9]+$")

def _component_ambient(family: str, rank: int) -> int:
    return rank + 1 if family == "A" else rank


def _component_positive_roots(family: str, rank: int) -> list[tuple[int, ...]]:
    m = _component_ambient(family, rank)

    def e(*pairs):
        v = [0] * m
        for i, c in pairs:
            v[i] += c
        return tuple(v)

    roots = []
    for i in range(m):
        for j in range(i + 1, m):
            roots.append(e((i, 1), (j, -1)))
            if family != "A":
                roots.append(e((i, 1), (j, 1)))
    if family == "B":
        roots.extend(e((i, 1)) for i in range(m))
    elif family == "C":
        roots.extend(e((i, 2)) for i in range(m))
    return roots


def _component_simple_roots(family: str, rank: int) -> list[tuple[int, ...]]:
    m = _component_ambient(family, rank)
    simple = []
    for i in range(m - 1):
        v = [0] * m
        v[i], v[i + 1] = 1, -1
        simple.append(tuple(v))
    last = [0] * m
    if family == "B":
        last[m - 1] = 1
    elif family == "C":
        last[m - 1] = 2
    elif family == "D":
        last[m - 2], last[m - 1] = 1, 1
    if family != "A":
        simple.append(tuple(last))
    return simple


def _component_weyl_order(family: str, rank: int) -> int:
    if family == "A":
        return math.factorial(rank + 1)
    if family in "BC":
        return 2**rank * math.factorial(rank)
    return 2 ** (rank - 1) * math.factorial(rank)


def _embed(v: Sequence[int], offset: int, total: int) -> tuple[int, ...]:
    out = [0] * total
    out[offset:offset + len(v)] = v
    return tuple(out)


def pairing(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class RootSystem:
    """A classical root datum, possibly a direct sum of simple factors."""

    components: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.components:
            raise ConfigurationError("root system needs at least one component")
        for family, rank in self.components:
            if family not in ("A", "B", "C", "D"):
                raise ConfigurationError(
                    f"unsupported root system family {family!r}; expected one of A, B, C, D")
            if not isinstance(rank, int) or rank < 1:
                raise ConfigurationError(f"rank must be a positive integer, got {rank!r}")
            if family == "D" and rank < 3:
                raise ConfigurationError(f"D{rank} is not supported; type D needs rank >= 3")

    @property
    def label(self) -> str:
        return "x".join(f"{f}{r}" for f, r in self.components)

    @property
    def family(self) -> str:
        if len(self.components) == 1:
            return self.components[0][0]
        return self.label

    @property
    def rank(self) -> int:
        return sum(r for _, r in self.components)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for f, r in self.components:
            out.append(acc)
            acc += _component_ambient(f, r)
        return tuple(out)

    @property
    def ambient_dim(self) -> int:
        return sum(_component_ambient(f, r) for f, r in self.components)

    @cached_property
    def simple_roots(self) -> tuple[tuple[int, ...], ...]:
        n = self.ambient_dim
        return tuple(
            _embed(a, off, n)
            for (f, r), off in zip(self.components, self.offsets)
            for a in _component_simple_roots(f, r)
        )

    @cached_property
    def positive_roots(self) -> tuple[tuple[int, ...], ...]:
        n = self.ambient_dim
        return tuple(
            _embed(a, off, n)
            for (f, r), off in zip(self.components, self.offsets)
            for a in _component_positive_roots(f, r)
        )

    @cached_property
    def _positive_set(self) -> frozenset:
        return frozenset(self.positive_roots)

    @property
    def roots(self) -> tuple[tuple[int, ...], ...]:
        return self.positive_roots + tuple(tuple(-c for c in a) for a in self.positive_roots)

    @property
    def weyl_order(self) -> int:
        return math.prod(_component_weyl_order(f, r) for f, r in self.components)

    def is_positive(self, root: Sequence) -> bool:
        return tuple(root) in self._positive_set

    def type_a_blocks(self) -> list[tuple[int, int]]:
        """(offset, ambient size) of every type-A factor; these carry a sum-zero constraint."""
        return [
            (off, r + 1)
            for (f, r), off in zip(self.components, self.offsets)
            if f == "A"
        ]

    def component_slices(self) -> list[slice]:
        return [
            slice(off, off + _component_ambient(f, r))
            for (f, r), off in zip(self.components, self.offsets)
        ]

    def simple_reflection(self, i: int) -> "WeylElement":
        return reflection(self.simple_roots[i])

    def __str__(self):
        return self.label


def direct_sum(*systems: RootSystem) -> RootSystem:
    return RootSystem(tuple(c for s in systems for c in s.components))


def build_root_system(family: str, rank: int) -> RootSystem:
    """Standard epsilon-coordinate realization of A_r, B_r, C_r or D_r."""
    return RootSystem(((family, rank),))


def parse_root_system(label: str) -> RootSystem:
    """Parse ``"A3"`` or a direct sum such as ``"A1xA1xA1"``."""
    parts = label.strip().split("x")
    comps = []
    for part in parts:
        if not _LABEL_RE.match(part):
            raise ConfigurationError(
                f"cannot parse root system label {label!r}: component {part!r} "
                "does not match [ABCD]<rank>")
        comps.append((part[0], int(part[1:])))
    return RootSystem(tuple(comps))


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Parse a comma-separated list of exact rationals (``"3/2,-1,-1/2"``)."""
    cleaned = text.replace("−", "-").replace(" ", "")
    if not cleaned:
        raise ConfigurationError("empty vector")
    try:
        return tuple(Fraction(tok) for tok in cleaned.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"cannot parse rational vector {text!r}: {exc}") from None


@dataclass(frozen=True)
class WeylElement:
    """Signed permutation ``w(e_i) = signs[i] * e_{perm[i]}``."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]
    sign: int = 1

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        n = len(self.perm)
        rows = [[0] * n for _ in range(n)]
        for i, (j, s) in enumerate(zip(self.perm, self.signs)):
            rows[j][i] = s
        return tuple(tuple(r) for r in rows)

    def key(self) -> tuple:
        return (self.perm, self.signs)

    def compose(self, other: "WeylElement") -> "WeylElement":
        """``self * other``: apply ``other`` first."""
        perm = tuple(self.perm[j] for j in other.perm)
        signs = tuple(other.signs[i] * self.signs[other.perm[i]] for i in range(len(other.perm)))
        return WeylElement(perm, signs, self.sign * other.sign)

    def inverse(self) -> "WeylElement":
        n = len(self.perm)
        perm = [0] * n
        signs = [0] * n
        for i, (j, s) in enumerate(zip(self.perm, self.signs)):
            perm[j] = i
            signs[j] = s
        return WeylElement(tuple(perm), tuple(signs), self.sign)

    def act(self, v: Sequence) -> tuple:
        out = [0] * len(v)
        for i, (j, s) in enumerate(zip(self.perm, self.signs)):
            out[j] = s * v[i]
        return tuple(out)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and all(s == 1 for s in self.signs)


def reflection(alpha: Sequence[int]) -> WeylElement:
    """Reflection in the hyperplane orthogonal to ``alpha`` as a signed permutation."""
    n = len(alpha)
    norm = pairing(alpha, alpha)
    perm, signs = [], []
    for i in range(n):
        coeff = Fraction(2 * alpha[i], norm)
        image = [-coeff * a for a in alpha]
        image[i] += 1
        nz = [(j, c) for j, c in enumerate(image) if c != 0]
        if len(nz) != 1 or abs(nz[0][1]) != 1:
            raise IntegrityError(f"reflection in {alpha} is not a signed permutation")
        perm.append(nz[0][0])
        signs.append(int(nz[0][1]))
    return WeylElement(tuple(perm), tuple(signs), -1)


def inversion_sign(rs: RootSystem, w: WeylElement) -> int:
    """(-1)^(number of positive roots sent to negative roots)."""
    flips = sum(1 for a in rs.positive_roots if not rs.is_positive(w.act(a)))
    return -1 if flips % 2 else 1


def _closure(gens: Sequence[WeylElement], identity: WeylElement, cap: int) -> list[WeylElement]:
    seen = {identity.key(): identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = g.compose(s)
            if h.key() not in seen:
                seen[h.key()] = h
                if len(seen) > cap:
                    raise ResourceError(f"group closure exceeded cap {cap}")
                queue.append(h)
    return list(seen.values())


def _identity(n: int) -> WeylElement:
    return WeylElement(tuple(range(n)), (1,) * n, 1)


@lru_cache(maxsize=64)
def _enumerate_cached(rs: RootSystem, cap: int) -> tuple[WeylElement, ...]:
    gens = [rs.simple_reflection(i) for i in range(len(rs.simple_roots))]
    elements = _closure(gens, _identity(rs.ambient_dim), cap)
    if len(elements) != rs.weyl_order:
        raise IntegrityError(
            f"enumerated {len(elements)} Weyl elements for {rs.label}, expected {rs.weyl_order}")
    return tuple(elements)


def enumerate_weyl(rs: RootSystem, cap: int = DEFAULT_WEYL_CAP) -> tuple[WeylElement, ...]:
    """All elements of the Weyl group, identity first.

    Raises ResourceError when the group order exceeds ``cap``.
    """
    if rs.weyl_order > cap:
        raise ResourceError(
            f"Weyl group of {rs.label} has order {rs.weyl_order}, above the cap {cap}")
    return _enumerate_cached(rs, cap)


def parabolic_subgroup(rs: RootSystem, simples: Iterable[int]) -> tuple[WeylElement, ...]:
    gens = [rs.simple_reflection(i) for i in sorted(simples)]
    return tuple(_closure(gens, _identity(rs.ambient_dim), rs.weyl_order))


@dataclass(frozen=True)
class OrbitPoint:
    """A dominant covector together with the face of the chamber it lies in.

    ``stabilizer_simples`` holds 0-based indices into ``rs.simple_roots``.
    """

    xi: tuple[Fraction, ...]
    stabilizer_simples: tuple[int, ...]
    face_dim: int
    root_system: RootSystem = field(compare=False, repr=False)

    @property
    def is_regular(self) -> bool:
        return not self.stabilizer_simples

    def parabolic_positive_roots(self) -> tuple[tuple[int, ...], ...]:
        return tuple(a for a in self.root_system.positive_roots if pairing(self.xi, a) == 0)

    @property
    def n_fiber(self) -> int:
        """Half the real dimension of the orbit."""
        return len(self.root_system.positive_roots) - len(self.parabolic_positive_roots())

    def parabolic_weyl(self) -> tuple[WeylElement, ...]:
        return parabolic_subgroup(self.root_system, self.stabilizer_simples)

    def to_json(self) -> dict:
        return {
            "group": self.root_system.label,
            "xi": [str(c) for c in self.xi],
            "stabilizer_simples": list(self.stabilizer_simples),
            "face_dim": self.face_dim,
        }


def validate_in_cartan(rs: RootSystem, xi: Sequence) -> tuple[Fraction, ...]:
    xi = tuple(Fraction(c) for c in xi)
    if len(xi) != rs.ambient_dim:
        raise DomainError(
            f"xi has {len(xi)} coordinates but {rs.label} lives in dimension {rs.ambient_dim}")
    for off, size in rs.type_a_blocks():
        if sum(xi[off:off + size]) != 0:
            raise DomainError(
                f"xi coordinates {off + 1}..{off + size} must sum to zero for a type A factor")
    return xi


def classify_orbit(rs: RootSystem, xi: Sequence) -> OrbitPoint:
    """Locate a dominant ``xi`` on the closed Weyl chamber."""
    xi = validate_in_cartan(rs, xi)
    for sl in rs.component_slices():
        if all(c == 0 for c in xi[sl]):
            raise DomainError(
                "xi vanishes on a simple factor; the orbit action would not have finite kernel"
                if len(rs.components) > 1 else "xi = 0 gives a one-point orbit")
    pairings = [pairing(xi, a) for a in rs.simple_roots]
    bad = [i for i, p in enumerate(pairings) if p < 0]
    if bad:
        raise DomainError(
            f"xi is not dominant: pairs negatively with simple roots {bad}; "
            "apply a Weyl group element to move it into the closed chamber first")
    stab = tuple(i for i, p in enumerate(pairings) if p == 0)
    return OrbitPoint(xi, stab, rs.rank - len(stab), rs)


def dominant_representative(rs: RootSystem, xi: Sequence) -> tuple[Fraction, ...]:
    """The unique dominant point in the Weyl orbit of ``xi``."""
    v = validate_in_cartan(rs, xi)
    while True:
        for i, a in enumerate(rs.simple_roots):
            if pairing(v, a) < 0:
                v = rs.simple_reflection(i).act(v)
                break
        else:
            return v


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def face_representative(rs: RootSystem, stabilizer: Iterable[int]) -> tuple[Fraction, ...]:
    """The dominant point pairing to 0 with the given simple roots and to 1 with the rest."""
    stab = set(stabilizer)
    n = rs.ambient_dim
    rows = [[Fraction(c) for c in a] for a in rs.simple_roots]
    rhs = [Fraction(0 if i in stab else 1) for i in range(len(rows))]
    for off, size in rs.type_a_blocks():
        rows.append([Fraction(1 if off <= j < off + size else 0) for j in range(n)])
        rhs.append(Fraction(0))
    return tuple(_solve(rows, rhs))
