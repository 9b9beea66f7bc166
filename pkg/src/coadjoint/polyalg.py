"""Exact multivariate polynomials over the rationals, Weyl group actions on
them, and graded linear algebra over the invariant ring.

Coefficients are Python ints or :class:`fractions.Fraction`; nothing here
touches floating point. Monomials are exponent tuples and are ordered
graded-lexicographically (total degree first, then lexicographic on the
exponent vector) for display, pivots and division.
"""
from __future__ import annotations

import heapq
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, IntegrityError
from .rootsys import RootSystem, WeylElement, enumerate_weyl

DEFAULT_SEED = 20240917


def glex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


def _fmt_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class RationalPoly:
    """Sparse polynomial in ``nvars`` variables with exact rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        self.nvars = nvars
        self.terms: dict[tuple[int, ...], object] = {}
        self._hash = None
        if terms:
            for e, c in terms.items():
                if c != 0:
                    if len(e) != nvars:
                        raise DomainError(
                            f"exponent {e} has length {len(e)}, expected {nvars}")
                    self.terms[tuple(e)] = c

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "RationalPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "RationalPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "RationalPoly":
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "RationalPoly":
        """The linear form ``sum(coeffs[i] * x_i)``."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls._raw(n, terms)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "RationalPoly":
        return cls(len(exps), {tuple(exps): c})

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "RationalPoly":
        return RationalPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.terms.items(), key=lambda t: glex_key(t[0]), reverse=True)

    def leading_term(self):
        e = max(self.terms, key=glex_key)
        return e, self.terms[e]

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def used_variables(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "RationalPoly"):
        if self.nvars != other.nvars:
            raise DomainError(
                f"polynomials live in different ambient dimensions ({self.nvars} vs {other.nvars})")

    def _coerce(self, other):
        if isinstance(other, RationalPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return RationalPoly._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "RationalPoly":
        if c == 0:
            return RationalPoly.zero(self.nvars)
        return RationalPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, RationalPoly):
            return NotImplemented
        self._check(other)
        terms: dict = {}
        n = self.nvars
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(e1[i] + e2[i] for i in range(n))
                v = terms.get(e, 0) + c1 * c2
                if v:
                    terms[e] = v
                else:
                    del terms[e]
        return RationalPoly._raw(n, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise DomainError(f"polynomial exponent must be a non-negative integer, got {k!r}")
        result = RationalPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / c)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.constant(self.nvars, other)
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and evaluation -----------------------------------------

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise DomainError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, a in zip(point, e):
                if a:
                    term *= x**a
            total += term
        return total

    def derivative(self, i: int) -> "RationalPoly":
        terms = {}
        for e, c in self.terms.items():
            a = e[i]
            if a:
                f = list(e)
                f[i] = a - 1
                terms[tuple(f)] = c * a
        return RationalPoly._raw(self.nvars, terms)

    # -- presentation -----------------------------------------------------

    def __repr__(self):
        return f"RationalPoly({self.nvars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}" for i, a in enumerate(e) if a)
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{_fmt_coeff(mag)}*{mono}"
            else:
                body = _fmt_coeff(mag)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        return {
            "vars": self.nvars,
            "terms": {",".join(map(str, e)): _fmt_coeff(c) for e, c in self.sorted_terms()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalPoly":
        try:
            n = int(data["vars"])
            terms = {}
            for key, val in data["terms"].items():
                e = tuple(int(t) for t in key.split(",")) if key else ()
                if any(a < 0 for a in e):
                    raise ValueError(f"negative exponent in {key!r}")
                c = Fraction(val)
                terms[e] = c.numerator if c.denominator == 1 else c
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed polynomial JSON: {exc}") from None
        return cls(n, terms)


# -- Weyl group actions -----------------------------------------------------


def apply_weyl(w: WeylElement, p: RationalPoly) -> RationalPoly:
    """``(w.p)(x) = p(w^{-1} x)``."""
    n = p.nvars
    if len(w.perm) != n:
        raise DomainError(
            f"Weyl element acts on dimension {len(w.perm)}, polynomial has {n} variables")
    perm, signs = w.perm, w.signs
    flips = [i for i in range(n) if signs[i] < 0]
    terms = {}
    for e, c in p.terms.items():
        f = [0] * n
        for i in range(n):
            f[perm[i]] = e[i]
        if sum(e[i] for i in flips) % 2:
            c = -c
        terms[tuple(f)] = c
    return RationalPoly._raw(n, terms)


def _weyl_sum(rs: RootSystem, p: RationalPoly, signed: bool) -> RationalPoly:
    n = p.nvars
    if n != rs.ambient_dim:
        raise DomainError(
            f"polynomial has {n} variables, {rs.label} acts on {rs.ambient_dim}")
    acc: dict = {}
    items = list(p.terms.items())
    for w in enumerate_weyl(rs):
        perm, signs = w.perm, w.signs
        flips = [i for i in range(n) if signs[i] < 0]
        base = w.sign if signed else 1
        for e, c in items:
            f = [0] * n
            for i in range(n):
                f[perm[i]] = e[i]
            s = base
            if flips and sum(e[i] for i in flips) % 2:
                s = -s
            key = tuple(f)
            acc[key] = acc.get(key, 0) + (c if s > 0 else -c)
    return RationalPoly._raw(n, {e: c for e, c in acc.items() if c != 0})


def antisymmetrize(rs: RootSystem, p: RationalPoly) -> RationalPoly:
    """``sum_w sign(w) * w.p`` over the whole Weyl group."""
    return _weyl_sum(rs, p, signed=True)


def reynolds(rs: RootSystem, p: RationalPoly) -> RationalPoly:
    """Average of ``p`` over the Weyl group; a projector onto invariants."""
    return _weyl_sum(rs, p, signed=False).scale(Fraction(1, rs.weyl_order))


def is_invariant(p: RationalPoly, group: Iterable[WeylElement]) -> bool:
    return all(apply_weyl(w, p) == p for w in group)


# -- division ---------------------------------------------------------------


def _neg_key(e):
    return (-sum(e), tuple(-a for a in e))


def exact_divide(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    """Return ``r`` with ``p == q * r``; IntegrityError if the remainder is nonzero."""
    p._check(q)
    if q.is_zero():
        raise DomainError("division by the zero polynomial")
    if p.is_zero():
        return RationalPoly.zero(p.nvars)
    n = p.nvars
    lq, cq = q.leading_term()
    cq_inv = Fraction(1) / cq if not (isinstance(cq, int) and cq in (1, -1)) else cq
    q_items = list(q.terms.items())
    rem = dict(p.terms)
    heap = [_neg_key(e) for e in rem]
    heapq.heapify(heap)
    index = {_neg_key(e): e for e in rem}
    quot = {}
    while heap:
        k = heapq.heappop(heap)
        e = index.get(k)
        if e is None or e not in rem:
            continue
        c = rem.pop(e)
        del index[k]
        shift = tuple(e[i] - lq[i] for i in range(n))
        if any(a < 0 for a in shift):
            raise IntegrityError(
                f"exact division failed: leading monomial {e} not divisible by {lq}")
        t = c * cq_inv
        if isinstance(t, Fraction) and t.denominator == 1:
            t = t.numerator
        quot[shift] = t
        for f, d in q_items:
            if f == lq:
                continue
            g = tuple(shift[i] + f[i] for i in range(n))
            v = rem.get(g, 0) - t * d
            if v:
                if g not in rem:
                    gk = _neg_key(g)
                    index[gk] = g
                    heapq.heappush(heap, gk)
                rem[g] = v
            elif g in rem:
                del rem[g]
    return RationalPoly._raw(n, quot)


# -- restriction to the Cartan subalgebra -------------------------------------


def cartan_coordinates(rs: RootSystem, point: Sequence) -> tuple:
    """Drop the eliminated coordinate of every type-A block."""
    drop = {off + size - 1 for off, size in rs.type_a_blocks()}
    return tuple(c for i, c in enumerate(point) if i not in drop)


def restrict_to_cartan(rs: RootSystem, p: RationalPoly) -> RationalPoly:
    """Substitute ``x_last := -(sum of the other block coordinates)`` on each type-A block.

    The result has ``rs.rank`` variables; for B, C and D factors nothing changes.
    """
    if p.nvars != rs.ambient_dim:
        raise DomainError(f"polynomial has {p.nvars} variables, expected {rs.ambient_dim}")
    blocks = rs.type_a_blocks()
    if not blocks:
        return p
    n = p.nvars
    keep = [i for i in range(n) if i not in {off + size - 1 for off, size in blocks}]
    result = p
    for off, size in blocks:
        last = off + size - 1
        sub = RationalPoly.linear([-1 if off <= i < last else 0 for i in range(n)])
        powers = [RationalPoly.constant(n, 1)]
        acc: dict = {}
        for e, c in result.terms.items():
            a = e[last]
            while len(powers) <= a:
                powers.append(powers[-1] * sub)
            f = list(e)
            f[last] = 0
            for g, d in powers[a].terms.items():
                key = tuple(x + y for x, y in zip(f, g))
                acc[key] = acc.get(key, 0) + c * d
        acc = {e: c for e, c in acc.items() if c != 0}
        result = RationalPoly._raw(n, acc)
    return RationalPoly._raw(
        len(keep), {tuple(e[i] for i in keep): c for e, c in result.terms.items()})


# -- graded linear algebra ---------------------------------------------------


class Echelon:
    """Reduced row echelon basis of a subspace of polynomials.

    Rows are stored sparsely with their pivot (the graded-lex largest
    monomial) normalized to coefficient 1.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.rows: dict[tuple[int, ...], dict] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, p: RationalPoly) -> dict:
        v = dict(p.terms)
        for piv, row in self.rows.items():
            c = v.get(piv)
            if c:
                for e, d in row.items():
                    x = v.get(e, 0) - c * d
                    if x:
                        v[e] = x
                    else:
                        v.pop(e, None)
        return v

    def contains(self, p: RationalPoly) -> bool:
        return not self.reduce(p)

    def add(self, p: RationalPoly) -> bool:
        """Insert ``p``; returns True if it enlarged the span."""
        v = self.reduce(p)
        if not v:
            return False
        piv = max(v, key=glex_key)
        inv = Fraction(1) / v[piv]
        v = {e: c * inv for e, c in v.items()}
        for row in self.rows.values():
            c = row.get(piv)
            if c:
                for e, d in v.items():
                    x = row.get(e, 0) - c * d
                    if x:
                        row[e] = x
                    else:
                        row.pop(e, None)
        self.rows[piv] = v
        return True

    def basis(self) -> list[RationalPoly]:
        return [
            RationalPoly._raw(self.nvars, dict(self.rows[k]))
            for k in sorted(self.rows, key=glex_key, reverse=True)
        ]


@dataclass
class GradedSubspaceBasis:
    """Per-degree reduced echelon bases of a graded space of homogeneous polynomials."""

    nvars: int
    max_degree: int
    per_degree: dict[int, Echelon] = field(default_factory=dict)

    def __post_init__(self):
        for d in range(self.max_degree + 1):
            self.per_degree.setdefault(d, Echelon(self.nvars))

    def add(self, p: RationalPoly) -> bool:
        if p.is_zero():
            return False
        if p.nvars != self.nvars:
            raise DomainError(f"polynomial has {p.nvars} variables, basis uses {self.nvars}")
        if not p.is_homogeneous():
            raise DomainError(f"graded span needs homogeneous input, got {p}")
        d = p.degree
        if d > self.max_degree:
            raise DomainError(f"polynomial of degree {d} exceeds max_degree {self.max_degree}")
        return self.per_degree[d].add(p)

    def contains(self, p: RationalPoly) -> bool:
        if p.is_zero():
            return True
        if not p.is_homogeneous():
            return all(self.contains(p.homogeneous_part(d)) for d in range(p.degree + 1))
        d = p.degree
        return d <= self.max_degree and self.per_degree[d].contains(p)

    def dim(self, d: int) -> int:
        return len(self.per_degree[d])

    def dims(self) -> list[int]:
        return [self.dim(d) for d in range(self.max_degree + 1)]

    def basis(self, d: int) -> list[RationalPoly]:
        return self.per_degree[d].basis()


def graded_span(polys: Iterable[RationalPoly], max_degree: int,
                nvars: int | None = None) -> GradedSubspaceBasis:
    polys = list(polys)
    if nvars is None:
        if not polys:
            raise DomainError("graded_span of an empty family needs nvars")
        nvars = polys[0].nvars
    basis = GradedSubspaceBasis(nvars, max_degree)
    for p in polys:
        basis.add(p)
    return basis


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


# -- Molien series -------------------------------------------------------------


def _cycle_factors(w: WeylElement) -> tuple[tuple[int, int], ...]:
    """Cycles of a signed permutation as (length, product of signs).

    ``det(I - t w)`` is the product of ``1 - s t^L`` over these cycles.
    """
    n = len(w.perm)
    seen = [False] * n
    out = []
    for i in range(n):
        if seen[i]:
            continue
        j, length, s = i, 0, 1
        while not seen[j]:
            seen[j] = True
            s *= w.signs[j]
            j = w.perm[j]
            length += 1
        out.append((length, s))
    return tuple(sorted(out))


def _series_mul(a: list, b: list, n: int) -> list:
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(n + 1 - i):
                out[i + j] += x * b[j]
    return out


def molien_dims(rs: RootSystem, max_degree: int) -> list[int]:
    """Dimensions of degree-d Weyl invariants on the Cartan subalgebra, d = 0..max_degree.

    Averages ``1/det(I - t w)`` over the group as truncated power series. On a
    type-A block the trivial summand of the ambient space contributes
    ``1/(1-t)``, which is removed by multiplying by ``1 - t``.
    """
    n = max_degree
    classes = Counter(_cycle_factors(w) for w in enumerate_weyl(rs))
    total = [Fraction(0)] * (n + 1)
    for factors, count in classes.items():
        series = [1] + [0] * n
        for length, s in factors:
            geo = [0] * (n + 1)
            for j in range(0, n + 1, length):
                geo[j] = s ** (j // length)
            series = _series_mul(series, geo, n)
        for i in range(n + 1):
            total[i] += count * series[i]
    one_minus_t = [1, -1] + [0] * max(0, n - 1)
    for _ in rs.type_a_blocks():
        total = _series_mul(total, one_minus_t[:n + 1], n)
    dims = []
    for c in total:
        v = Fraction(c, rs.weyl_order)
        if v.denominator != 1:
            raise IntegrityError(f"Molien coefficient {v} is not an integer")
        dims.append(int(v))
    return dims


def invariant_dims_by_reynolds(rs: RootSystem, max_degree: int) -> list[int]:
    """Same numbers as :func:`molien_dims`, computed by spanning Reynolds images."""
    out = []
    for d in range(max_degree + 1):
        ech = Echelon(rs.rank)
        for e in monomials(rs.ambient_dim, d):
            ech.add(restrict_to_cartan(rs, reynolds(rs, RationalPoly.monomial(e))))
        out.append(len(ech))
    return out


# -- Jacobian criterion --------------------------------------------------------


def sample_points(nvars: int, count: int = 3, seed: int = DEFAULT_SEED,
                  low: int = -9, high: int = 9) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    return [tuple(rng.randint(low, high) for _ in range(nvars)) for _ in range(count)]


def _rank_and_pivots(matrix: list[list]) -> tuple[list[int], list[int]]:
    """Independent row indices and pivot columns of an exact matrix."""
    ncols = len(matrix[0]) if matrix else 0
    ech_rows: dict[int, list] = {}
    rows_used = []
    for r, row in enumerate(matrix):
        v = [Fraction(x) for x in row]
        for piv, er in ech_rows.items():
            if v[piv]:
                c = v[piv]
                v = [a - c * b for a, b in zip(v, er)]
        nz = [j for j in range(ncols) if v[j]]
        if not nz:
            continue
        piv = nz[0]
        inv = 1 / v[piv]
        v = [a * inv for a in v]
        for k, er in ech_rows.items():
            if er[piv]:
                c = er[piv]
                ech_rows[k] = [a - c * b for a, b in zip(er, v)]
        ech_rows[piv] = v
        rows_used.append(r)
    return rows_used, sorted(ech_rows)


def determinant(m: list[list]) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    n_polys: int
    n_vars: int
    point: tuple | None
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    minor: Fraction

    @property
    def certified_full(self) -> bool:
        """True when the rank reaches min(#polys, #vars): a proof of independence."""
        return self.rank == min(self.n_polys, self.n_vars)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "n_polys": self.n_polys,
            "n_vars": self.n_vars,
            "certified_full": self.certified_full,
            "verdict": ("certified independent" if self.certified_full
                        else "not certified independent"),
            "point": None if self.point is None else [str(Fraction(c)) for c in self.point],
            "minor_rows": list(self.rows),
            "minor_cols": list(self.cols),
            "minor": str(self.minor),
        }


def jacobian_certificate(polys: Sequence[RationalPoly],
                         points: Sequence[Sequence]) -> RankCertificate:
    """Exact Jacobian rank maximized over ``points``, with a nonzero minor as witness."""
    polys = list(polys)
    if not polys:
        raise DomainError("jacobian_rank needs at least one polynomial")
    if not points:
        raise DomainError("jacobian_rank needs at least one sample point")
    n = polys[0].nvars
    grads = [[p.derivative(i) for i in range(n)] for p in polys]
    best = RankCertificate(0, len(polys), n, None, (), (), Fraction(0))
    for pt in points:
        pt = tuple(Fraction(c) for c in pt)
        mat = [[g.evaluate(pt) for g in row] for row in grads]
        rows, cols = _rank_and_pivots(mat)
        if len(rows) > best.rank:
            minor = determinant([[mat[r][c] for c in cols] for r in rows])
            if minor == 0:
                raise IntegrityError("selected Jacobian minor vanished")
            best = RankCertificate(len(rows), len(polys), n, pt, tuple(rows), tuple(cols), minor)
            if best.certified_full:
                break
    return best


def jacobian_rank(polys: Sequence[RationalPoly], points: Sequence[Sequence]) -> int:
    """Lower bound for the generic rank of the Jacobian; exact when it is maximal."""
    return jacobian_certificate(polys, points).rank
