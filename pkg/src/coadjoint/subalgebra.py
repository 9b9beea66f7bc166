"""The fibre-integral subalgebra of an orbit, up to a degree cutoff.

The subalgebra is generated by pushforwards of products of degree-two
classes on the orbit's Borel construction. Those classes are the linear
forms fixed by the parabolic Weyl group (the face span), and by
polarization pushforwards of powers ``u^(n+k)`` of sampled face-span forms
already span the same space as pushforwards of arbitrary products.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, gcd, lcm
from typing import Sequence

from .errors import DomainError
from .polyalg import (
    DEFAULT_SEED,
    GradedSubspaceBasis,
    RankCertificate,
    RationalPoly,
    jacobian_certificate,
    molien_dims,
    restrict_to_cartan,
    sample_points,
)
from .pushforward import char_classes, orbit_pushforward
from .rootsys import OrbitPoint, RootSystem, classify_orbit, direct_sum

DEFAULT_CUTOFF = 6
SAFETY_SAMPLES = 2
_COEFF_RANGE = 20


def _rref_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * den) for x in v]
    g = gcd(*ints) or 1
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    return tuple(-x for x in ints) if first < 0 else tuple(ints)


def face_span_basis(rs: RootSystem, orbit: OrbitPoint) -> list[tuple[int, ...]]:
    """Basis (ambient coordinates) of the linear forms fixed by the parabolic Weyl group."""
    n = rs.ambient_dim
    constraints = [[Fraction(c) for c in rs.simple_roots[i]] for i in orbit.stabilizer_simples]
    for off, size in rs.type_a_blocks():
        constraints.append([Fraction(1 if off <= j < off + size else 0) for j in range(n)])
    basis = [_primitive(v) for v in _rref_nullspace(constraints, n)]
    if len(basis) != orbit.face_dim:
        raise DomainError(
            f"face span has dimension {len(basis)}, expected face_dim {orbit.face_dim}")
    return basis


@dataclass
class GeneratorSample:
    face_basis: list[tuple[int, ...]]
    sample_points: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)
    powers_used: dict[int, list[RationalPoly]] = field(default_factory=dict)
    saturated: dict[int, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "face_basis": [list(v) for v in self.face_basis],
            "sample_points": {str(k): [list(u) for u in pts]
                              for k, pts in sorted(self.sample_points.items())},
            "saturated": {str(k): s for k, s in sorted(self.saturated.items())},
        }


@dataclass
class SubalgebraReport:
    orbit: OrbitPoint
    cutoff: int
    algebra_dims: list[int]
    invariant_dims: list[int]
    basis: GradedSubspaceBasis | None = None
    generators: GeneratorSample | None = None
    seed: int = DEFAULT_SEED
    seeding: str = "powers"

    @property
    def missing_degrees(self) -> list[int]:
        return [d for d, (a, b) in enumerate(zip(self.algebra_dims, self.invariant_dims)) if a < b]

    @property
    def full_up_to_cutoff(self) -> bool:
        return not self.missing_degrees

    def contains(self, p: RationalPoly) -> bool:
        if self.basis is None:
            raise DomainError("report carries no basis (it was assembled from factor dimensions)")
        return self.basis.contains(p)

    def to_json(self) -> dict:
        out = {
            "orbit": self.orbit.to_json(),
            "cutoff": self.cutoff,
            "algebra_dims": list(self.algebra_dims),
            "invariant_dims": list(self.invariant_dims),
            "full_up_to_cutoff": self.full_up_to_cutoff,
            "missing_degrees": self.missing_degrees,
            "seed": self.seed,
            "seeding": self.seeding,
        }
        if self.generators is not None:
            out["generators"] = self.generators.to_json()
        if self.basis is not None:
            out["basis"] = {str(d): [p.to_json() for p in self.basis.basis(d)]
                            for d in range(self.cutoff + 1)}
        return out


def _face_points(face_basis, count: int, rng: random.Random, seen: set) -> list[tuple[int, ...]]:
    d = len(face_basis)
    n = len(face_basis[0])
    out = []
    while len(out) < count:
        coeffs = [rng.randint(-_COEFF_RANGE, _COEFF_RANGE) for _ in range(d)]
        u = tuple(sum(c * f[i] for c, f in zip(coeffs, face_basis)) for i in range(n))
        if any(u) and u not in seen:
            seen.add(u)
            out.append(u)
    return out


def _power_seeds(rs, orbit, face_basis, k, rng, seen, gen: GeneratorSample, basis):
    nf = orbit.n_fiber
    count = comb(nf + k + len(face_basis) - 1, len(face_basis) - 1)
    pts = _face_points(face_basis, count, rng, seen)
    polys = []

    def push(u):
        p = restrict_to_cartan(rs, orbit_pushforward(rs, orbit, RationalPoly.linear(u) ** (nf + k)))
        polys.append(p)
        basis.add(p)

    for u in pts:
        push(u)
    # confirm saturation: more samples must not enlarge the span
    saturated = False
    for _ in range(8):
        before = basis.dim(k)
        extra = _face_points(face_basis, SAFETY_SAMPLES, rng, seen)
        for u in extra:
            push(u)
        pts.extend(extra)
        if basis.dim(k) == before:
            saturated = True
            break
    gen.sample_points[k] = pts
    gen.powers_used[k] = polys
    gen.saturated[k] = saturated


def _product_seeds(rs, orbit, face_basis, k, gen: GeneratorSample, basis):
    nf = orbit.n_fiber
    forms = [RationalPoly.linear(f) for f in face_basis]
    polys = []
    for combo in combinations_with_replacement(range(len(forms)), nf + k):
        prod = RationalPoly.constant(rs.ambient_dim, 1)
        for i in combo:
            prod = prod * forms[i]
        p = restrict_to_cartan(rs, orbit_pushforward(rs, orbit, prod))
        polys.append(p)
        basis.add(p)
    gen.powers_used[k] = polys
    gen.saturated[k] = True


def generate_subalgebra(rs: RootSystem, orbit: OrbitPoint, cutoff: int = DEFAULT_CUTOFF,
                        seed: int = DEFAULT_SEED, seeding: str = "powers") -> SubalgebraReport:
    """Build the fibre-integral subalgebra degree by degree up to ``cutoff``.

    ``seeding="products"`` uses pushforwards of all monomials in a face-span
    basis instead of sampled powers; both must give the same dimensions.
    """
    if cutoff < 2:
        raise DomainError(f"cutoff must be at least 2, got {cutoff}")
    if seeding not in ("powers", "products"):
        raise DomainError(f"unknown seeding {seeding!r}")
    face = face_span_basis(rs, orbit)
    gen = GeneratorSample(face)
    basis = GradedSubspaceBasis(rs.rank, cutoff)
    basis.add(RationalPoly.constant(rs.rank, 1))
    rng = random.Random(seed)
    seen: set = set()
    for d in range(1, cutoff + 1):
        if seeding == "powers":
            _power_seeds(rs, orbit, face, d, rng, seen, gen, basis)
        else:
            _product_seeds(rs, orbit, face, d, gen, basis)
        # lower degrees are final once reached, so one pass closes under products
        for a in range(1, d // 2 + 1):
            for x in basis.basis(a):
                for y in basis.basis(d - a):
                    basis.add(x * y)
    return SubalgebraReport(
        orbit=orbit,
        cutoff=cutoff,
        algebra_dims=basis.dims(),
        invariant_dims=molien_dims(rs, cutoff),
        basis=basis,
        generators=gen,
        seed=seed,
        seeding=seeding,
    )


@dataclass
class IndependenceReport:
    orbit: OrbitPoint
    k_values: list[int]
    certificate: RankCertificate

    @property
    def rank(self) -> int:
        return self.certificate.rank

    @property
    def reaches_rank(self) -> bool:
        """Whether the classes are independent in as many directions as the Cartan has."""
        return self.rank == self.orbit.root_system.rank

    def to_json(self) -> dict:
        return {
            "orbit": self.orbit.to_json(),
            "k_values": self.k_values,
            "reaches_rank": self.reaches_rank,
            **self.certificate.to_json(),
        }


def independence_report(rs: RootSystem, orbit: OrbitPoint, k_max: int,
                        points: Sequence | None = None, n_points: int = 3,
                        seed: int = DEFAULT_SEED) -> IndependenceReport:
    """Jacobian rank of the nonzero classes ``P_2..P_kmax`` at sample points."""
    if k_max < rs.rank:
        raise DomainError(f"k_max must be at least the rank {rs.rank}, got {k_max}")
    classes = char_classes(rs, orbit, k_max)
    used = {k: p for k, p in classes.nonzero(range(2, k_max + 1)).items()}
    if points is None:
        points = sample_points(rs.rank, n_points, seed)
    if not used:
        cert = RankCertificate(0, 0, rs.rank, None, (), (), Fraction(0))
    else:
        cert = jacobian_certificate(list(used.values()), points)
    return IndependenceReport(orbit, sorted(used), cert)


@dataclass
class ContainmentVerdict:
    contained: bool
    per_degree: list[bool]
    first_failing_degree: int | None
    faces_nested: bool

    def to_json(self) -> dict:
        return {
            "contained": self.contained,
            "per_degree": self.per_degree,
            "first_failing_degree": self.first_failing_degree,
            "faces_nested": self.faces_nested,
        }


def semicontinuity_check(rs: RootSystem, orbit1: OrbitPoint, orbit2: OrbitPoint,
                         cutoff: int = DEFAULT_CUTOFF, seed: int = DEFAULT_SEED,
                         reports: tuple[SubalgebraReport, SubalgebraReport] | None = None
                         ) -> ContainmentVerdict:
    """Is the subalgebra of ``orbit1`` contained in that of ``orbit2``, degree by degree?"""
    if reports is None:
        reports = (generate_subalgebra(rs, orbit1, cutoff, seed),
                   generate_subalgebra(rs, orbit2, cutoff, seed))
    r1, r2 = reports
    per = [all(r2.basis.contains(p) for p in r1.basis.basis(d)) for d in range(cutoff + 1)]
    failing = next((d for d, ok in enumerate(per) if not ok), None)
    nested = set(orbit2.stabilizer_simples) <= set(orbit1.stabilizer_simples)
    return ContainmentVerdict(failing is None, per, failing, nested)


def convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    return [sum(a[i] * b[d - i] for i in range(d + 1)) for d in range(n + 1)]


def product_subalgebra(reports: Sequence[SubalgebraReport]) -> SubalgebraReport:
    """Dimensions for the product action, as the tensor product of the factors."""
    reports = list(reports)
    if not reports:
        raise DomainError("product_subalgebra needs at least one report")
    cutoffs = {r.cutoff for r in reports}
    if len(cutoffs) != 1:
        raise DomainError(f"reports have mismatched cutoffs {sorted(cutoffs)}")
    if len(reports) == 1:
        return reports[0]
    cutoff = reports[0].cutoff
    alg = reports[0].algebra_dims
    inv = reports[0].invariant_dims
    for r in reports[1:]:
        alg = convolve(alg, r.algebra_dims, cutoff)
        inv = convolve(inv, r.invariant_dims, cutoff)
    rs = direct_sum(*(r.orbit.root_system for r in reports))
    xi = tuple(c for r in reports for c in r.orbit.xi)
    orbit = classify_orbit(rs, xi)
    return SubalgebraReport(orbit, cutoff, alg, inv, seed=reports[0].seed,
                            seeding=reports[0].seeding)


def _elementary(values: list[RationalPoly], k: int, nvars: int) -> RationalPoly:
    # e_k via the recurrence on the coefficients of prod(1 + v t)
    e = [RationalPoly.constant(nvars, 1)] + [RationalPoly.zero(nvars)] * k
    for v in values:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * v
    return e[k]


def standard_generators(rs: RootSystem) -> dict[str, RationalPoly]:
    """Chern, Pontryagin and Euler polynomials, restricted to the Cartan.

    Conventions: ``c_k = e_k(x)`` on type A blocks, ``p_k = e_k(x_1^2, ..)``
    on B, C and D, and ``e = x_1 ... x_r`` on D. With several factors every
    name is suffixed by the factor index.
    """
    n = rs.ambient_dim
    out = {}
    multi = len(rs.components) > 1
    for idx, ((fam, r), sl) in enumerate(zip(rs.components, rs.component_slices())):
        xs = [RationalPoly.variable(n, i) for i in range(sl.start, sl.stop)]
        tag = f"[{idx + 1}]" if multi else ""
        if fam == "A":
            for k in range(2, r + 2):
                out[f"c{k}{tag}"] = _elementary(xs, k, n)
        else:
            sq = [x * x for x in xs]
            top = r - 1 if fam == "D" else r
            for k in range(1, top + 1):
                out[f"p{k}{tag}"] = _elementary(sq, k, n)
            if fam == "D":
                e = RationalPoly.constant(n, 1)
                for x in xs:
                    e = e * x
                out[f"e{tag}"] = e
    return {name: restrict_to_cartan(rs, p) for name, p in out.items()}
