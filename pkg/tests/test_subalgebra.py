import itertools

import pytest

from coadjoint.errors import DomainError
from coadjoint.polyalg import RationalPoly, molien_dims
from coadjoint.rootsys import classify_orbit, face_representative, parse_root_system
from coadjoint.subalgebra import (
    convolve,
    face_span_basis,
    generate_subalgebra,
    independence_report,
    product_subalgebra,
    semicontinuity_check,
    standard_generators,
)


def orbit(label, xi):
    rs = parse_root_system(label)
    return rs, classify_orbit(rs, xi)


def _proportional(u, v):
    return all(u[i] * v[j] == u[j] * v[i] for i in range(len(u)) for j in range(len(u)))


def test_face_span_examples():
    rs, o = orbit("A2", (1, 0, -1))
    assert len(face_span_basis(rs, o)) == 2
    rs, o = orbit("A3", (1, 1, -1, -1))
    (v,) = face_span_basis(rs, o)
    assert _proportional(v, (1, 1, -1, -1))
    rs, o = orbit("A2", (2, -1, -1))
    (v,) = face_span_basis(rs, o)
    assert _proportional(v, (2, -1, -1))


def test_face_span_fixed_by_parabolic():
    rs, o = orbit("D4", (2, 1, 1, 0))
    basis = face_span_basis(rs, o)
    assert len(basis) == o.face_dim
    for w in o.parabolic_weyl():
        for v in basis:
            assert w.act(v) == v


def test_flag_full():
    rs, o = orbit("A2", (1, 0, -1))
    rep = generate_subalgebra(rs, o, 6)
    assert rep.algebra_dims == [1, 0, 1, 1, 1, 1, 2]
    assert rep.invariant_dims == [1, 0, 1, 1, 1, 1, 2]
    assert rep.full_up_to_cutoff
    assert all(rep.generators.saturated.values())


def test_projective_plane_full():
    rs, o = orbit("A2", (2, -1, -1))
    rep = generate_subalgebra(rs, o, 6)
    assert rep.full_up_to_cutoff


def test_grassmannian_not_full():
    rs, o = orbit("A3", (1, 1, -1, -1))
    rep = generate_subalgebra(rs, o, 4)
    assert rep.algebra_dims[3] == 0
    assert rep.invariant_dims[3] == 1
    assert not rep.full_up_to_cutoff
    assert 3 in rep.missing_degrees
    c3 = standard_generators(rs)["c3"]
    assert not rep.contains(c3)
    assert rep.contains(standard_generators(rs)["c2"])


def test_report_invariants():
    rs, o = orbit("A3", (3, -1, -1, -1))
    rep = generate_subalgebra(rs, o, 4)
    assert all(a <= b for a, b in zip(rep.algebra_dims, rep.invariant_dims))
    assert rep.algebra_dims[1] == 0
    assert rep.algebra_dims[2] >= 1
    data = rep.to_json()
    assert data["seed"] == rep.seed
    assert data["algebra_dims"] == rep.algebra_dims
    assert "sample_points" in data["generators"]


def test_cutoff_validation():
    rs, o = orbit("A1", (1, -1))
    with pytest.raises(DomainError):
        generate_subalgebra(rs, o, 1)


@pytest.mark.parametrize("label, xi, cutoff", [
    ("A2", (2, 1, -3), 5),
    ("A2", (1, 1, -2), 6),
    ("A3", (1, 1, -1, -1), 4),
    ("A3", (3, 1, -1, -3), 3),
    ("A3", (1, 0, 0, -1), 4),
])
def test_powers_match_products(label, xi, cutoff):
    rs, o = orbit(label, xi)
    powers = generate_subalgebra(rs, o, cutoff, seeding="powers")
    products = generate_subalgebra(rs, o, cutoff, seeding="products")
    assert powers.algebra_dims == products.algebra_dims
    for d in range(cutoff + 1):
        for p in products.basis.basis(d):
            assert powers.contains(p)


def test_seed_does_not_change_dims():
    rs, o = orbit("A3", (2, 1, -1, -2))
    dims = {tuple(generate_subalgebra(rs, o, 3, seed=s).algebra_dims) for s in (1, 2, 3)}
    assert len(dims) == 1


def test_degree_two_nonzero_on_every_face():
    for label in ("A2", "A3", "B3", "C3"):
        rs = parse_root_system(label)
        for size in range(rs.rank):
            for stab in itertools.combinations(range(rs.rank), size):
                o = classify_orbit(rs, face_representative(rs, stab))
                rep = generate_subalgebra(rs, o, 2)
                assert rep.algebra_dims[1] == 0
                assert rep.algebra_dims[2] >= 1, (label, stab)


def test_independence_generic():
    rs, o = orbit("A2", (2, 1, -3))
    rep = independence_report(rs, o, 4)
    assert rep.rank == 2
    assert rep.certificate.certified_full
    assert rep.certificate.minor != 0
    rs, o = orbit("A3", (4, 1, -2, -3))
    rep = independence_report(rs, o, 5)
    assert rep.rank == 3
    assert rep.certificate.certified_full
    assert rep.reaches_rank


def test_independence_symmetric_points():
    # -xi lies in the Weyl orbit, so odd classes vanish and k up to 5 falls short
    rs, o = orbit("A2", (1, 0, -1))
    rep = independence_report(rs, o, 4)
    assert rep.k_values == [2, 4]
    assert rep.rank == 1
    assert independence_report(rs, o, 6).reaches_rank
    rs, o = orbit("A3", (3, 1, -1, -3))
    rep = independence_report(rs, o, 5)
    assert rep.k_values == [2, 4]
    assert rep.rank == 2
    assert not rep.reaches_rank
    assert rep.to_json()["reaches_rank"] is False
    rep = independence_report(rs, o, 6)
    assert rep.k_values == [2, 4, 6]
    assert rep.reaches_rank and rep.certificate.minor != 0


def test_independence_grassmannian():
    rs, o = orbit("A3", (1, 1, -1, -1))
    assert independence_report(rs, o, 5).rank <= 2


def test_independence_kmax_check():
    rs, o = orbit("A3", (4, 1, -2, -3))
    with pytest.raises(DomainError):
        independence_report(rs, o, 2)


def test_semicontinuity_same_orbit():
    rs, o = orbit("A2", (2, -1, -1))
    v = semicontinuity_check(rs, o, o, 4)
    assert v.contained and v.first_failing_degree is None and v.faces_nested


def test_semicontinuity_grassmannian_nearby():
    rs = parse_root_system("A3")
    o1 = classify_orbit(rs, (1, 1, -1, -1))
    from fractions import Fraction
    o2 = classify_orbit(rs, (Fraction(8, 7), 1, -1, Fraction(-8, 7)))
    v = semicontinuity_check(rs, o1, o2, 4)
    assert v.contained
    assert v.per_degree == [True] * 5


def test_semicontinuity_projective_plane():
    rs = parse_root_system("A2")
    v = semicontinuity_check(rs, classify_orbit(rs, (2, -1, -1)), classify_orbit(rs, (2, 0, -2)), 6)
    assert v.contained


def test_semicontinuity_reports_failure():
    # the regular orbit's algebra is not inside the grassmannian's
    rs = parse_root_system("A3")
    v = semicontinuity_check(rs, classify_orbit(rs, (3, 1, -1, -3)),
                             classify_orbit(rs, (1, 1, -1, -1)), 4)
    assert not v.contained
    assert v.first_failing_degree == 3
    assert not v.faces_nested


def test_product_a1_a1():
    a1 = parse_root_system("A1")
    rep = generate_subalgebra(a1, classify_orbit(a1, (1, -1)), 4)
    assert rep.algebra_dims == [1, 0, 1, 0, 1]
    prod = product_subalgebra([rep, rep])
    assert prod.algebra_dims == [1, 0, 2, 0, 3]
    assert prod.algebra_dims == convolve(rep.algebra_dims, rep.algebra_dims, 4)
    rs = parse_root_system("A1xA1")
    direct = generate_subalgebra(rs, classify_orbit(rs, (1, -1, 1, -1)), 4)
    assert direct.algebra_dims == prod.algebra_dims
    assert direct.invariant_dims == prod.invariant_dims == molien_dims(rs, 4)
    assert product_subalgebra([rep]) is rep


def test_product_a1_cubed():
    a1 = parse_root_system("A1")
    rep = generate_subalgebra(a1, classify_orbit(a1, (1, -1)), 4)
    prod = product_subalgebra([rep, rep, rep])
    assert prod.algebra_dims[2] == 3


def test_product_mixed_factors():
    a1, a2 = parse_root_system("A1"), parse_root_system("A2")
    r1 = generate_subalgebra(a1, classify_orbit(a1, (1, -1)), 4)
    r2 = generate_subalgebra(a2, classify_orbit(a2, (2, -1, -1)), 4)
    rs = parse_root_system("A1xA2")
    direct = generate_subalgebra(rs, classify_orbit(rs, (1, -1, 2, -1, -1)), 4)
    assert product_subalgebra([r1, r2]).algebra_dims == direct.algebra_dims


def test_product_cutoff_mismatch():
    a1 = parse_root_system("A1")
    o = classify_orbit(a1, (1, -1))
    with pytest.raises(DomainError):
        product_subalgebra([generate_subalgebra(a1, o, 4), generate_subalgebra(a1, o, 3)])


def test_standard_generators():
    a1 = parse_root_system("A1")
    gens = standard_generators(a1)
    assert list(gens) == ["c2"]
    assert gens["c2"] == RationalPoly.monomial((2,), -1)
    d4 = parse_root_system("D4")
    gens = standard_generators(d4)
    assert list(gens) == ["p1", "p2", "p3", "e"]
    assert gens["e"] == RationalPoly.monomial((1, 1, 1, 1))
    assert [g.degree for g in gens.values()] == [2, 4, 6, 4]


def test_euler_membership_finding():
    # cutoff-4 subalgebra of SO(8)/U(4) is spanned by P2^2 and P4, and P4
    # carries a p2 component, so the Euler class is not reached at this cutoff
    rs, o = orbit("D4", (1, 1, 1, 1))
    rep = generate_subalgebra(rs, o, 4)
    gens = standard_generators(rs)
    assert rep.algebra_dims == [1, 0, 1, 0, 2]
    assert rep.contains(gens["p1"])
    assert not rep.contains(gens["e"])
