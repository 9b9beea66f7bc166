import itertools
import math
from fractions import Fraction

import pytest

from coadjoint.errors import ConfigurationError, DomainError, ResourceError
from coadjoint.rootsys import (
    build_root_system,
    classify_orbit,
    dominant_representative,
    enumerate_weyl,
    face_representative,
    inversion_sign,
    parse_root_system,
    parse_vector,
)

ALL = ["A1", "A2", "A3", "B2", "B3", "C2", "C3", "D3", "D4"]


def _det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inv
        for i in range(n):
            term *= m[i][perm[i]]
            if term == 0:
                break
        total += term
    return total


def test_a1():
    rs = build_root_system("A", 1)
    assert rs.positive_roots == ((1, -1),)
    assert rs.weyl_order == 2
    assert rs.ambient_dim == 2


@pytest.mark.parametrize("label, npos, order", [
    ("A3", 6, 24),
    ("D4", 12, 192),
    ("B3", 9, 48),
    ("C3", 9, 48),
    ("A4", 10, 120),
])
def test_counts(label, npos, order):
    rs = parse_root_system(label)
    assert len(rs.positive_roots) == npos
    assert rs.weyl_order == order
    assert len(enumerate_weyl(rs)) == order


def test_simple_roots():
    assert parse_root_system("B2").simple_roots == ((1, -1), (0, 1))
    assert parse_root_system("C2").simple_roots == ((1, -1), (0, 2))
    assert parse_root_system("D3").simple_roots == ((1, -1, 0), (0, 1, -1), (0, 1, 1))


@pytest.mark.parametrize("label", ALL)
def test_positive_roots_are_nonnegative_combinations(label):
    rs = parse_root_system(label)
    simple = rs.simple_roots
    for alpha in rs.positive_roots:
        # brute force over small coefficient vectors; classical roots use coefficients <= 2
        found = any(
            tuple(sum(c * s[i] for c, s in zip(coeffs, simple)) for i in range(rs.ambient_dim)) == alpha
            for coeffs in itertools.product(range(3), repeat=len(simple))
        )
        assert found, alpha


@pytest.mark.parametrize("label", ["E8", "G2", "D2", "A0", "a3", "A", "A3xE6"])
def test_rejected_labels(label):
    with pytest.raises(ConfigurationError):
        parse_root_system(label)


def test_build_rejects_family():
    with pytest.raises(ConfigurationError, match="F"):
        build_root_system("F", 4)


def test_weyl_a1():
    elems = enumerate_weyl(parse_root_system("A1"))
    assert {(w.matrix, w.sign) for w in elems} == {
        (((1, 0), (0, 1)), 1),
        (((0, 1), (1, 0)), -1),
    }


def test_weyl_a2_is_s3():
    elems = enumerate_weyl(parse_root_system("A2"))
    expected = set()
    for p in itertools.permutations(range(3)):
        m = [[0] * 3 for _ in range(3)]
        for i, j in enumerate(p):
            m[j][i] = 1
        expected.add(tuple(tuple(r) for r in m))
    assert {w.matrix for w in elems} == expected


def test_weyl_d3_even_signed_permutations():
    elems = enumerate_weyl(parse_root_system("D3"))
    expected = {
        (p, s)
        for p in itertools.permutations(range(3))
        for s in itertools.product((1, -1), repeat=3)
        if math.prod(s) == 1
    }
    assert len(expected) == 24
    assert {(w.perm, w.signs) for w in elems} == expected


@pytest.mark.parametrize("label", ALL)
def test_weyl_permutes_roots_and_signs_agree(label):
    rs = parse_root_system(label)
    roots = set(rs.roots)
    elems = enumerate_weyl(rs)
    assert elems[0].is_identity()
    for w in elems:
        assert {w.act(a) for a in roots} == roots
        assert w.sign == inversion_sign(rs, w)
    # determinant on t: for type A the trivial summand has eigenvalue 1
    for w in elems[:50]:
        assert w.sign == _det(w.matrix)


def test_signs_multiplicative():
    elems = enumerate_weyl(parse_root_system("B3"))
    for a, b in itertools.islice(itertools.product(elems, elems), 0, 2000, 7):
        assert a.compose(b).sign == a.sign * b.sign
        assert a.compose(a.inverse()).is_identity()


def test_weyl_cap():
    with pytest.raises(ResourceError):
        enumerate_weyl(parse_root_system("A5"), cap=100)


def test_classify_regular():
    o = classify_orbit(parse_root_system("A2"), (1, 0, -1))
    assert o.stabilizer_simples == ()
    assert o.face_dim == 2
    assert o.n_fiber == 3


def test_classify_projective_plane():
    o = classify_orbit(parse_root_system("A2"), (2, -1, -1))
    assert o.stabilizer_simples == (1,)
    assert o.face_dim == 1
    assert o.n_fiber == 2


def test_classify_grassmannian():
    o = classify_orbit(parse_root_system("A3"), (1, 1, -1, -1))
    assert o.stabilizer_simples == (0, 2)
    assert o.face_dim == 1
    assert o.n_fiber == 4  # complex dimension of G(2,4)


def test_classify_errors():
    rs = parse_root_system("A2")
    with pytest.raises(DomainError, match="dominant"):
        classify_orbit(rs, (0, 1, -1))
    with pytest.raises(DomainError, match="sum to zero"):
        classify_orbit(rs, (1, 0, 0))
    with pytest.raises(DomainError):
        classify_orbit(rs, (0, 0, 0))
    with pytest.raises(DomainError):
        classify_orbit(rs, (1, -1))
    with pytest.raises(DomainError, match="simple factor"):
        classify_orbit(parse_root_system("A1xA1"), (1, -1, 0, 0))


def test_classify_deterministic_under_stabilizer():
    rs = parse_root_system("A3")
    xi = (1, 1, -1, -1)
    o = classify_orbit(rs, xi)
    for w in o.parabolic_weyl():
        assert classify_orbit(rs, w.act(xi)) == o


def test_dominant_representative():
    rs = parse_root_system("B2")
    assert dominant_representative(rs, (-1, 2)) == (2, 1)


def test_face_representative_matches_classification():
    rs = parse_root_system("D4")
    for r in range(4):
        for stab in itertools.combinations(range(4), r):
            o = classify_orbit(rs, face_representative(rs, stab))
            assert o.stabilizer_simples == stab
            assert o.face_dim == 4 - len(stab)


def test_parse_vector():
    assert parse_vector("3/2,-1,−1/2") == (Fraction(3, 2), Fraction(-1), Fraction(-1, 2))
    with pytest.raises(ConfigurationError):
        parse_vector("1,a")
    with pytest.raises(ConfigurationError):
        parse_vector("")


def test_direct_sum():
    rs = parse_root_system("A1xB2")
    assert rs.rank == 3
    assert rs.ambient_dim == 4
    assert rs.weyl_order == 16
    assert len(enumerate_weyl(rs)) == 16
    assert rs.type_a_blocks() == [(0, 2)]
