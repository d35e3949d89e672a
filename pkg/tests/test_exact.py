from itertools import combinations
from math import gcd

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.domains import GF, QQ, ZZ

from comarr.exceptions import InvalidInputError
from comarr.utils.exact import (
    Subspace,
    coefficient_domain,
    det_sign,
    domain_matrix,
    field_nullspace,
    field_rank,
    format_rational,
    intersect,
    parse_rational,
    rational,
    smith_normal_form,
)


def determinantal_factors(rows):
    """Invariant factors from gcds of minors"""
    m = Matrix(rows)
    factors, previous = [], 1
    for size in range(1, min(m.shape) + 1):
        g = 0
        for r in combinations(range(m.rows), size):
            for c in combinations(range(m.cols), size):
                g = gcd(g, int(m.extract(list(r), list(c)).det()))
        if g == 0:
            break
        factors.append(g // previous)
        previous = g
    return factors


def test_rational_helpers():
    assert format_rational(rational(3, 6)) == "1/2"
    assert format_rational(rational(-4)) == "-4"
    assert parse_rational("-4") == QQ(-4)
    assert parse_rational("2/6") == QQ(1, 3)
    with pytest.raises(InvalidInputError):
        rational(1, 0)
    with pytest.raises(InvalidInputError):
        parse_rational("a/b")


def test_subspace_is_canonical():
    a = Subspace.from_normals([[1, -1, 0], [0, 1, -1]], 3)
    b = Subspace.from_normals([[1, 0, -1], [2, -2, 0]], 3)
    assert a == b
    assert a.codim == 2 and a.dim == 1
    assert a.contains_vector([1, 1, 1])
    assert not a.contains_vector([1, 0, 0])
    assert a.contains_normal([1, 1, -2])


def test_intersect_and_containment():
    h12 = Subspace.from_normals([[1, -1, 0]], 3)
    h23 = Subspace.from_normals([[0, 1, -1]], 3)
    line = intersect(h12, h23)
    assert line.dim == 1
    assert line.is_contained_in(h12)
    assert not h12.is_contained_in(line)
    assert intersect(h12, Subspace.ambient(3)) == h12
    with pytest.raises(InvalidInputError):
        intersect(h12, Subspace.ambient(2))


def test_spanning_vectors():
    line = Subspace.from_normals([[1, -1, 0], [0, 1, -1]], 3)
    (v,) = line.spanning_vectors()
    assert v[0] != 0 and v[0] == v[1] == v[2]
    assert len(Subspace.ambient(3).spanning_vectors()) == 3
    assert Subspace.from_normals([[1, 0], [0, 1]], 2).spanning_vectors() == []


def test_permuted_subspace():
    h12 = Subspace.from_normals([[1, -1, 0]], 3)
    assert h12.permuted((1, 2, 0)) == Subspace.from_normals([[0, 1, -1]], 3)


def test_subspace_json_round_trip():
    s = Subspace.from_normals([[2, 1, 0], [0, 3, 1]], 3)
    assert Subspace.from_json(s.to_json()) == s


def test_det_sign():
    assert det_sign([[0, 1], [1, 0]]) == -1
    assert det_sign([[2, 1], [1, 1]]) == 1
    assert det_sign([]) == 1
    with pytest.raises(InvalidInputError):
        det_sign([[1, 2], [2, 4]])


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[2, 0], [0, 3]], [1, 6]),
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [2, 6, 12]),
        ([[2, 0, 0], [0, 4, 0], [0, 0, 6]], [2, 2, 12]),
        ([[0, 0], [0, 0]], []),
        ([[1, 1, 0], [0, 1, 1], [1, 0, -1]], [1, 1]),
    ],
)
def test_smith_normal_form_examples(rows, expected):
    assert smith_normal_form(rows) == expected
    assert determinantal_factors(rows) == expected


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 2, 3], [4, 5, 6], [7, 8, 10]],
        [[6, 4], [4, 6]],
        [[3, 1], [1, 3]],
        [[2, 4, 4], [-6, 6, 12], [10, -4, -16]],
    ],
)
def test_smith_normal_form_matches_sympy(rows):
    theirs = [abs(int(f)) for f in invariant_factors(Matrix(rows), domain=ZZ)]
    assert smith_normal_form(rows) == theirs


@pytest.mark.parametrize(
    "rows",
    [
        [[-1, 1, 0, 0], [1, 0, -1, 0], [0, -1, 1, 0], [0, 0, 2, 2]],
        [[4, 6, 8], [6, 9, 12], [2, 2, 2]],
        [[0, 3], [0, 6], [0, 0]],
    ],
)
def test_smith_normal_form_rank_deficient(rows):
    assert smith_normal_form(rows) == determinantal_factors(rows)


def test_smith_normal_form_sparse_input():
    assert smith_normal_form({0: {1: 2}, 3: {0: -3}}) == [1, 6]


def test_coefficient_domain():
    assert coefficient_domain("Z") == ZZ
    assert coefficient_domain("Q") == QQ
    assert coefficient_domain("Fp", 3) == GF(3)
    with pytest.raises(InvalidInputError):
        coefficient_domain("Fp", 4)
    with pytest.raises(InvalidInputError):
        coefficient_domain("Fp")
    with pytest.raises(InvalidInputError):
        coefficient_domain("R")


def test_field_rank_depends_on_field():
    entries = {0: {0: 2, 1: 2}, 1: {0: 1, 1: 3}}
    assert field_rank(entries, (2, 2), QQ) == 2
    assert field_rank(entries, (2, 2), GF(2)) == 1
    assert field_rank({0: {0: 2}}, (1, 1), GF(2)) == 0
    assert field_rank({}, (0, 4), QQ) == 0


def test_field_nullspace():
    m = domain_matrix({0: {0: 1, 1: 1}}, (1, 3), QQ)
    kernel = field_nullspace(m)
    assert kernel.shape == (2, 3)
    for row in kernel.to_list():
        assert row[0] + row[1] == 0

    empty = domain_matrix({}, (0, 2), QQ)
    assert field_nullspace(empty).shape == (2, 2)
