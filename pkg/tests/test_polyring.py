import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from anticanon_lab.polyring import (
    SCROLL, LinearIdeal, Poly, PolyError, Z, is_neg_square, parse_poly, quadratic_rank, reduce,
    to_text,
)

SAMPLE_Q = parse_poly("z3^2 + z4^2 + z0*z3 + z1*z2 - 2*z0*z4 + z1*z3")


def test_monomials_with_z0_vanish_mod_z0_z2():
    p = parse_poly("z0*z3*z4*(z0+z2+z3)")
    assert reduce(p, LinearIdeal([Z[0], Z[2]])).is_zero()


def test_scroll_quadric_reduces_to_zero():
    assert reduce(SCROLL, LinearIdeal([], include_scroll=True)).is_zero()


def test_plane_reduction_matches_frozen_expansion():
    # frozen from an independent symbolic expansion (substitute z0 = z1 = z2)
    I = LinearIdeal([parse_poly("z0 - z1"), parse_poly("z2 - z0")])
    got = reduce(parse_poly("z0*(z0-z1)*z3*z4") - SAMPLE_Q * SAMPLE_Q, I)
    assert to_text(got) == (
        "-z2^4 - 4*z2^3*z3 + 4*z2^3*z4 - 6*z2^2*z3^2 + 8*z2^2*z3*z4 - 6*z2^2*z4^2"
        " - 4*z2*z3^3 + 4*z2*z3^2*z4 - 4*z2*z3*z4^2 + 4*z2*z4^3 - z3^4 - 2*z3^2*z4^2 - z4^4"
    )
    qr = reduce(SAMPLE_Q, I)
    assert got == -(qr * qr)


def test_non_homogeneous_rejected():
    with pytest.raises(PolyError):
        reduce(parse_poly("z0^2 + z1"), LinearIdeal([Z[0]]))


@pytest.mark.parametrize("text,rank", [("z2*z3", 2), ("z2*z3 + z4^2", 3), ("z4^2", 1)])
def test_quadratic_rank(text, rank):
    assert quadratic_rank(parse_poly(text), ["z2", "z3", "z4"]) == rank


def test_neg_square_examples():
    Q = SAMPLE_Q
    assert is_neg_square(parse_poly("z0*z3*z4*z2") - Q * Q, Q, LinearIdeal([Z[0], Z[2]]))
    I = LinearIdeal([parse_poly("z0 - z1"), parse_poly("z2 - z0")])
    assert is_neg_square(parse_poly("z0*(z0-z1)*z3*z4") - Q * Q, Q, I)
    assert not is_neg_square(parse_poly("z3^4") - Q * Q, Q, LinearIdeal([Z[0], Z[2]]))


coef = st.integers(-5, 5)


@st.composite
def quartics(draw):
    rng = random.Random(draw(st.integers(0, 10**6)))
    terms = {}
    for _ in range(draw(st.integers(1, 6))):
        e = [0] * 5
        for _ in range(4):
            e[rng.randrange(5)] += 1
        terms[tuple(e) + (0, 0, 0)] = Fraction(rng.randint(-5, 5))
    return Poly(terms)


IDEALS = [
    LinearIdeal([Z[0], Z[2]]),
    LinearIdeal([parse_poly("z0 - z1"), parse_poly("z2 - z0")]),
    LinearIdeal([Z[0], Z[1], Z[2]]),
    LinearIdeal([Z[3]], include_scroll=True),
    LinearIdeal([], include_scroll=True),
]


@given(quartics(), quartics(), coef, coef, st.sampled_from(IDEALS))
def test_reduce_is_linear_and_idempotent(p, q, a, b, I):
    r = reduce(p, I)
    assert reduce(r, I) == r
    lhs = reduce(p.scale(a) + q.scale(b), I)
    assert lhs == reduce(p, I).scale(a) + reduce(q, I).scale(b)


@given(quartics())
def test_text_round_trip(p):
    assert parse_poly(to_text(p)) == p


@given(st.integers(0, 10**6))
def test_rank_invariant_under_unimodular_change(seed):
    rng = random.Random(seed)
    base = parse_poly("z2*z3 + z4^2")
    # random upper-unitriangular change of z2, z3, z4
    a, b, c = (rng.randint(-4, 4) for _ in range(3))
    z2, z3, z4 = Z[2], Z[3], Z[4]
    moved = base.subs({"z2": z2 + z3.scale(a) + z4.scale(b), "z3": z3 + z4.scale(c), "z4": z4})
    assert quadratic_rank(moved, ["z2", "z3", "z4"], seed=seed) == 3
