import pytest
from hypothesis import given, strategies as st

from anticanon_lab import cycles, picard
from anticanon_lab.picard import DivisorClass, LatticeError, pair


def classes(n=4):
    return st.lists(st.integers(-6, 6), min_size=2 + 2 * n, max_size=2 + 2 * n).map(DivisorClass.from_vector)


def test_exceptional_square():
    assert pair(picard.unit("e1", 4), picard.unit("e1", 4)) == -1


def test_square_and_genus_on_minus3_minus1_x4():
    cfg = cycles.named_surface("k4-first-and-third")
    B = sum((cfg.components[i].cls for i in (0, 2, 4, 6)), DivisorClass.zero(4))
    D = picard.anticanonical(4) * 2 - B
    assert pair(D, D) == 4
    assert picard.genus(D) == 1


def test_twisted_anticanonical_against_C1_on_type_II():
    cfg = cycles.named_surface("type-II")
    C1 = cfg.components[0].cls
    assert C1 == picard.parse_class("f1-e1-e2-e3", 4)
    D = picard.anticanonical(4) - (picard.unit("e1", 4) - picard.unit("ce1", 4))
    assert pair(D, C1) == -2


def test_mismatched_lattices_rejected():
    with pytest.raises(LatticeError):
        pair(picard.unit("e1", 3), picard.unit("e1", 4))


def test_chi_values():
    assert picard.chi(DivisorClass.zero(4)) == 1
    assert picard.chi(picard.anticanonical(4)) == 1
    assert picard.genus(picard.unit("f1", 4)) == 0


def test_conjugation_examples():
    assert picard.conjugate(picard.unit("e1", 4)) == picard.unit("ce1", 4)
    K = picard.canonical(4)
    assert picard.conjugate(K) == K
    assert picard.conjugate(picard.parse_class("f1-e1-e2-e3", 4)) == picard.parse_class("f1-ce1-ce2-ce3", 4)


def test_catalog_needs_negative_curves():
    with pytest.raises(LatticeError):
        picard.SurfaceLattice(4, [("f1", picard.unit("f1", 4))])


@pytest.mark.parametrize("n", range(5))
def test_canonical_square(n):
    K = picard.canonical(n)
    assert pair(K, K) == 8 - 2 * n


@given(classes(), classes(), classes(), st.integers(-3, 3))
def test_pair_symmetric_bilinear(a, b, c, k):
    assert pair(a, b) == pair(b, a)
    assert pair(a * k + b, c) == k * pair(a, c) + pair(b, c)


@given(classes(), classes())
def test_conjugation_isometric_involution(a, b):
    ca, cb = picard.conjugate(a), picard.conjugate(b)
    assert picard.conjugate(ca) == a
    assert pair(ca, cb) == pair(a, b)


@given(classes())
def test_riemann_roch_duality_identity(d):
    K = picard.canonical(4)
    assert picard.chi(d) + picard.chi(K - d) == pair(d, d - K) + 2
    assert picard.genus(picard.anticanonical(4)) == 1


@given(classes())
def test_format_parse_round_trip(d):
    assert picard.parse_class(picard.format_class(d), 4) == d
