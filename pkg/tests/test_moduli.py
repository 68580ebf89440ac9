import pytest
from hypothesis import given, strategies as st

from anticanon_lab import cycles, moduli
from anticanon_lab.moduli import ModuliCase, ModuliError


def test_chi_theta_Z():
    assert moduli.chi_theta_Z(4) == -13
    assert moduli.chi_theta_Z(3) == -6
    with pytest.raises(ModuliError):
        moduli.chi_theta_Z(-1)


@pytest.mark.parametrize("Ksq,val", [(0, -10), (8, 6), (9, 8)])
def test_chi_theta_S(Ksq, val):
    assert moduli.chi_theta_S(Ksq) == val


def test_diagram_dims():
    dd = moduli.diagram_dims()
    assert (dd.h1_theta_Z, dd.h1_theta_ZS, dd.h1_theta_Z_minus_S) == (13, 14, 4)
    assert -moduli.chi_theta_Z(4) == dd.h1_theta_Z
    assert moduli.diagram_dims(h0_minus_K=2).h1_theta_ZS == 14


def test_type_I_count():
    case = moduli.case_from_surface(cycles.named_surface("type-I"), "double-solid")
    assert case.p == 4 and case.directions == frozenset(moduli.DIRECTIONS)
    assert moduli.dim_V(case) == 6
    assert moduli.moduli_dim(case) == 9


def test_type_III_count():
    case = moduli.case_from_surface(cycles.named_surface("type-III"), "double-solid")
    assert moduli.dim_V(case) == 2 and moduli.moduli_dim(case) == 5


def test_full_table():
    assert moduli.table() == {
        (6, "birational"): 3,
        (5, "birational"): 4, (5, "double-solid"): 4,
        (4, "birational"): 5, (4, "double-solid"): 5, (4, "conic-bundle"): 6,
        (3, "double-solid"): 7,
        (2, "double-solid"): 9,
    }
    assert moduli.moduli_dim(moduli.ck_case()) == 9


def test_markdown_layout():
    md = moduli.table_markdown()
    assert "| k=6 | 3-dim. (C*xC*) | - | - |" in md
    assert "| k=4 | 5-dim. | 5-dim. | 6-dim. (C*) |" in md
    assert "| k=2 | - | 9-dim. | - |" in md


def test_invalid_cases():
    with pytest.raises(ModuliError):
        moduli.moduli_dim(ModuliCase(3, "birational", 1))
    with pytest.raises(ModuliError):
        moduli.moduli_dim(ModuliCase(2, "double-solid", 5))
    with pytest.raises(ModuliError):
        moduli.moduli_dim(ModuliCase(2, "double-solid", 1, frozenset({"ruling-3"})))
    with pytest.raises(ModuliError):
        moduli.moduli_dim(ModuliCase(2, "campana-kreussler", 0, h0_minus_K=1))


valid = st.sampled_from(sorted(k for k in moduli.VALID if k[1] != "campana-kreussler"))
dirsets = st.sampled_from([frozenset(), frozenset({"ruling-1"}), frozenset({"ruling-2"}),
                           frozenset(moduli.DIRECTIONS)])


@given(valid, st.integers(1, 3), dirsets)
def test_monotone(kk, p, dirs):
    k, kind = kk
    base = moduli.moduli_dim(ModuliCase(k, kind, p, dirs))
    assert moduli.moduli_dim(ModuliCase(k, kind, p + 1, dirs)) >= base
    if len(dirs) < 2:
        more = frozenset(moduli.DIRECTIONS)
        assert moduli.moduli_dim(ModuliCase(k, kind, p, more)) <= base
