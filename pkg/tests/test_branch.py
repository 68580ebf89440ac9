import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from anticanon_lab import branch, cycles
from anticanon_lab.branch import BranchError, ValidationError
from anticanon_lab.polyring import Poly, Z, parse_poly, reduce

TYPES = ["I", "II", "III", "IV"]


def test_lambda_placements_lie_on_the_conic():
    for typ in TYPES:
        lams = branch.lambda_placements(typ)
        assert len(lams) == {"I": 2, "II": 3, "III": 4, "IV": 5}[typ]
        for l0, l1, l2 in lams:
            assert (l0 * l0 - l1 * l2).is_zero()
    a = Poly.var("a")
    assert (a, Poly.const(1), a * a) in branch.lambda_placements("III")


def test_split_fiber_multiplicities():
    got = [branch.conic_zero_multiplicities(t)[("0", "0", "1")] for t in ("II", "III", "IV")]
    assert got == [2, 3, 4]


@pytest.mark.parametrize("typ,total", list(zip(TYPES, (26, 18, 10, 2))))
def test_incidence_totals(typ, total):
    tab = branch.incidence_table(typ)
    assert tab.total == total
    nconic = sum(1 for _, k, _ in tab.curves if k != "quartic")
    assert branch.incidence_closed_form(nconic, 5 - nconic) == total


@pytest.mark.parametrize("typ", TYPES)
def test_fixture_quartic_passes(typ):
    model = branch.fixture_model(typ)
    assert all(c.passed for c in model.checks), [c.to_dict() for c in model.checks if not c.passed]
    f = parse_poly(branch.FIXTURE_F) if typ == "I" else None
    branch.assemble_quartic(typ, parse_poly(branch.FIXTURE_Q[typ]), f)


def test_quadric_vanishing_on_ridge_rejected():
    Q = parse_poly("z0*z3 + z1*z4 + z2^2")
    with pytest.raises(ValidationError) as exc:
        branch.assemble_quartic("I", Q, parse_poly("z1 + z3 + z4"))
    assert exc.value.check.startswith("b")


def test_real_roots_on_ridge_rejected():
    Q = parse_poly("z3*z4 + z0*z3")
    model = branch.quartic_checks("II", Q)
    assert not next(c for c in model.checks if c.name.startswith("b")).passed


def test_parameter_constraints():
    Q = parse_poly(branch.FIXTURE_Q["III"])
    with pytest.raises(BranchError):
        branch.assemble_quartic("III", Q, params={"a": Fraction(1)})
    with pytest.raises(BranchError):
        branch.assemble_quartic("IV", Q, params={"a1": Fraction(2), "a2": Fraction(2)})
    with pytest.raises(BranchError):
        branch.assemble_quartic("I", Q)


def test_model_json_mentions_necessary_conditions():
    js = branch.fixture_model("IV").to_json()
    assert "necessary conditions only" in js


@pytest.mark.parametrize("typ", TYPES)
def test_quadric_counts(typ):
    rep = branch.constraint_report(typ)
    assert not rep.degenerate
    assert rep.certified
    dims = dict(rep.dims)
    if typ == "I":
        assert dims["8 points"] == 6 and dims["C3∩C4"] >= 2
    elif typ in ("II", "III"):
        assert min(dims.values()) >= 2
    else:
        # the tangency conditions at q cut more than the four counted; see the decisions ledger
        assert dims["(a),(b),(c')"] == 1


def test_point_conditions_rank():
    conds = [branch.cond_point(f"p{i}", p) for i, p in enumerate(
        [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0)])]
    dim, basis = branch.quadric_constraint_dim(conds)
    assert dim == 14 - 3 and len(basis) == 12


@pytest.mark.parametrize("surf,sel", list(branch.SELECTION_SURFACES.values()))
def test_half_cycle_selections_found(surf, sel):
    cfg = cycles.named_surface(surf)
    found = set(branch.half_cycle_search(cfg.k, cfg))
    assert branch.canonical_selection(sel) in found


def test_relation_profiles():
    assert all(branch.relation_profiles().values())


def test_literal_search_gives_fiber_sums_only():
    for k in range(2, 7):
        assert all(branch.is_fiber_sum(list(s)) for s in branch.half_cycle_search(k))


@given(st.sampled_from(sorted({s for s, _ in branch.SELECTION_SURFACES.values()} | {"type-I", "type-II"})))
def test_half_cycle_search_conjugation_closed(surf):
    cfg = cycles.named_surface(surf)
    sols = set(branch.half_cycle_search(cfg.k, cfg))
    for s in sols:
        assert branch.canonical_selection([branch.conj_half(n) for n in s]) in sols


@settings(max_examples=25)
@given(st.sampled_from(TYPES), st.integers(0, 10**6))
def test_branch_restricts_to_negative_square_on_ridge(typ, seed):
    rng = random.Random(seed)
    Q = Poly()
    for i in range(5):
        for j in range(i, 5):
            Q = Q + (Z[i] * Z[j]).scale(rng.randint(-5, 5))
    f = Z[1] + Z[3].scale(rng.randint(1, 5)) + Z[4]
    prod = Poly.const(1)
    for g in branch.linear_factors(typ, f):
        prod = prod * g
    F = prod - Q * Q
    Fr, Qr = branch.ridge_restriction(F), branch.ridge_restriction(Q)
    assert (Fr + Qr * Qr).is_zero()
    for lam in branch.lambda_placements(typ):
        assert reduce(F + Q * Q, branch.plane_ideal(lam)).is_zero()


def test_poly_file_parsing():
    data = branch.parse_poly_file("# sample\ntype III\nparams a=3/2\nQ = z3^2 + z4^2\n")
    assert data["type"] == "III" and data["params"] == {"a": Fraction(3, 2)}
    assert data["Q"] == parse_poly("z3^2 + z4^2")
    with pytest.raises(BranchError, match="line 1"):
        branch.parse_poly_file("Q = z3^^2\n")
    with pytest.raises(BranchError):
        branch.parse_poly_file("type II\n")
