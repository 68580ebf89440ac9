import random

import pytest
from hypothesis import given, settings, strategies as st

from anticanon_lab import threefold as tf_mod
from anticanon_lab.threefold import ThreefoldError, cadd, format_sheet_class

TYPES = ["I", "II", "III", "IV"]


def final_model(typ):
    return tf_mod.stage_two(typ)[0] if typ != "I" else tf_mod.stage_one(typ)


def test_first_system_restrictions():
    tf = tf_mod.stage_one("I")
    L1 = tf_mod.first_system(tf)
    assert format_sheet_class(tf.restrict(L1, "E1")) == "(1,1) - D1 - cD2"
    assert format_sheet_class(tf.restrict(L1, "E2")) == "0"
    tf = tf_mod.stage_one("IV")
    assert format_sheet_class(tf.restrict(tf_mod.first_system(tf), "E4")) == "(1,1) - D4"


def test_missing_entry_names_the_pair():
    tf = tf_mod.stage_one("II")
    with pytest.raises(ThreefoldError, match="no restriction of X to E1"):
        tf.restrict({"X": 1}, "E1")


def test_blowup_triple_products():
    out = tf_mod.nc_checks()
    assert out["F^3"] == 0
    for key, val in out.items():
        if key.startswith("(2F-E)^2.") and key.endswith("F"):
            assert val == 4 * int(key[len("(2F-E)^2."):-1])
        else:
            assert val == 0, key


@pytest.mark.parametrize("typ", TYPES)
def test_pulled_hyperplane_cubed_vanishes(typ):
    tf = final_model(typ)
    S = {"S": 1}
    assert tf.triple(S, S, S) == 0
    F = tf_mod.pulled_fundamental(tf)
    assert tf.triple(F, F, F) == 0


@pytest.mark.parametrize("typ", TYPES)
def test_path_independence_100_random(typ):
    assert tf_mod.path_check(final_model(typ), 100, seed=0) == 100


@pytest.mark.parametrize("typ", TYPES)
def test_table_round_trip(typ):
    tf = final_model(typ)
    text = tf.to_text({"F": tf_mod.pulled_fundamental(tf)})
    back, classes = tf_mod.parse_table(text)
    assert back.to_text(classes) == text
    rng = random.Random(1)
    for _ in range(20):
        A, B, C = (tf_mod.random_class(tf, rng) for _ in range(3))
        assert back.triple(A, B, C) == tf.triple(A, B, C)


def test_table_parse_error_has_line_number():
    with pytest.raises(ThreefoldError, match="line 2"):
        tf_mod.parse_table("sheet E1 basis (1,0) (0,1)\nbogus line\n")


def test_type_II_report():
    rep = tf_mod.eliminate("II")
    assert "base curves: S3-∩E1, S3+∩cE1" in rep.to_text()
    assert rep.stage1["E1"] == "(1,0) - cD3"
    assert rep.stage2["E2"] == "(1,1) - D2 - xW1"
    assert rep.formal2["S3-"] == "cE1 + E2 + 2E3"
    assert rep.free


def test_type_III_and_IV_reports():
    rep = tf_mod.eliminate("III")
    assert [n for n, _ in rep.base1] == ["S4-∩E1", "S4+∩cE1", "S4-∩E2", "S4+∩cE2"]
    assert rep.stage2["E3"] == "(1,1) - D3 - xW2"
    rep = tf_mod.eliminate("IV")
    # degree -1 curves on E1 and degree 0 curves meeting them
    assert [d for _, d in rep.base1] == [-1, -1, 0, 0, 0, 0]
    assert rep.stage2["E4"] == "(1,1) - D4 - xW3"
    assert rep.formal2["S5-"] == "cE1 + E4 + 2E5"
    assert rep.free


def test_type_I_images():
    rep = tf_mod.eliminate("I")
    assert rep.free and not rep.base1
    im = {i.sheet: (i.kind, i.target) for i in rep.images}
    assert im["E1"] == im["cE1"] == ("line", "ridge")
    assert {im["E2"][1], im["cE2"][1]} == {"q", "cq"}
    assert im["S1+"] == im["S1-"] == ("surface", "plane P1")
    assert rep.conics == {"L1": 2, "L2": 2}


@pytest.mark.parametrize("typ,k", [("II", 3), ("III", 4), ("IV", 5)])
def test_distinct_lines_and_plane(typ, k):
    im = {i.sheet: i.target for i in tf_mod.eliminate(typ).images}
    assert im[f"S{k}+"] != im[f"S{k}-"]
    assert im[f"W{k - 2}"] == f"plane P{k}"


@pytest.mark.parametrize("typ", TYPES)
def test_subtracted_divisors_add_back(typ):
    tf = tf_mod.stage_one(typ)
    L1 = tf_mod.first_system(tf)
    fixed = {f"{e}{i}": 1 for i in range(1, tf.k) for e in ("E", "cE")}
    assert cadd((1, L1), (1, fixed)) == cadd((2, tf_mod.pulled_fundamental(tf)))


@pytest.mark.parametrize("typ", TYPES)
def test_anticanonical_cube(typ):
    rep = tf_mod.eliminate(typ)
    assert rep.checks["L^3"] == 4


MODELS = {t: final_model(t) for t in TYPES}


@settings(max_examples=30)
@given(st.sampled_from(TYPES), st.integers(0, 10**6), st.integers(-3, 3))
def test_triple_symmetric_and_trilinear(typ, seed, k):
    tf = MODELS[typ]
    rng = random.Random(seed)
    A, A2, B, C = (tf_mod.random_class(tf, rng) for _ in range(4))
    v = tf.triple(A, B, C)
    assert v == tf.triple(B, C, A) == tf.triple(C, A, B) == tf.triple(B, A, C)
    assert tf.triple(cadd((k, A), (1, A2)), B, C) == k * v + tf.triple(A2, B, C)


@settings(max_examples=30)
@given(st.sampled_from(TYPES), st.integers(0, 10**6))
def test_rewriting_fundamental_class_is_invisible(typ, seed):
    # S + sum E is the pullback of F; using either spelling gives the same products
    tf = MODELS[typ]
    rng = random.Random(seed)
    A, B = tf_mod.random_class(tf, rng), tf_mod.random_class(tf, rng)
    F = tf_mod.pulled_fundamental(tf)
    spelled = tf.pullback(cadd((1, {"S": 1}), (1, tf_mod.exceptional_sum(tf))))
    assert tf.triple(F, A, B) == tf.triple(spelled, A, B)
