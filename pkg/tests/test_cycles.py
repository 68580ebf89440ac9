import pytest
from hypothesis import given, strategies as st

from anticanon_lab import cycles, picard
from anticanon_lab.cycles import CycleError, node, smooth


def test_type_I_string():
    cfg = cycles.build([smooth(0), smooth(0), smooth(0), smooth(1)])
    assert cycles.canonical_string(cfg) == (-3, -1, -3, -1)


def test_toric_route_reaches_twelve_components():
    cfg = cycles.build([node(0)] * 4)
    assert cfg.m == 12
    assert cycles.canonical_string(cfg) == (-4, -1, -2, -2, -2, -1, -4, -1, -2, -2, -2, -1)


def test_smooth_event_lowers_self_intersection():
    cfg = cycles.apply_event(cycles.base_cycle(), smooth(1))
    assert cfg.self_intersections() == [0, -1, 0, -1]


def test_k5_toric_string():
    cfg = cycles.named_surface("toric-k5")
    assert cycles.canonical_string(cfg) == (-3, -1, -2, -2, -1, -3, -1, -2, -2, -1)


def test_errors():
    with pytest.raises(CycleError):
        cycles.apply_event(cycles.base_cycle(), smooth(9))
    with pytest.raises(CycleError):
        cycles.build([smooth(0)] * 5)
    with pytest.raises(CycleError):
        cycles.named_surface("no-such-surface")
    with pytest.raises(CycleError):
        cycles.BlowupEvent("node", 0, 1)


def test_degree_profiles():
    base = cycles.base_cycle()
    assert cycles.degree_profile(picard.anticanonical(0), base) == ([2, 2, 2, 2], False)
    cfg = cycles.named_surface("type-I")
    assert cycles.degree_profile(picard.anticanonical(4), cfg)[0] == [-1, 1, -1, 1]
    flat = cycles.build([node(3), node(2), smooth(1), smooth(3)])
    assert flat.self_intersections() == [-2] * 8
    assert cycles.degree_profile(picard.anticanonical(4), flat) == ([0] * 8, True)


def test_enumeration_k6_branch():
    rows = cycles.enumerate_scenarios()
    k6 = {r.string for r in rows if r.k == 6}
    assert k6 == {
        (-4, -1, -2, -2, -2, -1, -4, -1, -2, -2, -2, -1),
        (-3, -2, -1, -3, -2, -1, -3, -2, -1, -3, -2, -1),
        (-3, -1, -3, -1, -3, -1, -3, -1, -3, -1, -3, -1),
    }
    assert all(r.toric for r in rows if r.k == 6)
    assert all(len(r.string) % 2 == 0 and 4 <= len(r.string) <= 12 for r in rows)


events = st.lists(
    st.tuples(st.sampled_from(["node", "smooth"]), st.integers(0, 11)), min_size=0, max_size=4)


def _build(evs):
    cfg = cycles.base_cycle()
    for kind, i in evs:
        cfg = cycles.apply_event(cfg, cycles.BlowupEvent(kind, i % cfg.m))
    return cfg


@given(events)
def test_cycle_identities_after_any_events(evs):
    cfg = _build(evs)
    assert cfg.total() == picard.anticanonical(cfg.npairs)
    assert cfg.check()
    prof, _ = cycles.degree_profile(picard.anticanonical(cfg.npairs), cfg)
    assert prof == [s + 2 for s in cfg.self_intersections()]


@given(events, st.sampled_from(["node", "smooth"]), st.integers(0, 11))
def test_event_effects(evs, kind, i):
    cfg = _build(evs[:3])
    i %= cfg.m
    new = cycles.apply_event(cfg, cycles.BlowupEvent(kind, i))
    if kind == "node":
        assert new.m == cfg.m + 2
        assert sum(new.self_intersections()) == sum(cfg.self_intersections()) - 4 - 2
    else:
        assert new.m == cfg.m
        assert sum(new.self_intersections()) == sum(cfg.self_intersections()) - 2


@given(events, st.integers(0, 11), st.booleans())
def test_canonical_string_symmetry_invariant(evs, r, flip):
    cfg = _build(evs)
    seq = cfg.self_intersections()
    r %= len(seq)
    moved = seq[r:] + seq[:r]
    if flip:
        moved = moved[::-1]
    assert cycles.canonical_sequence(moved) == cycles.canonical_string(cfg)
