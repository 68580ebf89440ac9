"""Command-line driver: scenario files, reports and the golden check suite."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from anticanon_lab import branch, cycles, linsys, moduli, picard, threefold
from anticanon_lab.cycles import BlowupEvent, CycleConfig, CycleError
from anticanon_lab.picard import LatticeError
from anticanon_lab.polyring import PolyError, parse_poly

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def default_seed() -> int:
    raw = os.environ.get("ANTICANON_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"ANTICANON_SEED must be an integer, got {raw!r}")


class InputError(ValueError):
    pass


class ScenarioError(InputError):
    def __init__(self, lineno: int, token: str, msg: str):
        self.lineno, self.token = lineno, token
        super().__init__(f"line {lineno}: {msg} (at {token!r})")


# ---------------------------------------------------------------- scenarios

BASES = ("quadric-cycle",)
TYPES = ("I", "II", "III", "IV")


@dataclass
class Scenario:
    name: str = "unnamed"
    base: str = "quadric-cycle"
    events: List[BlowupEvent] = field(default_factory=list)
    catalog: List[Tuple[str, str]] = field(default_factory=list)  # (name, class text)
    type_tag: Optional[str] = None
    params: Dict[str, Fraction] = field(default_factory=dict)

    def config(self) -> CycleConfig:
        return cycles.build(self.events)

    def lattice(self, cfg: CycleConfig) -> picard.SurfaceLattice:
        if not self.catalog:
            return linsys.lattice_of(cfg)
        return picard.SurfaceLattice(
            cfg.npairs, [(n, picard.parse_class(t, cfg.npairs)) for n, t in self.catalog])


def _frac_text(v: Fraction) -> str:
    return str(Fraction(v))


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    cfg = cycles.base_cycle()
    seen_base = False
    catalog_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if head == "scenario":
            if len(toks) != 2:
                raise ScenarioError(lineno, line, "expected 'scenario <name>'")
            sc.name = toks[1]
        elif head == "base":
            if len(toks) != 2 or toks[1] not in BASES:
                raise ScenarioError(lineno, toks[-1], f"base must be one of {', '.join(BASES)}")
            if seen_base or sc.events:
                raise ScenarioError(lineno, head, "base must come once, before any pair line")
            seen_base = True
        elif head == "pair":
            ev = _parse_event(lineno, toks)
            try:
                cfg = cycles.apply_event(cfg, ev)
            except CycleError as exc:
                raise ScenarioError(lineno, " ".join(toks[1:3]), str(exc)) from None
            sc.events.append(ev)
        elif head == "catalog":
            if len(toks) < 4 or toks[2] != "=":
                raise ScenarioError(lineno, line, "expected 'catalog <name> = <class>'")
            catalog_lines.append((lineno, toks[1], "".join(toks[3:])))
        elif head == "type":
            if len(toks) != 2 or toks[1] not in TYPES:
                raise ScenarioError(lineno, toks[-1], f"type must be one of {', '.join(TYPES)}")
            sc.type_tag = toks[1]
        elif head == "params":
            for tok in toks[1:]:
                key, sep, val = tok.partition("=")
                if not sep or key not in ("a", "a1", "a2"):
                    raise ScenarioError(lineno, tok, "expected a=<rational>, a1=... or a2=...")
                try:
                    sc.params[key] = Fraction(val)
                except (ValueError, ZeroDivisionError):
                    raise ScenarioError(lineno, tok, "not a rational number") from None
        else:
            raise ScenarioError(lineno, head, "unknown directive")
    names = set()
    for lineno, name, cls_text in catalog_lines:
        if name in names:
            raise ScenarioError(lineno, name, "duplicate catalog name")
        names.add(name)
        try:
            d = picard.parse_class(cls_text, cfg.npairs)
        except LatticeError as exc:
            raise ScenarioError(lineno, cls_text, str(exc)) from None
        if picard.pair(d, d) >= 0:
            raise ScenarioError(lineno, name, "catalog curves need negative self-intersection")
        sc.catalog.append((name, picard.format_class(d)))
    return sc


def _parse_event(lineno: int, toks: Sequence[str]) -> BlowupEvent:
    if len(toks) < 3 or toks[1] not in ("node", "smooth"):
        raise ScenarioError(lineno, " ".join(toks), "expected 'pair node <i>' or 'pair smooth <i> [t=<q>]'")
    try:
        idx = int(toks[2])
    except ValueError:
        raise ScenarioError(lineno, toks[2], "index must be an integer") from None
    t = None
    if len(toks) > 3:
        if toks[1] != "smooth" or len(toks) != 4 or not toks[3].startswith("t="):
            raise ScenarioError(lineno, toks[3], "only smooth events take t=<rational>")
        try:
            t = Fraction(toks[3][2:])
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(lineno, toks[3], "not a rational number") from None
    try:
        return BlowupEvent(toks[1], idx, t)
    except CycleError as exc:
        raise ScenarioError(lineno, toks[1], str(exc)) from None


def serialize_scenario(sc: Scenario) -> str:
    out = [f"scenario {sc.name}", f"base {sc.base}"]
    out += [ev.text() for ev in sc.events]
    out += [f"catalog {n} = {c}" for n, c in sc.catalog]
    if sc.type_tag:
        out.append(f"type {sc.type_tag}")
    if sc.params:
        out.append("params " + " ".join(f"{k}={_frac_text(v)}" for k, v in sorted(sc.params.items())))
    return "\n".join(out) + "\n"


def normalize_scenario(text: str) -> str:
    return serialize_scenario(parse_scenario(text))


# ---------------------------------------------------------------- check suite


@dataclass
class Check:
    id: str
    anchor: str
    expected: object
    computed: object
    passed: bool

    def to_dict(self):
        return {"id": self.id, "anchor": self.anchor, "expected": _jsonable(self.expected),
                "computed": _jsonable(self.computed), "passed": self.passed}


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class CheckReport:
    checks: List[Check]
    seed: int
    filter: Optional[str] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    def to_dict(self):
        return {"checks": [c.to_dict() for c in self.checks],
                "summary": {"total": len(self.checks), "passed": self.passed, "failed": self.failed},
                "seed": self.seed, "filter": self.filter, "warnings": self.warnings}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    def to_markdown(self) -> str:
        lines = [f"seed: {self.seed}", "", "| id | anchor | expected | computed | result |",
                 "|---|---|---|---|---|"]
        for c in self.checks:
            lines.append(f"| {c.id} | {c.anchor} | {_jsonable(c.expected)} | {_jsonable(c.computed)} | "
                         f"{'pass' if c.passed else 'FAIL'} |")
        lines.append("")
        lines.append(f"{self.passed} passed, {self.failed} failed")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"seed: {self.seed}"]
        for c in self.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'} {c.id}: expected {_jsonable(c.expected)}, "
                         f"computed {_jsonable(c.computed)}  [{c.anchor}]")
        lines.append(f"{self.passed} passed, {self.failed} failed")
        return "\n".join(lines) + "\n"


@dataclass
class CheckSpec:
    id: str
    anchor: str
    expected: object
    compute: Callable[[int], object]
    cmp: str = "eq"  # "eq" or "ge"

    def run(self, seed: int) -> Check:
        got = self.compute(seed)
        ok = got == self.expected if self.cmp == "eq" else got >= self.expected
        exp = self.expected if self.cmp == "eq" else f">= {self.expected}"
        return Check(self.id, self.anchor, exp, got, bool(ok))


class _Cache:
    """Memoises the expensive shared computations of one suite run."""

    def __init__(self):
        self.store = {}

    def get(self, key, fn):
        if key not in self.store:
            self.store[key] = fn()
        return self.store[key]


# label, named surface, expected h0(2(-K)), anchor
H0_TABLE = [
    ("(-3,-2,-1)x4", "toric-3-2-1", 5, "h0(2(-K)) = 5 on the toric k=6 surface (-3,-2,-1)x4"),
    ("(-3,-1)x6", "toric-3-1", 7, "h0(2(-K)) = 7 on the toric k=6 surface (-3,-1)x6"),
    ("(-3,-2,-2,-2,-1)x2", "type-IV", 3, "h0(2(-K)) = 3 on the k=5 surface of type IV"),
    ("(-3,-1,-3,-2,-1)x2", "k5-smooth-on-third", 5, "h0(2(-K)) = 5 on the non-toric birational k=5 surface"),
    ("(-3,-1)x4 k=4", "k4-first-and-third", 5, "h0(2(-K)) = 5 on the birational k=4 surface"),
    ("(-2,-3,-2,-1)x2", "k4-double-on-second", 3, "h0(2(-K)) = 3 on the conic bundle k=4 surface"),
    ("(-3,-2,-2,-1)x2", "type-III", 3, "h0(2(-K)) = 3 on the surface of type III"),
    ("(-3,-2,-1)x2", "type-II", 3, "h0(2(-K)) = 3 on the surface of type II"),
    ("(-3,-1)x2", "type-I", 3, "h0(2(-K)) = 3 on the surface of type I"),
]

STRINGS = {
    "type-I": (-3, -1, -3, -1),
    "type-II": (-3, -2, -1, -3, -2, -1),
    "type-III": (-3, -2, -2, -1, -3, -2, -2, -1),
    "type-IV": (-3, -2, -2, -2, -1, -3, -2, -2, -2, -1),
    "toric-k5": (-3, -1, -2, -2, -1, -3, -1, -2, -2, -1),
    "k5-smooth-on-third": cycles.canonical_sequence((-3, -1, -3, -2, -1, -3, -1, -3, -2, -1)),
    "k4-first-and-third": (-3, -1, -3, -1, -3, -1, -3, -1),
    "k4-double-on-second": cycles.canonical_sequence((-2, -3, -2, -1, -2, -3, -2, -1)),
}

K6_STRINGS = {
    (-4, -1, -2, -2, -2, -1, -4, -1, -2, -2, -2, -1),
    (-3, -2, -1, -3, -2, -1, -3, -2, -1, -3, -2, -1),
    (-3, -1, -3, -1, -3, -1, -3, -1, -3, -1, -3, -1),
}


def _h0_report(cache, surf, seed, d=None):
    cfg = cycles.named_surface(surf)
    d = d if d is not None else picard.anticanonical(cfg.npairs) * 2
    return cache.get(("h0", surf, str(d), seed), lambda: linsys.h0(d, cfg, seed))


def _elim(cache, typ):
    return cache.get(("elim", typ), lambda: threefold.eliminate(typ))


def _constraints(cache, typ, seed):
    return cache.get(("quadrics", typ, seed), lambda: branch.constraint_report(typ, seed))


def _images(cache, typ):
    return {i.sheet: f"{i.kind} {i.target}".strip() for i in _elim(cache, typ).images}


def _scenarios(cache):
    return cache.get("scen", lambda: cycles.enumerate_scenarios(linsys.oracle_for_config))


def build_suite(cache: Optional[_Cache] = None) -> List[CheckSpec]:
    c = cache or _Cache()
    S: List[CheckSpec] = []

    def add(id_, anchor, expected, fn, cmp="eq"):
        S.append(CheckSpec(id_, anchor, expected, fn, cmp))

    # polyring
    from anticanon_lab.polyring import LinearIdeal, reduce, quadratic_rank
    add("polyring.scroll-reduces", "z0^2 - z1 z2 vanishes on the scroll", True,
        lambda s: reduce(parse_poly("z0^2 - z1*z2"), LinearIdeal([], include_scroll=True)).is_zero())
    add("polyring.rank-z2z3+z4^2", "rank of z2 z3 + z4^2 in z2, z3, z4", 3,
        lambda s: quadratic_rank(parse_poly("z2*z3 + z4^2"), ["z2", "z3", "z4"], seed=s))

    # picard
    def square_and_genus(s):
        cfg = cycles.named_surface("k4-first-and-third")
        B = sum((cfg.components[i].cls for i in (0, 2, 4, 6)), picard.DivisorClass.zero(cfg.npairs))
        D = picard.anticanonical(cfg.npairs) * 2 - B
        return [picard.pair(D, D), picard.genus(D)]

    add("picard.square-and-genus", "(2(-K)-B)^2 = 4 and genus 1 on (-3,-1)x4", [4, 1], square_and_genus)

    def twist_pairing(s):
        cfg = cycles.named_surface("type-II")
        n = cfg.npairs
        D = picard.anticanonical(n) - (picard.unit("e1", n) - picard.unit("ce1", n))
        return picard.pair(D, cfg.components[0].cls)

    add("picard.twist-against-C1", "(-K-(e1-ce1)).C1 = -2 on the type II surface", -2, twist_pairing)
    add("picard.chi-anticanonical", "chi(-K) = 1 with eight blowups", 1,
        lambda s: picard.chi(picard.anticanonical(4)))

    # cycles
    add("cycles.k6-strings", "exactly three toric strings with k=6", sorted(K6_STRINGS),
        lambda s: sorted(x.string for x in _scenarios(c) if x.k == 6))
    add("cycles.k6-h0-anticanonical", "h0(-K) = 3 on (-4,-1,-2,-2,-2,-1)x2", 3,
        lambda s: next(x.h0_anticanonical for x in _scenarios(c)
                       if x.string == (-4, -1, -2, -2, -2, -1, -4, -1, -2, -2, -2, -1)))
    add("cycles.even-lengths", "every cycle length is even in [4,12]", True,
        lambda s: all(len(x.string) % 2 == 0 and 4 <= len(x.string) <= 12 for x in _scenarios(c)))
    for surf, want in STRINGS.items():
        add(f"cycles.string.{surf}", f"self-intersection string of the {surf} surface", list(want),
            lambda s, surf=surf: list(cycles.canonical_string(cycles.named_surface(surf))))

    def trivial_k4(s):
        cfg = cycles.build([cycles.node(3), cycles.node(2), cycles.smooth(1), cycles.smooth(3)])
        return cycles.degree_profile(picard.anticanonical(cfg.npairs), cfg)[1]

    add("cycles.all-minus-two-trivial", "-K is trivial on the all (-2) k=4 cycle", True, trivial_k4)
    add("cycles.type-I-degrees", "-K has degrees (-1,1,-1,1) on the type I cycle", [-1, 1, -1, 1],
        lambda s: cycles.degree_profile(picard.anticanonical(4), cycles.named_surface("type-I"))[0])

    # linsys
    for label, surf, want, anchor in H0_TABLE:
        add(f"linsys.h0.{surf}", anchor, want, lambda s, surf=surf: _h0_report(c, surf, s).h0)
        add(f"linsys.oracle.{surf}", f"three generic oracle samples agree on {label}", [want] * 3,
            lambda s, surf=surf: _h0_report(c, surf, s).oracle_values)
    for surf, want in (("toric-3-2-1", 5), ("toric-3-1", 7)):
        add(f"linsys.toric.{surf}", f"lattice-point count equals h0 on {surf}", want,
            lambda s, surf=surf: _h0_report(c, surf, s).toric_value)
    add("linsys.h0-2F-values", "h0(2F) = h0(2(-K)) + 2 takes the values 5, 7, 9", [5, 7, 9],
        lambda s: sorted({_h0_report(c, surf, s).h0 + 2 for _, surf, _, _ in H0_TABLE}))
    for surf, want in (("k4-first-and-third", "C1+C3+cC1+cC3"),
                       ("k4-double-on-second", "C1+2C2+C3+cC1+2cC2+cC3"),
                       ("type-IV", "C1+C2+C3+C4+cC1+cC2+cC3+cC4"),
                       ("k5-smooth-on-third", "C1+C3+C4+cC1+cC3+cC4")):
        add(f"linsys.fixed.{surf}", f"fixed part of |2(-K)| on {surf}", want,
            lambda s, surf=surf: _h0_report(c, surf, s).fixed_text())
    for surf, want in (("k4-double-on-second", linsys.MAP_PENCIL),
                       ("type-IV", linsys.MAP_DEG2),
                       ("k4-first-and-third", linsys.MAP_BIRATIONAL)):
        add(f"linsys.map.{surf}", f"bi-anticanonical map kind on {surf}", want,
            lambda s, surf=surf: _h0_report(c, surf, s).map_kind)
    for typ, idxs in (("type-I", (1, 2, 3)), ("type-II", (1, 2)), ("type-III", (1,))):
        for i in idxs:
            add(f"linsys.special.{typ}.{i}", f"|-K-(e{i}-ce{i})| has a single member on {typ}", 1,
                lambda s, typ=typ, i=i: linsys.special_class_h0(cycles.named_surface(typ), i, seed=s).h0)
    add("linsys.oracle-empty", "bidegree (2,2) forms without conditions", 9,
        lambda s: linsys.oracle_h0((2, 2), [], []))

    # threefold
    def nc(key):
        return lambda s: c.get("nc", threefold.nc_checks)[key]

    nck = c.get("nc", threefold.nc_checks)
    for key in nck:
        want = 0
        if key.startswith("(2F-E)^2.") and key.endswith("F"):
            want = 4 * int(key[len("(2F-E)^2."):-1])
        add(f"threefold.nc.{key}", f"intersection number {key} on the blown-up twistor space", want, nc(key))
    restrictions = {
        "I": {"E1": "(1,1) - D1 - cD2", "E2": "0"},
        "II": {"E1": "(1,0) - cD3", "E2": "(1,1) - D2", "E3": "0"},
        "III": {"E1": "(1,0) - cD4", "E2": "(1,0)", "E3": "(1,1) - D3", "E4": "0"},
        "IV": {"E1": "(1,0) - cD5", "E2": "(1,0)", "E3": "(1,0)", "E4": "(1,1) - D4", "E5": "0"},
    }
    for typ, table in restrictions.items():
        add(f"threefold.{typ}.stage1", f"restrictions of the first system, type {typ}", table,
            lambda s, typ=typ: _elim(c, typ).stage1)
    second = {
        "II": {"E1": "0", "E2": "(1,1) - D2 - xW1", "E3": "0"},
        "III": {"E1": "0", "E2": "0", "E3": "(1,1) - D3 - xW2", "E4": "0"},
        "IV": {"E1": "0", "E2": "0", "E3": "0", "E4": "(1,1) - D4 - xW3", "E5": "0"},
    }
    for typ, table in second.items():
        add(f"threefold.{typ}.stage2", f"restrictions of the second system to E_i, type {typ}", table,
            lambda s, typ=typ: {k: v for k, v in _elim(c, typ).stage2.items() if k.startswith("E")})
    for typ, half, want in (("II", "S3-", "cE1 + E2 + 2E3"), ("IV", "S5-", "cE1 + E4 + 2E5")):
        add(f"threefold.{typ}.half", f"second system on {half}, type {typ}", want,
            lambda s, typ=typ, half=half: _elim(c, typ).formal2[half])
    base = {
        "I": [],
        "II": ["S3-∩E1", "S3+∩cE1"],
        "III": ["S4-∩E1", "S4+∩cE1", "S4-∩E2", "S4+∩cE2"],
        "IV": ["S5-∩E1", "S5+∩cE1", "S5-∩E2", "S5+∩cE2", "S5-∩E3", "S5+∩cE3"],
    }
    for typ, want in base.items():
        add(f"threefold.{typ}.base-curves", f"base curves of the first system, type {typ}", want,
            lambda s, typ=typ: [n for n, _ in _elim(c, typ).base1])
        add(f"threefold.{typ}.free", f"final system is base point free, type {typ}", True,
            lambda s, typ=typ: _elim(c, typ).free)
        add(f"threefold.{typ}.path-independence", f"triple products agree on every path, type {typ}", 100,
            lambda s, typ=typ: threefold.path_check(
                threefold.stage_two(typ)[0] if typ != "I" else threefold.stage_one(typ), 100, s))
    add("threefold.I.images", "E1, cE1 to the ridge, E2, cE2 to q, q-bar, halves onto planes",
        {"E1": "line ridge", "cE1": "line ridge", "E2": "point q", "cE2": "point cq",
         "S1+": "surface plane P1", "S2-": "surface plane P2"},
        lambda s: {k: v for k, v in _images(c, "I").items() if k in ("E1", "cE1", "E2", "cE2", "S1+", "S2-")})
    add("threefold.I.conics", "twistor lines map to conics, type I", {"L1": 2, "L2": 2},
        lambda s: _elim(c, "I").conics)
    for typ, k in (("II", 3), ("III", 4), ("IV", 5)):
        add(f"threefold.{typ}.distinct-lines", f"S{k}+ and S{k}- map to distinct lines, type {typ}",
            [f"line line of S{k}+", f"line line of S{k}-"],
            lambda s, typ=typ, k=k: [_images(c, typ)[f"S{k}+"], _images(c, typ)[f"S{k}-"]])
        add(f"threefold.{typ}.plane", f"the last second-stage divisor maps onto P{k}, type {typ}",
            f"surface plane P{k}", lambda s, typ=typ, k=k: _images(c, typ)[f"W{k - 2}"])

    # branch
    for typ, want in zip(TYPES, (26, 18, 10, 2)):
        add(f"branch.{typ}.incidence", f"total intersection of the double curves, type {typ}", want,
            lambda s, typ=typ: branch.incidence_table(typ).total)
    add("branch.lambda-multiplicities", "z0(z0-z1) vanishes to order 2, 3, 4 at the split fiber",
        [2, 3, 4], lambda s: [branch.conic_zero_multiplicities(t)[("0", "0", "1")] for t in ("II", "III", "IV")])
    for label in branch.SELECTION_SURFACES:
        add(f"branch.selection.{label}", f"{label} is a member of |2F| at lattice level", True,
            lambda s, label=label: branch.selection_found(label))
    for name, _ in branch.relation_profiles().items():
        add(f"branch.relation.{name}", f"relation {name} between reducible members", True,
            lambda s, name=name: branch.relation_profiles()[name])
    for typ in TYPES:
        add(f"branch.{typ}.quartic", f"sample quadric passes every branch validation, type {typ}", True,
            lambda s, typ=typ: all(x.passed for x in branch.fixture_model(typ, s).checks))
    minimums = {"I": [("8 points", 6, "eq"), ("C3∩C4", 2, "ge")], "II": [("12 points", 2, "ge")],
                "III": [("(a),(b),(c)", 2, "ge")], "IV": [("(a),(b),(c')", 5, "ge")]}
    for typ, stages in minimums.items():
        for stage, want, cmp in stages:
            add(f"branch.{typ}.quadrics.{stage}", f"quadrics through the double-curve data, type {typ}",
                want, lambda s, typ=typ, stage=stage: dict(_constraints(c, typ, s).dims)[stage], cmp)
        add(f"branch.{typ}.containment", f"a quadric other than the scroll contains all double curves, type {typ}",
            True, lambda s, typ=typ: _constraints(c, typ, s).certified)

    # moduli
    add("moduli.chi-theta-Z", "chi(Theta_Z) = 15 - 7n at n = 4", -13, lambda s: moduli.chi_theta_Z(4))
    dd = moduli.diagram_dims()
    add("moduli.h1-theta-Z", "h1(Theta_Z) = 13", 13, lambda s: dd.h1_theta_Z)
    add("moduli.h1-theta-ZS", "h1(Theta_{Z,S}) = 14", 14, lambda s: moduli.diagram_dims().h1_theta_ZS)
    add("moduli.h1-theta-Z-S", "h1(Theta_Z(-S)) = 4", 4, lambda s: moduli.diagram_dims().h1_theta_Z_minus_S)
    add("moduli.h1-theta-S", "h1(Theta_S) = 10 from chi = 2K^2 - 10", -10, lambda s: moduli.chi_theta_S(0))
    want_table = {"toric k=6": 3, "birational k=5": 4, "type IV": 4, "birational k=4": 5, "type III": 5,
                  "conic bundle k=4": 6, "type II": 7, "type I": 9}
    for label, want in want_table.items():
        add(f"moduli.table.{label}", f"moduli dimension of the {label} row", want,
            lambda s, label=label: next(moduli.moduli_dim(x) for x in moduli.table_cases() if x.label == label))
    add("moduli.campana-kreussler", "moduli dimension with h0(-K) = 2", 9, lambda s: moduli.moduli_dim(moduli.ck_case()))
    return S


def paper_check(filter: Optional[str] = None, seed: Optional[int] = None) -> CheckReport:
    seed = default_seed() if seed is None else seed
    suite = build_suite()
    warnings = []
    if filter:
        suite = [sp for sp in suite if filter in sp.id]
        if not suite:
            warnings.append(f"no checks match filter {filter!r}")
    return CheckReport([sp.run(seed) for sp in suite], seed, filter, warnings)


# ---------------------------------------------------------------- commands


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def cmd_enumerate(args, out) -> int:
    rows = cycles.enumerate_scenarios(lambda cfg, d: linsys.oracle_for_config(cfg, d, args.seed))
    if args.json:
        out.write(_dump({"seed": args.seed, "scenarios": [
            {"string": list(r.string), "k": r.k, "toric": r.toric, "h0_anticanonical": r.h0_anticanonical,
             "trivial_on_cycle": r.trivial_on_cycle, "events": [e.text() for e in r.events]} for r in rows]}))
        return EXIT_OK
    out.write(f"seed: {args.seed}\n")
    for r in rows:
        flags = []
        if r.toric:
            flags.append("toric")
        if r.trivial_on_cycle:
            flags.append("-K trivial on C")
        out.write(f"k={r.k} ({cycles.format_string(r.string)}) h0(-K)={r.h0_anticanonical}"
                  + (f" [{', '.join(flags)}]" if flags else "") + "\n")
    return EXIT_OK


def cmd_surface(args, out) -> int:
    sc = parse_scenario(_read(args.file))
    cfg = sc.config()
    try:
        d = picard.parse_class(args.cls, cfg.npairs)
    except LatticeError as exc:
        raise InputError(f"--class: {exc}") from None
    rep = linsys.h0(d, cfg, args.seed, sc.lattice(cfg))
    if args.md:
        out.write(rep.to_markdown() + "\n")
    else:
        data = rep.to_dict()
        data["scenario"] = sc.name
        data["string"] = list(cycles.canonical_string(cfg))
        out.write(_dump(data))
    return EXIT_OK


def cmd_threefold(args, out) -> int:
    rep = threefold.eliminate(args.type)
    if args.json:
        out.write(_dump(rep.to_dict()))
    else:
        out.write(rep.to_text() + "\n")
    return EXIT_OK


def cmd_branch(args, out) -> int:
    typ = args.type
    if args.q:
        data = branch.parse_poly_file(_read(args.q))
        if data.get("type", typ) != typ:
            raise InputError(f"{args.q} is for type {data['type']}, not {typ}")
        f = data.get("f")
        if typ == "I" and f is None:
            f = parse_poly(branch.FIXTURE_F)
        model = branch.quartic_checks(typ, data["Q"], f, data["params"] or None, args.seed)
    else:
        model = branch.fixture_model(typ, args.seed)
    res = model.to_dict()
    res["seed"] = args.seed
    res["incidence"] = branch.incidence_table(typ).to_dict()
    if args.quadrics:
        res["quadrics"] = branch.constraint_report(typ, args.seed).to_dict()
    out.write(_dump(res))
    return EXIT_OK if res["all_passed"] else EXIT_FAIL


def cmd_moduli(args, out) -> int:
    out.write(moduli.table_markdown())
    return EXIT_OK


def cmd_paper_check(args, out) -> int:
    rep = paper_check(args.filter, args.seed)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.json:
        out.write(rep.to_json() + "\n")
    elif args.md:
        out.write(rep.to_markdown())
    else:
        out.write(rep.to_text())
    return EXIT_OK if rep.failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anticanon-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="all anticanonical cycles after four pairs of blowups")
    e.add_argument("--json", action="store_true")
    e.set_defaults(run=cmd_enumerate)

    s = sub.add_parser("surface", help="linear system report for a class on a scenario surface")
    s.add_argument("file")
    s.add_argument("--class", dest="cls", required=True, help="e.g. -2K or 2f1+2f2-e1-ce1")
    s.add_argument("--md", action="store_true", help="Markdown instead of JSON")
    s.set_defaults(run=cmd_surface)

    t = sub.add_parser("threefold", help="base locus elimination report")
    t.add_argument("type", choices=TYPES)
    t.add_argument("--json", action="store_true")
    t.set_defaults(run=cmd_threefold)

    b = sub.add_parser("branch", help="validate a branch quartic (sample quadric by default)")
    b.add_argument("type", choices=TYPES)
    b.add_argument("--q", metavar="POLYFILE")
    b.add_argument("--quadrics", action="store_true", help="add the quadric dimension counts")
    b.set_defaults(run=cmd_branch)

    m = sub.add_parser("moduli", help="moduli dimension table")
    m.set_defaults(run=cmd_moduli)

    c = sub.add_parser("paper-check", help="run the golden check suite")
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--md", action="store_true")
    c.add_argument("--filter", help="keep checks whose id contains this string")
    c.set_defaults(run=cmd_paper_check)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        args.seed = default_seed()
        return args.run(args, out)
    except (InputError, CycleError, LatticeError, PolyError, branch.BranchError,
            threefold.ThreefoldError, moduli.ModuliError, linsys.LinSysError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
