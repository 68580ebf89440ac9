"""Anticanonical cycles on blowups of P1 x P1 and their blowup events.

The starting configuration is the (1,0),(0,1),(1,0),(0,1) quadrilateral
C1, C2, cC1, cC2.  In the affine chart (x, y) of P1 x P1 these are the lines
x=0, y=0, x=1, y=1.  Every event blows up a conjugate pair of points: either
the node between two adjacent components (a new (-1)-component appears on
both sides) or a general point of a component.

Besides the lattice classes the configuration records where each blown-up
point sits (the cluster), which the bidegree-form oracle in linsys consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from anticanon_lab import picard
from anticanon_lab.picard import DivisorClass, pair

MAX_PAIRS = 4

GENERIC = "generic"
INF = "inf"

Coord = Union[Fraction, str]


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class Site:
    """A point of the quadric or an infinitely near point.

    parent None: `where` is an affine point (x, y) (entries may be GENERIC).
    parent i: `where` is the direction on the exceptional curve of cluster
    point i, a Fraction, INF or GENERIC.  Chart conventions live in linsys.
    """

    parent: Optional[int]
    where: Union[Tuple[Coord, Coord], Coord]


@dataclass(frozen=True)
class ClusterPoint:
    label: str  # "e3" or "ce3"
    site: Site


@dataclass(frozen=True)
class Edge:
    """Intersection of component j and j+1: its site and local axes.

    axis 0 means the component is {u = 0} in local coordinates (u, v),
    axis 1 means {v = 0}.
    """

    site: Site
    axis_left: int
    axis_right: int


@dataclass(frozen=True)
class Component:
    name: str
    cls: DivisorClass
    origin: Tuple[str, object]  # ("line", "C1") or ("exc", cluster index)


@dataclass(frozen=True)
class BlowupEvent:
    kind: str  # "node" or "smooth"
    index: int
    t: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in ("node", "smooth"):
            raise CycleError(f"unknown event kind {self.kind!r}")
        if self.kind == "node" and self.t is not None:
            raise CycleError("node events take no parameter")

    def text(self) -> str:
        if self.kind == "node":
            return f"pair node {self.index}"
        if self.t is None:
            return f"pair smooth {self.index}"
        return f"pair smooth {self.index} t={self.t}"


_LINE_SMOOTH = {
    "C1": (Fraction(0), GENERIC),
    "C2": (GENERIC, Fraction(0)),
    "cC1": (Fraction(1), GENERIC),
    "cC2": (GENERIC, Fraction(1)),
}


@dataclass(frozen=True)
class CycleConfig:
    components: Tuple[Component, ...]
    edges: Tuple[Edge, ...]
    cluster: Tuple[ClusterPoint, ...]
    npairs: int
    events: Tuple[BlowupEvent, ...] = ()

    def __post_init__(self):
        m = len(self.components)
        if m == 2:
            raise CycleError("two-component cycles are excluded")
        if m % 2 or not 4 <= m <= 12:
            raise CycleError(f"cycle length {m} is not even in [4, 12]")
        if len(self.edges) != m:
            raise CycleError("edge count must equal component count")

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def k(self) -> int:
        return self.m // 2

    def classes(self) -> List[DivisorClass]:
        return [c.cls for c in self.components]

    def self_intersections(self) -> List[int]:
        return [pair(c.cls, c.cls) for c in self.components]

    def total(self) -> DivisorClass:
        out = DivisorClass.zero(self.npairs)
        for c in self.components:
            out = out + c.cls
        return out

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise CycleError(f"no component named {name!r}")

    def exceptional(self, label: str) -> DivisorClass:
        return picard.unit(label, self.npairs)

    def check(self):
        """Assert the lattice identities of an anticanonical cycle."""
        m = self.m
        cls = self.classes()
        for i in range(m):
            for j in range(i + 1, m):
                adj = (j == i + 1) or (i == 0 and j == m - 1)
                want = 1 if adj else 0
                got = pair(cls[i], cls[j])
                if got != want:
                    raise CycleError(f"components {i},{j} meet {got} times, expected {want}")
        if self.total() != picard.anticanonical(self.npairs):
            raise CycleError("components do not sum to -K")
        k = self.k
        for i in range(k):
            if picard.conjugate(cls[i]) != cls[i + k]:
                raise CycleError(f"component {i} and {i + k} are not conjugate")
        return True


def base_cycle() -> CycleConfig:
    n = 0
    comps = (
        Component("C1", picard.bidegree(1, 0, n), ("line", "C1")),
        Component("C2", picard.bidegree(0, 1, n), ("line", "C2")),
        Component("cC1", picard.bidegree(1, 0, n), ("line", "cC1")),
        Component("cC2", picard.bidegree(0, 1, n), ("line", "cC2")),
    )
    F0, F1 = Fraction(0), Fraction(1)
    # lines x=c are axis 0 (u = x - c), lines y=c are axis 1
    edges = (
        Edge(Site(None, (F0, F0)), 0, 1),  # C1  - C2
        Edge(Site(None, (F1, F0)), 1, 0),  # C2  - cC1
        Edge(Site(None, (F1, F1)), 0, 1),  # cC1 - cC2
        Edge(Site(None, (F0, F1)), 1, 0),  # cC2 - C1
    )
    return CycleConfig(comps, edges, (), 0)


def _extend(cfg: CycleConfig) -> Tuple[List[Component], int]:
    n = cfg.npairs + 1
    comps = [replace(c, cls=c.cls.extend(n)) for c in cfg.components]
    return comps, n


def _node_children(site_index: int, edge: Edge):
    """Sites of the two new edges after blowing up the node of `edge`.

    Returns (edge between left comp and E, edge between E and right comp).
    Direction 0 continues the {v=0} branch, INF the {u=0} branch; in both
    charts the exceptional curve is the first coordinate axis.
    """
    def child(axis):
        return Site(site_index, Fraction(0) if axis == 1 else INF)

    left = Edge(child(edge.axis_left), 1, 0)
    right = Edge(child(edge.axis_right), 0, 1)
    return left, right


def _node_once(comps, edges, cluster, pos, label, n, e_cls):
    """Blow up the node after component `pos` (in place on lists)."""
    m = len(comps)
    edge = edges[pos]
    idx = len(cluster)
    cluster.append(ClusterPoint(label, edge.site))
    left_edge, right_edge = _node_children(idx, edge)
    nxt = (pos + 1) % m
    comps[pos] = replace(comps[pos], cls=comps[pos].cls - e_cls)
    comps[nxt] = replace(comps[nxt], cls=comps[nxt].cls - e_cls)
    new = Component(label, e_cls, ("exc", idx))
    comps.insert(pos + 1, new)
    edges[pos:pos + 1] = [left_edge, right_edge]


def _smooth_site(comp: Component, t: Optional[Fraction]) -> Site:
    kind, ref = comp.origin
    tag = GENERIC if t is None else Fraction(t)
    if kind == "line":
        x, y = _LINE_SMOOTH[ref]
        if t is not None:
            x = tag if x == GENERIC else x
            y = tag if y == GENERIC else y
        return Site(None, (x, y))
    return Site(ref, tag)


def apply_event(cfg: CycleConfig, ev: BlowupEvent) -> CycleConfig:
    if cfg.npairs >= MAX_PAIRS:
        raise CycleError(f"at most {MAX_PAIRS} conjugate pairs of blowups")
    k, m = cfg.k, cfg.m
    if not 0 <= ev.index < m:
        raise CycleError(f"{ev.kind} index {ev.index} out of range 0..{m - 1}")
    comps, n = _extend(cfg)
    e = picard.unit(f"e{n}", n)
    ce = picard.unit(f"ce{n}", n)
    edges = list(cfg.edges)
    cluster = list(cfg.cluster)
    pos, cpos = ev.index, (ev.index + k) % m
    if ev.kind == "node":
        # the higher position first keeps the lower index valid
        order = [(pos, f"e{n}", e), (cpos, f"ce{n}", ce)]
        order.sort(key=lambda item: -item[0])
        for p, label, cls in order:
            _node_once(comps, edges, cluster, p, label, n, cls)
    else:
        for p, label, cls in ((pos, f"e{n}", e), (cpos, f"ce{n}", ce)):
            site = _smooth_site(comps[p], ev.t)
            cluster.append(ClusterPoint(label, site))
            comps[p] = replace(comps[p], cls=comps[p].cls - cls)
    comps = _rename(comps)
    out = CycleConfig(tuple(comps), tuple(edges), tuple(cluster), n, cfg.events + (ev,))
    out.check()
    return out


def _rename(comps: List[Component]) -> List[Component]:
    k = len(comps) // 2
    out = []
    for i, c in enumerate(comps):
        name = f"C{i + 1}" if i < k else f"cC{i - k + 1}"
        out.append(replace(c, name=name))
    return out


def build(events) -> CycleConfig:
    cfg = base_cycle()
    for ev in events:
        cfg = apply_event(cfg, ev)
    return cfg


def node(i: int) -> BlowupEvent:
    return BlowupEvent("node", i)


def smooth(i: int, t=None) -> BlowupEvent:
    return BlowupEvent("smooth", i, None if t is None else Fraction(t))


# ---------------------------------------------------------------- strings


def canonical_sequence(seq) -> Tuple[int, ...]:
    seq = list(seq)
    m = len(seq)
    best = None
    for s in (seq, seq[::-1]):
        for r in range(m):
            cand = tuple(s[r:] + s[:r])
            if best is None or cand < best:
                best = cand
    return best


def canonical_string(cfg: CycleConfig) -> Tuple[int, ...]:
    return canonical_sequence(cfg.self_intersections())


def format_string(seq) -> str:
    return ",".join(str(s) for s in seq)


def degree_profile(d: DivisorClass, cfg: CycleConfig) -> Tuple[List[int], bool]:
    """Degrees of d on each component; flag True when all vanish."""
    prof = [pair(d, c.cls) for c in cfg.components]
    return prof, all(x == 0 for x in prof)


# ---------------------------------------------------------------- enumeration


@dataclass
class ScenarioSummary:
    string: Tuple[int, ...]
    events: Tuple[BlowupEvent, ...]
    k: int
    h0_anticanonical: Optional[int] = None
    trivial_on_cycle: bool = False
    toric: bool = False
    flags: Dict[str, object] = field(default_factory=dict)


def enumerate_configs(depth: int = MAX_PAIRS) -> Dict[Tuple[int, ...], CycleConfig]:
    """All canonical strings reachable by `depth` conjugate-pair events.

    The search keeps every distinct (string, all-node) state per level; one
    representative configuration per final string is returned.
    """
    level = {(canonical_string(base_cycle()), True): base_cycle()}
    for _ in range(depth):
        nxt = {}
        for (_, toric), cfg in level.items():
            for i in range(cfg.k):
                for ev in (node(i), smooth(i)):
                    new = apply_event(cfg, ev)
                    key = (canonical_string(new), toric and ev.kind == "node")
                    if key not in nxt:
                        nxt[key] = new
        level = nxt
    out: Dict[Tuple[int, ...], CycleConfig] = {}
    # prefer the all-node representative so toric strings carry toric data
    for (s, toric), cfg in sorted(level.items(), key=lambda kv: (kv[0][0], not kv[0][1])):
        out.setdefault(s, cfg)
    return out


def enumerate_scenarios(h0_of=None) -> List[ScenarioSummary]:
    """Exhaustive depth-4 enumeration with flags.

    h0_of(cfg, D) supplies h0 values (linsys.oracle_for_config); when absent
    the h0 flag stays None.
    """
    out = []
    for s, cfg in sorted(enumerate_configs().items()):
        mK = picard.anticanonical(cfg.npairs)
        _, trivial = degree_profile(mK, cfg)
        summary = ScenarioSummary(
            string=s,
            events=cfg.events,
            k=cfg.k,
            trivial_on_cycle=trivial,
            toric=all(ev.kind == "node" for ev in cfg.events),
        )
        if h0_of is not None:
            summary.h0_anticanonical = h0_of(cfg, mK)
        out.append(summary)
    return out


# ---------------------------------------------------------------- named surfaces

# Event sequences for the surfaces that carry the classification.  Indices
# refer to positions in the current cycle (edge j joins components j, j+1).
NAMED_SURFACES = {
    "type-I": [smooth(0), smooth(0), smooth(0), smooth(1)],
    "type-II": [smooth(0), smooth(0), node(3), smooth(1)],
    "type-III": [smooth(0), node(3), node(5), smooth(1)],
    "type-IV": [node(3), node(2), node(3), smooth(1)],
    "k5-smooth-on-third": [node(3), node(2), node(3), smooth(2)],
    "k4-double-on-second": [node(3), node(2), smooth(1), smooth(1)],
    "k4-first-and-third": [node(3), node(2), smooth(0), smooth(2)],
    "toric-k4": [node(3), node(2)],
    "toric-k5": [node(3), node(2), node(3)],
    "toric-4-1-2-2-2-1": [node(0), node(0), node(0), node(0)],
    "toric-3-2-1": [node(0), node(0), node(0), node(1)],
    "toric-3-1": [node(0), node(0), node(0), node(2)],
}


def named_surface(name: str) -> CycleConfig:
    if name not in NAMED_SURFACES:
        raise CycleError(f"unknown surface {name!r}; known: {', '.join(NAMED_SURFACES)}")
    return build(NAMED_SURFACES[name])
