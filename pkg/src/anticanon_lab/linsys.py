"""Linear systems on the cycle surfaces.

Three independent ways to get h0 of a class:
  * stripping negative curves, then Riemann-Roch on the nef residue;
  * bidegree forms on P1 x P1 subject to multiplicity conditions at the
    (possibly infinitely near) cluster points, exact rank over Q;
  * lattice points of the polygon, for toric configurations.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Dict, List, Optional, Sequence, Tuple

from anticanon_lab import picard
from anticanon_lab.cycles import GENERIC, INF, ClusterPoint, CycleConfig, Site
from anticanon_lab.picard import DivisorClass, pair
from anticanon_lab.polyring import rank_of

STRIP_CAP = 64
ORACLE_SAMPLES = 3


class LinSysError(RuntimeError):
    pass


# ---------------------------------------------------------------- catalog


def scenario_catalog(cfg: CycleConfig) -> List[Tuple[str, DivisorClass]]:
    """Negative cycle components plus exceptional curves of smooth blowups.

    Exceptional curves of node blowups are cycle components already.
    """
    cat = [(c.name, c.cls) for c in cfg.components if pair(c.cls, c.cls) < 0]
    node_labels = {c.origin[1] for c in cfg.components if c.origin[0] == "exc"}
    for idx, cp in enumerate(cfg.cluster):
        if idx in node_labels:
            continue
        # last exceptional curve over this point: no later point lies on it
        if any(q.site.parent == idx for q in cfg.cluster):
            continue
        cat.append((cp.label, picard.unit(cp.label, cfg.npairs)))
    return cat


def lattice_of(cfg: CycleConfig) -> picard.SurfaceLattice:
    return picard.SurfaceLattice(cfg.npairs, scenario_catalog(cfg))


# ---------------------------------------------------------------- stripping


@dataclass
class StripResult:
    fixed: DivisorClass
    movable: DivisorClass
    parts: Dict[str, int]
    trace: List[str]

    def fixed_text(self, order: Sequence[str] = ()) -> str:
        names = list(order) + sorted(n for n in self.parts if n not in order)
        out = ""
        for n in names:
            c = self.parts.get(n, 0)
            if not c:
                continue
            term = n if c == 1 else f"{c}{n}"
            out += term if not out else f"+{term}"
        return out or "0"


def strip(d: DivisorClass, lat: picard.SurfaceLattice) -> StripResult:
    """Subtract catalog curves N with D.N < 0, one copy at a time."""
    lat.check(d)
    cur = d
    parts: Dict[str, int] = {}
    trace = []
    for _ in range(STRIP_CAP + 1):
        hit = None
        for name, n in lat.catalog:
            if pair(cur, n) < 0:
                hit = (name, n)
                break
        if hit is None:
            return StripResult(d - cur, cur, parts, trace)
        name, n = hit
        trace.append(f"{name}: degree {pair(cur, n)}, subtract")
        cur = cur - n
        parts[name] = parts.get(name, 0) + 1
        if sum(parts.values()) > STRIP_CAP:
            break
    raise LinSysError("divergent stripping: iteration cap reached, check the catalog")


def is_nef(d: DivisorClass, lat: picard.SurfaceLattice) -> bool:
    return all(pair(d, n) >= 0 for _, n in lat.catalog)


def primitive_part(d: DivisorClass) -> Tuple[int, DivisorClass]:
    g = 0
    for c in d.vector():
        g = gcd(g, abs(c))
    if g == 0:
        return 0, d
    return g, DivisorClass.from_vector([c // g for c in d.vector()])


# ---------------------------------------------------------------- oracle


def _random_value(rng: random.Random, used: set) -> Fraction:
    while True:
        v = Fraction(rng.randint(-97, 97), rng.randint(1, 97))
        if v not in (0, 1) and v not in used:
            used.add(v)
            return v


def realize(cluster: Sequence[ClusterPoint], rng: random.Random) -> List[Site]:
    """Replace GENERIC coordinates by random rationals (distinct, not 0 or 1)."""
    used: set = set()
    out = []
    for cp in cluster:
        s = cp.site
        if s.parent is None:
            x, y = s.where
            x = _random_value(rng, used) if x == GENERIC else x
            y = _random_value(rng, used) if y == GENERIC else y
            out.append(Site(None, (x, y)))
        else:
            w = _random_value(rng, used) if s.where == GENERIC else s.where
            out.append(Site(s.parent, w))
    return out


def _add(target, mono, vec, scale=Fraction(1)):
    row = target.setdefault(mono, {})
    for col, v in vec.items():
        nv = row.get(col, 0) + scale * v
        if nv:
            row[col] = nv
        else:
            row.pop(col, None)


def oracle_h0(bideg: Tuple[int, int], sites: Sequence[Site], mults: Sequence[int]) -> int:
    """dim of bidegree forms whose virtual transforms have the given multiplicities.

    Local charts at an infinitely near point with direction t on the
    exceptional curve of P (local coordinates (u, v) at P):
      finite t:  u = u1, v = u1 (t + w1), new coordinates (u1, w1)
      t = INF:   u = s w, v = s,          new coordinates (s, w)
    The exceptional curve is the first coordinate axis in both charts.
    """
    p, q = bideg
    if p < 0 or q < 0:
        return 0
    ncols = (p + 1) * (q + 1)
    n = len(sites)
    mults = [int(m) for m in mults]
    children: Dict[int, List[int]] = {i: [] for i in range(n)}
    for i, s in enumerate(sites):
        if s.parent is not None:
            if not 0 <= s.parent < i:
                raise LinSysError("cluster parents must precede their children")
            children[s.parent].append(i)
    for i in range(n):
        if mults[i] < 0 and children[i]:
            raise LinSysError(f"negative multiplicity at a non-leaf cluster point {i}")
    eff = [max(m, 0) for m in mults]

    need = [0] * n
    for i in reversed(range(n)):
        need[i] = eff[i] + max((need[c] for c in children[i]), default=0)

    rows: List[Dict[int, Fraction]] = []

    def process(i, g):
        m = eff[i]
        for (a, b), vec in g.items():
            if a + b < m and vec:
                rows.append(dict(vec))
        for c in children[i]:
            t = sites[c].where
            h: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
            for (a, b), vec in g.items():
                if a + b < m or not vec:
                    continue
                base = a + b - m
                if t == INF:
                    if base + a < need[c]:
                        _add(h, (base, a), vec)
                else:
                    t = Fraction(t)
                    for l in range(b + 1):
                        if base + l >= need[c]:
                            break
                        coef = comb(b, l) * t ** (b - l)
                        if coef:
                            _add(h, (base, l), vec, coef)
            process(c, h)

    for i, s in enumerate(sites):
        if s.parent is not None:
            continue
        x0, y0 = (Fraction(v) for v in s.where)
        g: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        # expand x^i y^j at (x0 + u, y0 + v), truncated below need[i]
        for ii in range(p + 1):
            for jj in range(q + 1):
                col = ii * (q + 1) + jj
                for a in range(ii + 1):
                    ca = comb(ii, a) * x0 ** (ii - a)
                    if not ca:
                        continue
                    for b in range(jj + 1):
                        if a + b >= need[i]:
                            break
                        cb = comb(jj, b) * y0 ** (jj - b)
                        if cb:
                            _add(g, (a, b), {col: ca * cb})
        process(i, g)

    dense = [[r.get(c, Fraction(0)) for c in range(ncols)] for r in rows]
    return ncols - rank_of(dense)


def oracle_samples(d: DivisorClass, cfg: CycleConfig, seed: int = 0,
                   samples: int = ORACLE_SAMPLES) -> List[int]:
    """oracle_h0 of a lattice class at several random realizations of the cluster."""
    if d.npairs != cfg.npairs:
        raise LinSysError("class and configuration live on different lattices")
    mults = []
    for cp in cfg.cluster:
        idx = int(cp.label.lstrip("ce")) - 1
        coeff = d.ce[idx] if cp.label.startswith("c") else d.e[idx]
        mults.append(-coeff)
    out = []
    for s in range(samples):
        rng = random.Random(f"{seed}:{s}")
        out.append(oracle_h0((d.f1, d.f2), realize(cfg.cluster, rng), mults))
    return out


def oracle_for_config(cfg: CycleConfig, d: DivisorClass, seed: int = 0) -> int:
    vals = oracle_samples(d, cfg, seed)
    return min(vals)


# ---------------------------------------------------------------- toric


def toric_rays(self_ints: Sequence[int]) -> List[Tuple[int, int]]:
    """Rays of the smooth complete fan whose boundary cycle has these self-intersections."""
    m = len(self_ints)
    v = [(1, 0), (0, 1)]
    for j in range(1, m - 1):
        s = self_ints[j]
        v.append((-s * v[j][0] - v[j - 1][0], -s * v[j][1] - v[j - 1][1]))
    # closing relations at the last and first ray
    for j in (m - 1, 0):
        prev, nxt = v[(j - 1) % m], v[(j + 1) % m]
        s = self_ints[j]
        if (prev[0] + nxt[0], prev[1] + nxt[1]) != (-s * v[j][0], -s * v[j][1]):
            raise LinSysError(f"self-intersections {list(self_ints)} are not those of a toric cycle")
    return v


def toric_h0(rays: Sequence[Tuple[int, int]], coeffs: Sequence[int]) -> int:
    """Lattice points of {u : <u, v_j> >= -a_j}."""
    if len(rays) != len(coeffs):
        raise LinSysError("one coefficient per ray expected")
    # recession cone must be trivial
    for vx, vy in rays:
        for u in ((-vy, vx), (vy, -vx)):
            if all(u[0] * x + u[1] * y >= 0 for x, y in rays):
                raise LinSysError("unbounded polygon: the fan is not complete")
    ineq = [(Fraction(x), Fraction(y), Fraction(-a)) for (x, y), a in zip(rays, coeffs)]
    verts = []
    for i in range(len(ineq)):
        for j in range(i + 1, len(ineq)):
            a1, b1, c1 = ineq[i]
            a2, b2, c2 = ineq[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if all(a * x + b * y >= c for a, b, c in ineq):
                verts.append((x, y))
    if not verts:
        return 0
    import math
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    count = 0
    for x in range(math.floor(min(xs)), math.ceil(max(xs)) + 1):
        for y in range(math.floor(min(ys)), math.ceil(max(ys)) + 1):
            if all(a * x + b * y >= c for a, b, c in ineq):
                count += 1
    return count


def toric_h0_for_class(cfg: CycleConfig, coeffs_on_components: Sequence[int]) -> int:
    return toric_h0(toric_rays(cfg.self_intersections()), coeffs_on_components)


def component_coefficients(d: DivisorClass, cfg: CycleConfig) -> List[int]:
    """Write d as an integer combination of cycle components (toric case)."""
    from anticanon_lab.polyring import null_space

    cls = [c.cls.vector() for c in cfg.components]
    target = d.vector()
    m = len(cls)
    # solve sum a_j cls_j = target: augmented system, null space with last coordinate -1
    rows = [[Fraction(cls[j][r]) for j in range(m)] + [Fraction(-target[r])] for r in range(len(target))]
    basis = null_space(rows, m + 1)
    for vec in basis:
        if vec[m] != 0:
            sol = [x / vec[m] for x in vec[:m]]
            # adjust by kernel vectors not needed: any rational solution; round-trip check
            if all(x.denominator == 1 for x in sol):
                return [int(x) for x in sol]
    raise LinSysError(f"class {d} is not an integral combination of cycle components")


# ---------------------------------------------------------------- h0 and reports

MAP_PENCIL = "composed-with-pencil"
MAP_DEG2 = "degree-two-onto-plane"
MAP_BIRATIONAL = "birational"
MAP_UNCLASSIFIED = "unclassified"


@dataclass
class LinSysReport:
    cls: DivisorClass
    fixed: DivisorClass
    fixed_parts: Dict[str, int]
    movable: DivisorClass
    movable_square: int
    h0: int
    route: str
    oracle_values: List[int]
    toric_value: Optional[int] = None
    trace: List[str] = field(default_factory=list)
    map_kind: Optional[str] = None
    target_dim: Optional[int] = None
    target_note: str = ""
    seed: int = 0
    cluster: List[str] = field(default_factory=list)

    def fixed_text(self, order=()):
        return StripResult(self.fixed, self.movable, self.fixed_parts, []).fixed_text(order)

    def to_dict(self) -> dict:
        return {
            "class": picard.format_class(self.cls),
            "fixed": self.fixed_text(),
            "fixed_class": picard.format_class(self.fixed),
            "movable": picard.format_class(self.movable),
            "movable_square": self.movable_square,
            "h0": self.h0,
            "route": self.route,
            "oracle_values": self.oracle_values,
            "toric_value": self.toric_value,
            "trace": self.trace,
            "map_kind": self.map_kind,
            "target_dim": self.target_dim,
            "target_note": self.target_note,
            "seed": self.seed,
            "cluster": self.cluster,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_markdown(self) -> str:
        d = self.to_dict()
        lines = ["| field | value |", "|---|---|"]
        for key in sorted(d):
            val = d[key]
            if isinstance(val, list):
                val = "; ".join(str(v) for v in val)
            lines.append(f"| {key} | {val} |")
        return "\n".join(lines)


def describe_cluster(cfg: CycleConfig) -> List[str]:
    out = []
    for cp in cfg.cluster:
        s = cp.site
        if s.parent is None:
            out.append(f"{cp.label}: point ({s.where[0]}, {s.where[1]})")
        else:
            out.append(f"{cp.label}: on exceptional curve of {cfg.cluster[s.parent].label}, direction {s.where}")
    return out


def h0(d: DivisorClass, cfg: CycleConfig, seed: int = 0,
       lat: Optional[picard.SurfaceLattice] = None) -> LinSysReport:
    lat = lat or lattice_of(cfg)
    st = strip(d, lat)
    M = st.movable
    mK = picard.anticanonical(cfg.npairs)
    oracle_vals = oracle_samples(d, cfg, seed)
    oracle_val = min(oracle_vals)
    g, P = primitive_part(M)
    if pair(M, mK) > 0 and is_nef(M, lat):
        route, val = "nef-chi", picard.chi(M)
    elif g > 0 and pair(P, P) == 0 and is_nef(P, lat):
        route, val = "pencil-composed", g + 1
    else:
        route, val = "oracle", oracle_val
    if val != oracle_val:
        raise LinSysError(
            f"h0 routes disagree for {d}: {route} gives {val}, oracle gives {oracle_vals}"
        )
    rep = LinSysReport(
        cls=d, fixed=st.fixed, fixed_parts=st.parts, movable=M,
        movable_square=pair(M, M), h0=val, route=route, oracle_values=oracle_vals,
        trace=st.trace, seed=seed, cluster=describe_cluster(cfg),
    )
    if all(ev.kind == "node" for ev in cfg.events):
        try:
            rep.toric_value = toric_h0_for_class(cfg, component_coefficients(M, cfg))
        except LinSysError:
            rep.toric_value = None
        if rep.toric_value is not None and rep.toric_value != val:
            raise LinSysError(f"toric count {rep.toric_value} disagrees with h0 {val} for {d}")
    classify_map(rep)
    return rep


def classify_map(rep: LinSysReport) -> str:
    """Kind of the rational map given by the movable part."""
    M = rep.movable
    g, P = primitive_part(M)
    h = rep.h0
    if g > 1 and pair(P, P) == 0 and h == g + 1:
        rep.map_kind, rep.target_dim, rep.target_note = MAP_PENCIL, 1, f"pencil |{picard.format_class(P)}|"
    elif g >= 1 and pair(P, P) == 0 and h == g + 1:
        rep.map_kind, rep.target_dim, rep.target_note = MAP_PENCIL, 1, "pencil"
    elif h == 3 and rep.movable_square == 2:
        rep.map_kind, rep.target_dim, rep.target_note = MAP_DEG2, 2, "double cover of the plane"
    elif h == 5 and rep.movable_square == 4:
        rep.map_kind, rep.target_dim, rep.target_note = MAP_BIRATIONAL, 4, "quartic surface in 4-space"
    elif h in (5, 7) and rep.movable_square >= h - 1:
        rep.map_kind, rep.target_dim = MAP_BIRATIONAL, h - 1
        rep.target_note = f"surface of degree {rep.movable_square} in {h - 1}-space"
    else:
        rep.map_kind, rep.target_dim, rep.target_note = MAP_UNCLASSIFIED, None, (
            f"h0={h}, M^2={rep.movable_square}"
        )
    return rep.map_kind


def special_class_h0(cfg: CycleConfig, i: int, sign: int = -1, seed: int = 0) -> LinSysReport:
    """h0 of -K + sign*(e_i - ce_i)."""
    n = cfg.npairs
    if not 1 <= i <= n:
        raise LinSysError(f"index {i} outside 1..{n}")
    d = picard.anticanonical(n) + (picard.unit(f"e{i}", n) - picard.unit(f"ce{i}", n)) * sign
    return h0(d, cfg, seed)
