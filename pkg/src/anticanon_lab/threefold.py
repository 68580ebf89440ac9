"""Intersection theory on the blown-up twistor space, sheet by sheet.

A threefold is modelled by a list of sheets (divisors).  Every "real" sheet
carries a Picard lattice and the table records the restriction of each
generator divisor to it.  "Formal" sheets (the two halves S_i+ and S_i- of
the reducible fibers) have no lattice; they only appear as restrictions.

Triple products D1.D2.D3 are evaluated by expanding one factor into sheets
and pairing the restrictions of the other two on each sheet.  Every factor
that consists of real sheets gives a path; all paths must agree.

Naming in tables:
  S           generic fiber of the pencil (class of the pulled-back O(1))
  E<i>, cE<i> exceptional divisors over C_i and its conjugate
  S<i>+/-     halves of the fiber through the twistor line L_i
  W<j>, cW<j> exceptional divisors of the second-stage curve blowups
On an E-sheet (a copy of P1 x P1, possibly blown up) classes are written
(a,b) + points: (1,0) is the section cut by S, (0,1) the fiber over C_i,
D<i>/cD<i> are the curves created by the small resolutions and x<W> the
curve cut by a second-stage divisor W.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from anticanon_lab import picard
from anticanon_lab.cycles import CycleConfig, named_surface


class ThreefoldError(ValueError):
    pass


O10 = "(1,0)"
O01 = "(0,1)"

Cls = Dict[str, int]


def cadd(*terms) -> Cls:
    """cadd((coef, cls), ...) -> sparse sum with zero entries dropped."""
    out: Cls = {}
    for coef, c in terms:
        for k, v in c.items():
            out[k] = out.get(k, 0) + coef * v
    return {k: v for k, v in out.items() if v}


def conj_name(name: str) -> str:
    """Real structure on generator, sheet and basis names."""
    if name in ("S", O10, O01, "f", "s", "f1", "f2"):
        return name
    m = re.fullmatch(r"S(\d+)([+-])", name)
    if m:
        return f"S{m.group(1)}{'-' if m.group(2) == '+' else '+'}"
    m = re.fullmatch(r"(x?)(c?)([A-Za-z]+\d*(?:_\d+)?)", name)
    if m and m.group(3)[0] in "EDWe":
        return m.group(1) + ("" if m.group(2) else "c") + m.group(3)
    if re.fullmatch(r"L\d+", name):
        return name
    raise ThreefoldError(f"no conjugate rule for {name!r}")


def conj_cls(c: Cls) -> Cls:
    return {conj_name(k): v for k, v in c.items()}


@dataclass
class SheetLattice:
    name: str
    basis: List[str]
    gram: Dict[Tuple[str, str], int] = field(default_factory=dict)

    def product(self, a: str, b: str) -> int:
        if (a, b) in self.gram:
            return self.gram[(a, b)]
        return self.gram.get((b, a), 0)

    def pair(self, x: Cls, y: Cls) -> int:
        for c in (x, y):
            for k in c:
                if k not in self.basis:
                    raise ThreefoldError(f"{k} is not in the lattice of {self.name}")
        return sum(u * v * self.product(a, b) for a, u in x.items() for b, v in y.items())

    def add_points(self, names: List[str]):
        for n in names:
            self.basis.append(n)
            self.gram[(n, n)] = -1

    def copy(self) -> "SheetLattice":
        return SheetLattice(self.name, list(self.basis), dict(self.gram))


def quadric_lattice(name: str, points: List[str]) -> SheetLattice:
    lat = SheetLattice(name, [O10, O01], {(O10, O01): 1})
    lat.add_points(points)
    return lat


def surface_lattice(cfg: CycleConfig) -> SheetLattice:
    n = cfg.npairs
    names = ["f1", "f2"] + [f"e{i + 1}" for i in range(n)] + [f"ce{i + 1}" for i in range(n)]
    lat = SheetLattice("S", names, {("f1", "f2"): 1})
    for nm in names[2:]:
        lat.gram[(nm, nm)] = -1
    return lat


def surface_cls(d: picard.DivisorClass) -> Cls:
    n = d.npairs
    names = ["f1", "f2"] + [f"e{i + 1}" for i in range(n)] + [f"ce{i + 1}" for i in range(n)]
    return {nm: v for nm, v in zip(names, d.vector()) if v}


@dataclass
class Blowup:
    center: str
    containers: Tuple[str, str]
    divisor: str


@dataclass
class Threefold:
    label: str
    sheets: Dict[str, SheetLattice]
    formal: List[str]
    table: Dict[Tuple[str, str], Cls]
    twistor_lines: Dict[str, Cls] = field(default_factory=dict)
    line_inside: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    blowups: List[Blowup] = field(default_factory=list)
    k: int = 0

    # -- bookkeeping

    @property
    def generators(self) -> List[str]:
        return list(self.sheets) + list(self.formal)

    def is_real(self, name: str) -> bool:
        return name in self.sheets

    def copy(self) -> "Threefold":
        return Threefold(
            self.label, {k: v.copy() for k, v in self.sheets.items()}, list(self.formal),
            {k: dict(v) for k, v in self.table.items()},
            {k: dict(v) for k, v in self.twistor_lines.items()}, dict(self.line_inside),
            list(self.blowups), self.k,
        )

    def entry(self, gen: str, sheet: str) -> Cls:
        if sheet not in self.sheets:
            raise ThreefoldError(f"{sheet} is not a sheet with a lattice")
        if (gen, sheet) not in self.table:
            raise ThreefoldError(f"no restriction of {gen} to {sheet} in the table")
        return self.table[(gen, sheet)]

    # -- restriction and products

    def restrict(self, G: Cls, sheet: str) -> Cls:
        if sheet in self.sheets:
            return cadd(*[(c, self.entry(g, sheet)) for g, c in G.items()])
        if sheet in self.formal:
            return self.formal_restriction(G, sheet)
        raise ThreefoldError(f"unknown sheet {sheet!r}")

    def formal_restriction(self, G: Cls, sheet: str) -> Cls:
        """Restriction to a fiber half as a sum of curves named by the cutting sheet.

        The pulled-back hyperplane S restricts trivially to any fiber component.
        """
        out: Cls = {}
        for g, c in G.items():
            if g == "S" or not c:
                continue
            if g in self.formal:
                raise ThreefoldError(f"cannot restrict the formal sheet {g} to {sheet}")
            if self.entry(sheet, g):
                out[g] = out.get(g, 0) + c
        return {k: v for k, v in out.items() if v}

    def expansions(self, factors) -> List[Tuple[int, int]]:
        out = []
        for i, F in enumerate(factors):
            if any(g not in self.sheets for g in F):
                continue
            rest = [factors[j] for j in range(3) if j != i]
            val = 0
            for g, c in F.items():
                if not c:
                    continue
                lat = self.sheets[g]
                val += c * lat.pair(self.restrict(rest[0], g), self.restrict(rest[1], g))
            out.append((i, val))
        return out

    def triple(self, A: Cls, B: Cls, C: Cls) -> int:
        paths = self.expansions([A, B, C])
        if not paths:
            raise ThreefoldError("no factor consists of sheets with lattices")
        vals = {v for _, v in paths}
        if len(vals) > 1:
            raise ThreefoldError(f"path dependence: {paths}")
        return paths[0][1]

    def pullback(self, G: Cls, since: int = 0) -> Cls:
        """Total transform through the curve blowups recorded after index `since`."""
        out = dict(G)
        for bl in self.blowups[since:]:
            m = sum(out.get(x, 0) for x in bl.containers)
            if m:
                out[bl.divisor] = out.get(bl.divisor, 0) + m
        return {k: v for k, v in out.items() if v}

    def line_degree(self, G: Cls, line: str) -> int:
        degs = self.twistor_lines[line]
        for g in G:
            if G[g] and g in self.line_inside.get(line, ()):
                raise ThreefoldError(f"{line} lies inside {g}")
        return sum(c * degs.get(g, 0) for g, c in G.items())

    # -- curve blowup

    def blow_up_curve(self, real: str, other: str, divisor: str) -> "Threefold":
        """Blow up the curve real ∩ other (assumed smooth and irreducible)."""
        if real not in self.sheets:
            raise ThreefoldError(f"{real} must be a sheet with a lattice")
        new = self.copy()
        X1 = self.sheets[real]
        c = self.entry(other, real)
        if not c:
            raise ThreefoldError(f"{real} and {other} do not meet")
        a = X1.pair(c, c)
        gens = self.generators
        d = {y: X1.pair(self.entry(y, real), c) for y in gens}
        m = {y: int(y in (real, other)) for y in gens}
        b = d[real]
        if d[other] != a:
            raise ThreefoldError(f"normal bundle mismatch along {real}∩{other}")
        center_on = {real: c}
        if other in self.sheets:
            center_on[other] = self.entry(real, other)
        eps: Dict[str, List[str]] = {}
        for X in self.sheets:
            if X in center_on:
                continue
            if d[X] < 0:
                raise ThreefoldError(f"{X} contains or is tangent to {real}∩{other}")
            if d[X] > 0:
                names = [f"x{divisor}"] if d[X] == 1 else [f"x{divisor}_{j + 1}" for j in range(d[X])]
                eps[X] = names
                new.sheets[X].add_points(names)
        for X in self.sheets:
            for y in gens:
                old = self.table.get((y, X))
                if old is None:
                    continue
                if X in center_on:
                    new.table[(y, X)] = cadd((1, old), (-m[y], center_on[X]))
                elif X in eps:
                    new.table[(y, X)] = cadd((1, old), *[(-m[y], {e: 1}) for e in eps[X]])
            if X in center_on:
                new.table[(divisor, X)] = dict(center_on[X])
            elif X in eps:
                new.table[(divisor, X)] = {e: 1 for e in eps[X]}
            else:
                new.table[(divisor, X)] = {}
        W = SheetLattice(divisor, ["f", "s"], {("f", "s"): 1, ("s", "s"): b - a})
        new.sheets[divisor] = W
        self_res = {"f": b, "s": -1}
        for y in gens:
            new.table[(y, divisor)] = cadd((d[y], {"f": 1}), (-m[y], self_res))
        new.table[(divisor, divisor)] = dict(self_res)
        # twistor lines through the center
        for L, degs in self.twistor_lines.items():
            inside = self.line_inside.get(L, ())
            if other in inside and real not in inside:
                n = degs.get(real, 0)
            elif real in inside and other not in inside:
                n = degs.get(other, 0)
            else:
                n = 0
            nd = {y: v - m[y] * n for y, v in degs.items()}
            nd[divisor] = n
            new.twistor_lines[L] = {y: v for y, v in nd.items() if v}
        new.blowups.append(Blowup(f"{other}∩{real}", (real, other), divisor))
        return new

    # -- text form

    def to_text(self, classes: Optional[Dict[str, Cls]] = None) -> str:
        lines = [f"# {self.label}"]
        for name, lat in self.sheets.items():
            lines.append(f"sheet {name} basis {' '.join(lat.basis)}")
            grams = []
            for i, u in enumerate(lat.basis):
                for v in lat.basis[i:]:
                    val = lat.product(u, v)
                    if val:
                        grams.append(f"{u}.{v}={val}")
            lines.append(f"gram {name} {' '.join(grams)}")
        if self.formal:
            lines.append(f"formal {' '.join(self.formal)}")
        for (g, X), c in sorted(self.table.items(), key=lambda kv: (list(self.sheets).index(kv[0][1]), kv[0][0])):
            lines.append(f"restrict {g} {X} = {format_sheet_class(c)}")
        for name, G in (classes or {}).items():
            lines.append(f"class {name} = {format_global(G)}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- class text

def format_sheet_class(c: Cls) -> str:
    a, b = c.get(O10, 0), c.get(O01, 0)
    out = f"({a},{b})" if a or b else ""
    for k in sorted(x for x in c if x not in (O10, O01)):
        v = c[k]
        sign = " - " if v < 0 else (" + " if out else "")
        if not out and v < 0:
            sign = "-"
        mag = "" if abs(v) == 1 else str(abs(v))
        out += f"{sign}{mag}{k}"
    return out or "0"


def format_global(G: Cls) -> str:
    out = ""
    for k, v in G.items():
        if not v:
            continue
        sign = " - " if v < 0 else (" + " if out else "")
        if not out and v < 0:
            sign = "-"
        mag = "" if abs(v) == 1 else str(abs(v))
        out += f"{sign}{mag}{k}"
    return out or "0"


_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*(\(\s*-?\d+\s*,\s*-?\d+\s*\)|[A-Za-z][A-Za-z0-9_+\-]*?(?=\s*(?:[+-]\s|[+-]\d|$)|\s*$))")


def parse_sheet_class(text: str) -> Cls:
    """Inverse of format_sheet_class ('(1,1) - D1 - cD2', '0', '2f - s')."""
    text = text.strip()
    if text in ("0", "O", ""):
        return {}
    toks = re.findall(r"\(\s*-?\d+\s*,\s*-?\d+\s*\)|[+-]|[^\s+-]+", text)
    out: Cls = {}
    sign = 1
    for t in toks:
        if t in "+-":
            sign = -1 if t == "-" else 1
            continue
        if t.startswith("("):
            a, b = (int(x) for x in t.strip("() ").split(","))
            out[O10] = out.get(O10, 0) + sign * a
            out[O01] = out.get(O01, 0) + sign * b
        else:
            m = re.fullmatch(r"(\d*)\*?(.+)", t)
            coef = int(m.group(1)) if m.group(1) else 1
            out[m.group(2)] = out.get(m.group(2), 0) + sign * coef
        sign = 1
    return {k: v for k, v in out.items() if v}


def parse_global(text: str) -> Cls:
    text = text.strip()
    if text == "0":
        return {}
    out: Cls = {}
    for sign, coef, name in re.findall(r"([+-]?)\s*(\d*)\s*\*?\s*([A-Za-z][A-Za-z0-9]*[+-]?)(?=\s*(?:[+-]\s|$))", text):
        v = int(coef) if coef else 1
        out[name] = out.get(name, 0) + (-v if sign == "-" else v)
    return {k: v for k, v in out.items() if v}


def parse_table(text: str) -> Tuple[Threefold, Dict[str, Cls]]:
    """Read back the output of Threefold.to_text."""
    sheets: Dict[str, SheetLattice] = {}
    formal: List[str] = []
    table: Dict[Tuple[str, str], Cls] = {}
    classes: Dict[str, Cls] = {}
    label = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            label = label or line[1:].strip()
            continue
        word, _, rest = line.partition(" ")
        try:
            if word == "sheet":
                name, kw, *basis = rest.split()
                if kw != "basis":
                    raise ValueError("expected 'basis'")
                sheets[name] = SheetLattice(name, basis, {})
            elif word == "gram":
                name, *entries = rest.split()
                for e in entries:
                    lhs, val = e.rsplit("=", 1)
                    u, v = lhs.split(".", 1) if not lhs.startswith("(") else _split_dot(lhs)
                    sheets[name].gram[(u, v)] = int(val)
            elif word == "formal":
                formal.extend(rest.split())
            elif word == "restrict":
                lhs, rhs = rest.split("=", 1)
                g, X = lhs.split()
                table[(g, X)] = parse_sheet_class(rhs)
            elif word == "class":
                lhs, rhs = rest.split("=", 1)
                classes[lhs.strip()] = parse_global(rhs)
            else:
                raise ValueError(f"unknown directive {word!r}")
        except (ValueError, KeyError) as exc:
            raise ThreefoldError(f"line {lineno}: {exc}") from exc
    return Threefold(label, sheets, formal, table), classes


def _split_dot(lhs: str) -> Tuple[str, str]:
    i = lhs.index(").") + 1
    return lhs[:i], lhs[i + 1:]


# ---------------------------------------------------------------- the models

TYPE_K = {"I": 2, "II": 3, "III": 4, "IV": 5}
TYPE_SURFACE = {"I": "type-I", "II": "type-II", "III": "type-III", "IV": "type-IV"}


def _e_side(i: int, k: int, s: List[int]) -> Tuple[List[str], Dict[str, Cls]]:
    """Lattice points and restrictions to E_i (the conjugate side follows by symmetry)."""
    pts = []
    if i < k:
        pts.append(f"D{i}")
    if i == 1:
        pts.append(f"cD{k}")
    res: Dict[str, Cls] = {"S": {O10: 1}}
    nxt = f"E{i + 1}" if i < k else "cE1"
    prv = f"E{i - 1}" if i > 1 else f"cE{k}"
    res[nxt] = cadd((1, {O01: 1}), (-1, {f"D{i}": 1})) if i < k else {O01: 1}
    res[prv] = {O01: 1} if i > 1 else cadd((1, {O01: 1}), (-1, {f"cD{k}": 1}))
    for j in range(1, k + 1):
        for e in ("E", "cE"):
            res.setdefault(f"{e}{j}", {})
    res[f"E{i}"] = cadd((1, {O01: s[i - 1] + 2}), (-1, {O10: 1}), (-1, res[nxt]), (-1, res[prv]))
    for j in range(1, k + 1):
        plus_has = i > j  # S_j+ contains C_{j+1}..C_k
        res[f"S{j}+"] = {O10: 1} if plus_has else {}
        res[f"S{j}-"] = {} if plus_has else {O10: 1}
    if i < k:
        res[f"S{i}+"] = {f"D{i}": 1}
        res[f"S{i}-"] = cadd((1, {O10: 1}), (-1, {f"D{i}": 1}))
    if i == 1:
        res[f"S{k}+"] = {f"cD{k}": 1}
        res[f"S{k}-"] = cadd((1, {O10: 1}), (-1, {f"cD{k}": 1}))
    return pts, res


def stage_one(typ: str) -> Threefold:
    """Blowup of the twistor space along the cycle, small resolutions included."""
    if typ not in TYPE_K:
        raise ThreefoldError(f"unknown type {typ!r}; expected one of I, II, III, IV")
    k = TYPE_K[typ]
    cfg = named_surface(TYPE_SURFACE[typ])
    s = cfg.self_intersections()[:k]
    sheets: Dict[str, SheetLattice] = {"S": surface_lattice(cfg)}
    table: Dict[Tuple[str, str], Cls] = {}
    formal = [f"S{j}{sg}" for j in range(1, k + 1) for sg in "+-"]
    for i in range(1, k + 1):
        pts, res = _e_side(i, k, s)
        sheets[f"E{i}"] = quadric_lattice(f"E{i}", pts)
        sheets[f"cE{i}"] = quadric_lattice(f"cE{i}", [conj_name(p) for p in pts])
        for g, c in res.items():
            table[(g, f"E{i}")] = c
            table[(conj_name(g), f"cE{i}")] = conj_cls(c)
    comps = cfg.classes()
    table[("S", "S")] = {}
    for i in range(1, k + 1):
        table[(f"E{i}", "S")] = surface_cls(comps[i - 1])
        table[(f"cE{i}", "S")] = surface_cls(comps[i - 1 + k])
    for f in formal:
        table[(f, "S")] = {}
    # twistor lines: L_j meets E_j and cE_j (j < k), E_1 and cE_1 (j = k)
    lines, inside = {}, {}
    for j in range(1, k + 1):
        idx = j if j < k else 1
        lines[f"L{j}"] = {f"E{idx}": 1, f"cE{idx}": 1}
        inside[f"L{j}"] = (f"S{j}+", f"S{j}-")
    order = ["S"] + [f"{e}{i}" for i in range(1, k + 1) for e in ("E", "cE")]
    sheets = {n: sheets[n] for n in order}
    return Threefold(f"type {typ}, curve blowup of the twistor space", sheets, formal, table, lines, inside, [], k)


def exceptional_sum(tf: Threefold) -> Cls:
    return {f"{e}{i}": 1 for i in range(1, tf.k + 1) for e in ("E", "cE")}


def pulled_fundamental(tf: Threefold) -> Cls:
    """Pullback of the half-anticanonical class F: S + sum of E's."""
    return tf.pullback(cadd((1, {"S": 1}), (1, exceptional_sum(tf))))


def first_system(tf: Threefold) -> Cls:
    """2F minus the fixed components E_1..E_{k-1} and conjugates."""
    k = tf.k
    fixed = {f"{e}{i}": 1 for i in range(1, k) for e in ("E", "cE")}
    return cadd((2, {"S": 1}), (2, exceptional_sum(tf)), (-1, fixed))


def stage_two(typ: str) -> Tuple[Threefold, Cls]:
    """Blow up the base curves S_k- ∩ E_j (j <= k-2) and conjugates in order."""
    tf = stage_one(typ)
    L1 = first_system(tf)
    k = tf.k
    for j in range(1, k - 1):
        tf = tf.blow_up_curve(f"E{j}", f"S{k}-", f"W{j}")
        tf = tf.blow_up_curve(f"cE{j}", f"S{k}+", f"cW{j}")
    L2 = cadd((1, tf.pullback(L1)), (-1, {b.divisor: 1 for b in tf.blowups}))
    tf.label = f"type {typ}, second stage"
    return tf, L2


def nc_model() -> Threefold:
    """Blowup along C1, C3 and conjugates on the (-3,-1,-3,-1) surface, no pencil resolution.

    The fiber sheet St is the strict transform of a member of |F|.
    """
    cfg = named_surface("k4-first-and-third")
    comps = cfg.classes()
    k = cfg.k
    sheets: Dict[str, SheetLattice] = {"St": surface_lattice(cfg)}
    sheets["St"].name = "St"
    table: Dict[Tuple[str, str], Cls] = {}
    es = []
    for i in (1, 3):
        for e, off in (("E", 0), ("cE", k)):
            name = f"{e}{i}"
            es.append((name, comps[i - 1 + off]))
            sheets[name] = quadric_lattice(name, [])
    for name, cls in es:
        for other, _ in es:
            table[(other, name)] = {O10: -1, O01: -2} if other == name else {}
        table[("St", name)] = {O10: 1, O01: 1}
        table[(name, "St")] = surface_cls(cls)
    rest = picard.anticanonical(cfg.npairs)
    for _, cls in es:
        rest = rest - cls
    table[("St", "St")] = surface_cls(rest)
    return Threefold("blowup along C1, C3 and conjugates", sheets, [], table, k=k)


def nc_checks(max_k: int = 3) -> Dict[str, int]:
    tf = nc_model()
    es = [x for x in tf.sheets if x != "St"]
    E = {x: 1 for x in es}
    F = cadd((1, {"St": 1}), (1, E))
    twoF_E = cadd((2, F), (-1, E))
    out = {"F^3": tf.triple(F, F, F)}
    for x in es:
        out[f"(2F-E)^2.{x}"] = tf.triple(twoF_E, twoF_E, {x: 1})
        out[f"F^2.{x}"] = tf.triple(F, F, {x: 1})
    for kk in range(1, max_k + 1):
        out[f"(2F-E)^2.{kk}F"] = tf.triple(twoF_E, twoF_E, cadd((kk, F)))
    return out


# ---------------------------------------------------------------- analysis

def candidate_curves(tf: Threefold) -> List[Tuple[str, str]]:
    """Curves cut by two special sheets, as (real sheet, other sheet)."""
    out, seen = [], set()
    for X in tf.sheets:
        if X == "S":
            continue
        for Y in tf.generators:
            if Y in (X, "S") or frozenset((X, Y)) in seen:
                continue
            if tf.table.get((Y, X)):
                seen.add(frozenset((X, Y)))
                out.append((X, Y))
    return out


def curve_name(X: str, Y: str) -> str:
    # formal halves first, matching the usual notation S3-∩E1
    if Y in ("S",) or re.fullmatch(r"S\d+[+-]", Y):
        return f"{Y}∩{X}"
    return f"{X}∩{Y}"


def curve_degree(tf: Threefold, G: Cls, X: str, Y: str) -> int:
    lat = tf.sheets[X]
    return lat.pair(tf.restrict(G, X), tf.entry(Y, X))


def base_curves(tf: Threefold, G: Cls) -> List[Tuple[str, int]]:
    """Curves forced into the base locus of |G|.

    Seeds are sheet intersections of negative degree; a degree-zero curve
    meeting a base curve is added as well.
    """
    curves = candidate_curves(tf)
    deg = {c: curve_degree(tf, G, *c) for c in curves}
    base = [c for c in curves if deg[c] < 0]
    changed = True
    while changed:
        changed = False
        for c in curves:
            if c in base or deg[c] != 0:
                continue
            for b in base:
                common = set(c) & set(b)
                if len(common) != 1:
                    continue
                trio = list(set(c) | set(b))
                if all(t in tf.formal for t in trio):
                    continue
                if tf.triple(*[{t: 1} for t in trio]) > 0:
                    base.append(c)
                    changed = True
                    break
    return [(curve_name(*c), deg[c]) for c in base]


@dataclass
class SheetImage:
    sheet: str
    restriction: str
    square: int
    kind: str  # point, line, surface
    target: str = ""


def image_profile(tf: Threefold, G: Cls) -> List[SheetImage]:
    names = [x for x in tf.sheets if x != "S"] + tf.formal
    info: Dict[str, SheetImage] = {}
    for X in names:
        r = tf.restrict(G, X)
        text = format_sheet_class(r) if X in tf.sheets else format_global(r)
        sq = tf.triple(G, G, {X: 1})
        kind = "point" if not r else ("line" if sq == 0 else "surface")
        info[X] = SheetImage(X, text, sq, kind)
    parent = {x: x for x in names}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def meets(X, Y):
        if X in tf.sheets:
            return bool(tf.table.get((Y, X)))
        if Y in tf.sheets:
            return bool(tf.table.get((X, Y)))
        return False

    for X, Y in itertools.combinations(names, 2):
        kx, ky = info[X].kind, info[Y].kind
        if kx != ky or kx == "surface":
            continue
        if kx == "point" and meets(X, Y):
            parent[find(X)] = find(Y)
        if kx == "line" and (X in tf.sheets or Y in tf.sheets) and tf.triple(G, {X: 1}, {Y: 1}) > 0:
            parent[find(X)] = find(Y)
    groups: Dict[str, List[str]] = {}
    for X in names:
        groups.setdefault(find(X), []).append(X)
    k = tf.k
    for root, members in groups.items():
        kind = info[root].kind
        if kind == "point":
            tag = "q" if f"E{k}" in members else ("cq" if f"cE{k}" in members else "point")
        elif kind == "line":
            if any(re.fullmatch(r"c?E\d+", x) for x in members):
                tag = "ridge"
            else:
                halves = [x for x in members if re.fullmatch(r"S\d+[+-]", x)]
                tag = f"line of {halves[0]}" if halves else "line"
        else:
            tag = ""
        for x in members:
            info[x].target = tag
    for X in names:
        im = info[X]
        if im.kind == "surface":
            m = re.fullmatch(r"S(\d+)[+-]", X)
            idx = m.group(1) if m else str(k)
            im.target = f"plane P{idx}" if im.square == 1 else f"surface of degree {im.square} in P{idx}"
    return [info[x] for x in names]


def conic_degrees(tf: Threefold, G: Cls) -> Dict[str, int]:
    return {L: tf.line_degree(G, L) for L in tf.twistor_lines}


def random_class(tf: Threefold, rng: random.Random, lo=-3, hi=3, formal=False) -> Cls:
    pool = list(tf.sheets) + (tf.formal if formal else [])
    return {g: v for g in pool if (v := rng.randint(lo, hi))}


def path_check(tf: Threefold, n: int = 100, seed: int = 0) -> int:
    """Evaluate n random triple products; raises on any path dependence."""
    rng = random.Random(seed)
    for _ in range(n):
        A = random_class(tf, rng)
        B = random_class(tf, rng)
        C = random_class(tf, rng, formal=rng.random() < 0.5)
        tf.triple(A, B, C)
    return n


# ---------------------------------------------------------------- reports

@dataclass
class EliminationReport:
    typ: str
    L1: Cls
    stage1: Dict[str, str]
    base1: List[Tuple[str, int]]
    L2: Optional[Cls] = None
    stage2: Dict[str, str] = field(default_factory=dict)
    formal2: Dict[str, str] = field(default_factory=dict)
    base2: List[Tuple[str, int]] = field(default_factory=list)
    images: List[SheetImage] = field(default_factory=list)
    conics: Dict[str, int] = field(default_factory=dict)
    checks: Dict[str, int] = field(default_factory=dict)

    @property
    def free(self) -> bool:
        return not (self.base2 if self.L2 is not None else self.base1)

    def to_dict(self) -> dict:
        return {
            "type": self.typ,
            "L1": format_global(self.L1),
            "stage1_restrictions": self.stage1,
            "stage1_base_curves": [n for n, _ in self.base1],
            "stage1_base_degrees": {n: d for n, d in self.base1},
            "L2": format_global(self.L2) if self.L2 is not None else None,
            "stage2_restrictions": self.stage2,
            "stage2_fiber_half_restrictions": self.formal2,
            "final_base_curves": [n for n, _ in self.base2],
            "free": self.free,
            "images": [
                {"sheet": i.sheet, "restriction": i.restriction, "square": i.square,
                 "kind": i.kind, "target": i.target} for i in self.images
            ],
            "twistor_line_degrees": self.conics,
            "checks": self.checks,
        }

    def to_text(self) -> str:
        out = [f"type {self.typ}", f"L1 = {format_global(self.L1)}"]
        for X, r in self.stage1.items():
            out.append(f"  L1|{X} = {r}")
        out.append("base curves: " + (", ".join(n for n, _ in self.base1) or "none"))
        if self.L2 is not None:
            out.append(f"L2 = {format_global(self.L2)} (strict transforms)")
            for X, r in self.stage2.items():
                out.append(f"  L2|{X} = {r}")
            for X, r in self.formal2.items():
                out.append(f"  L2|{X} = {r}")
            out.append("base curves after second blowup: " + (", ".join(n for n, _ in self.base2) or "none"))
        out.append(f"free: {'yes' if self.free else 'no'}")
        out.append("images:")
        for i in self.images:
            out.append(f"  {i.sheet}: {i.kind} {i.target}".rstrip())
        out.append("twistor line degrees: " + ", ".join(f"{k}={v}" for k, v in self.conics.items()))
        for k, v in self.checks.items():
            out.append(f"check {k} = {v}")
        return "\n".join(out)


def eliminate(typ: str) -> EliminationReport:
    tf1 = stage_one(typ)
    k = tf1.k
    L1 = first_system(tf1)
    st1 = {X: format_sheet_class(tf1.restrict(L1, X)) for X in tf1.sheets if X.startswith("E")}
    base1 = base_curves(tf1, L1)
    F1 = pulled_fundamental(tf1)
    rep = EliminationReport(typ, L1, st1, base1)
    rep.checks["F^3 (first stage)"] = tf1.triple(F1, F1, F1)
    final, G = tf1, L1
    if base1:
        tf2, L2 = stage_two(typ)
        rep.L2 = L2
        rep.stage2 = {X: format_sheet_class(tf2.restrict(L2, X))
                      for X in tf2.sheets if X.startswith(("E", "W"))}
        rep.formal2 = {X: format_global(tf2.restrict(L2, X)) for X in (f"S{k}-", f"S{k}+")}
        rep.base2 = base_curves(tf2, L2)
        F2 = pulled_fundamental(tf2)
        rep.checks["F^3 (second stage)"] = tf2.triple(F2, F2, F2)
        final, G = tf2, L2
    rep.checks["L^3"] = final.triple(G, G, G)
    rep.images = image_profile(final, G)
    rep.conics = conic_degrees(final, G)
    return rep
