"""Deformation-dimension bookkeeping for twistor spaces with a real pencil |F|.

The count for a case is

    dim V   = 2p - |directions|
    total   = dim V + h1(Theta_Z(-S)) - pencil

where p is the number of conjugate pairs of blown-up points that may move
along their components, `directions` the real torus directions of the
quadric that act nontrivially on those points, and `pencil` the dimension of
the real part of H0(-K_S) (1, or 2 when |-K_S| is a pencil).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from anticanon_lab import cycles
from anticanon_lab.cycles import GENERIC, INF, CycleConfig
from anticanon_lab.polyring import rank_of

KINDS = ("birational", "double-solid", "conic-bundle", "campana-kreussler")
DIRECTIONS = ("ruling-1", "ruling-2")
H1_THETA_Z = 13  # 4CP^2 with h0 = h2 = h3 = 0
H1_THETA_S = 10
CK_DIM_V = 7  # pinned, see ModuliCase docs

# (k, kind) pairs that occur in the table
VALID = {
    (6, "birational"),
    (5, "birational"),
    (5, "double-solid"),
    (4, "birational"),
    (4, "double-solid"),
    (4, "conic-bundle"),
    (3, "double-solid"),
    (2, "double-solid"),
    (2, "campana-kreussler"),
}


class ModuliError(ValueError):
    pass


def chi_theta_Z(n: int) -> int:
    """chi of the tangent sheaf of a twistor space over nCP^2."""
    if n < 0:
        raise ModuliError("n must be non-negative")
    return 15 - 7 * n


def chi_theta_S(Ksq: int) -> int:
    # chi(Theta) = (7 c1^2 - 5 c2) / 6 with c2 = 12 - K^2
    num = 7 * Ksq - 5 * (12 - Ksq)
    assert num % 6 == 0
    return num // 6


@dataclass(frozen=True)
class DiagramDims:
    h1_theta_Z: int
    h0_minus_K: int
    h1_minus_K: int
    h1_theta_ZS: int
    h1_theta_S: int
    h1_theta_Z_minus_S: int


def diagram_dims(h1_theta_Z: int = H1_THETA_Z, h0_minus_K: int = 1,
                 h1_theta_S: int = H1_THETA_S) -> DiagramDims:
    """Dimensions in the two exact sequences relating Theta_Z, Theta_{Z,S}, Theta_S.

    h1(-K_S) = h0(-K_S) - 1 for these surfaces, so h1(Theta_{Z,S}) =
    h1(Theta_Z) + h0(-K) - h1(-K) = h1(Theta_Z) + 1 independently of h0(-K).
    """
    h1K = h0_minus_K - 1
    zs = h1_theta_Z + h0_minus_K - h1K
    return DiagramDims(h1_theta_Z, h0_minus_K, h1K, zs, h1_theta_S, zs - h1_theta_S)


@dataclass(frozen=True)
class ModuliCase:
    """One row of the moduli table.

    For campana-kreussler the dimension of V is a pinned constant (7); p and
    directions are then ignored.
    """

    k: int
    kind: str
    p: int
    directions: FrozenSet[str] = frozenset()
    h0_minus_K: int = 1
    label: str = ""

    def validate(self):
        if self.kind not in KINDS:
            raise ModuliError(f"unknown kind {self.kind!r}")
        if (self.k, self.kind) not in VALID:
            raise ModuliError(f"no {self.kind} case with k={self.k}")
        if not 0 <= self.p <= 4:
            raise ModuliError(f"moving pairs p={self.p} outside 0..4")
        bad = set(self.directions) - set(DIRECTIONS)
        if bad:
            raise ModuliError(f"unknown directions {sorted(bad)}")
        want = 2 if self.kind == "campana-kreussler" else 1
        if self.h0_minus_K != want:
            raise ModuliError(f"h0(-K)={self.h0_minus_K} but {self.kind} needs {want}")
        if self.kind != "campana-kreussler" and 2 * self.p < len(self.directions):
            raise ModuliError("more torus directions than moving coordinates")


def dim_V(case: ModuliCase) -> int:
    case.validate()
    if case.kind == "campana-kreussler":
        return CK_DIM_V
    return 2 * case.p - len(case.directions)


def moduli_dim(case: ModuliCase) -> int:
    v = dim_V(case)
    dd = diagram_dims(h0_minus_K=case.h0_minus_K)
    return v + dd.h1_theta_Z_minus_S - case.h0_minus_K


# ---------------------------------------------------------------- torus weights

def _sign(c) -> int:
    return 1 if Fraction(c) == 0 else -1


def _local_weights(cfg: CycleConfig, i: int, memo: Dict[int, Optional[Tuple]]):
    """Weights of the local coordinates (u, v) at cluster point i, or None if
    the point is not fixed by the torus.  Chart conventions follow linsys."""
    if i in memo:
        return memo[i]
    s = cfg.cluster[i].site
    out = None
    if s.parent is None:
        x, y = s.where
        if x in (0, 1) and y in (0, 1):
            out = ((_sign(x), 0), (0, _sign(y)))
    else:
        par = _local_weights(cfg, s.parent, memo)
        if par is not None and s.where in (Fraction(0), INF):
            wu, wv = par
            diff = (wv[0] - wu[0], wv[1] - wu[1])
            if s.where == INF:
                out = (wv, (-diff[0], -diff[1]))
            else:
                out = (wu, diff)
    memo[i] = out
    return out


def moving_weight(cfg: CycleConfig, i: int, memo=None) -> Optional[Tuple[int, int]]:
    """Torus weight of the coordinate along which cluster point i moves.

    None for points that are pinned (torus fixed or placed at a given value).
    """
    memo = {} if memo is None else memo
    s = cfg.cluster[i].site
    if s.parent is None:
        x, y = s.where
        if x == GENERIC and y != GENERIC:
            return (1, 0)
        if y == GENERIC and x != GENERIC:
            return (0, 1)
        if x == GENERIC and y == GENERIC:
            raise ModuliError("a point moving in both coordinates is not on the cycle")
        return None
    if s.where != GENERIC:
        return None
    par = _local_weights(cfg, s.parent, memo)
    if par is None:
        raise ModuliError(f"cluster point {i} sits over a point not fixed by the torus")
    wu, wv = par
    return (wv[0] - wu[0], wv[1] - wu[1])


def case_from_surface(cfg: CycleConfig, kind: str, h0_minus_K: int = 1,
                      label: str = "") -> ModuliCase:
    """Derive p and the torus directions from the blowup data of a surface.

    The torus acting on the quadric and preserving the initial quadrilateral
    is C* x C*; its orbits through the moving points have dimension equal to
    the rank of their weights.  A rank-one set is labelled by the ruling of
    its weight when it has one, and by ruling-1 otherwise (a single circle
    acting on points of exceptional curves).
    """
    memo: Dict[int, Optional[Tuple]] = {}
    weights = []
    for i, cp in enumerate(cfg.cluster):
        if cp.label.startswith("c"):
            continue
        w = moving_weight(cfg, i, memo)
        if w is not None:
            weights.append(w)
    r = rank_of([[Fraction(a) for a in w] for w in weights]) if weights else 0
    if r == 2:
        dirs = frozenset(DIRECTIONS)
    elif r == 1:
        dirs = frozenset({"ruling-2"} if all(w[0] == 0 for w in weights) else {"ruling-1"})
    else:
        dirs = frozenset()
    return ModuliCase(cfg.k, kind, len(weights), dirs, h0_minus_K, label)


# ---------------------------------------------------------------- table

# (label, named surface or None, kind); the CK row has no named surface
TABLE_ROWS = [
    ("toric k=6", "toric-3-1", "birational"),
    ("birational k=5", "k5-smooth-on-third", "birational"),
    ("type IV", "type-IV", "double-solid"),
    ("birational k=4", "k4-first-and-third", "birational"),
    ("type III", "type-III", "double-solid"),
    ("conic bundle k=4", "k4-double-on-second", "conic-bundle"),
    ("type II", "type-II", "double-solid"),
    ("type I", "type-I", "double-solid"),
]

# identity components of the automorphism groups, keyed by row label
AUT = {
    "toric k=6": "C*xC*",
    "birational k=5": "C*",
    "type IV": "C*",
    "conic bundle k=4": "C*",
}


def table_cases() -> List[ModuliCase]:
    out = []
    for label, surf, kind in TABLE_ROWS:
        out.append(case_from_surface(cycles.named_surface(surf), kind, label=label))
    return out


def ck_case() -> ModuliCase:
    return ModuliCase(2, "campana-kreussler", 0, frozenset(), 2, "Campana-Kreussler")


def table() -> Dict[Tuple[int, str], int]:
    return {(c.k, c.kind): moduli_dim(c) for c in table_cases()}


COLUMNS = ("birational", "double-solid", "conic-bundle")
COLUMN_TITLES = ("birational type", "double solid type", "conic bundle type")


def table_markdown() -> str:
    t = table()
    autos = {(c.k, c.kind): AUT.get(c.label) for c in table_cases()}
    lines = ["| | " + " | ".join(COLUMN_TITLES) + " |", "|---|---|---|---|"]
    for k in (6, 5, 4, 3, 2):
        cells = []
        for kind in COLUMNS:
            if (k, kind) not in t:
                cells.append("-")
                continue
            cell = f"{t[k, kind]}-dim."
            if autos[k, kind]:
                cell += f" ({autos[k, kind]})"
            cells.append(cell)
        lines.append(f"| k={k} | " + " | ".join(cells) + " |")
    lines.append("")
    lines.append(f"Campana-Kreussler (k=2, h0(-K)=2): {moduli_dim(ck_case())}-dim.")
    return "\n".join(lines) + "\n"
