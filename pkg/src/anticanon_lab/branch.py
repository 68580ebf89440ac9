"""Branch divisor of the double covering of the scroll.

The scroll Y in P^4 is the cone z0^2 = z1 z2 over the conic Lambda in the
(z0, z1, z2)-plane; its ridge l = {z0 = z1 = z2 = 0} is the common line of
all plane fibers P_lambda = {(t*lambda, z3, z4)}.  The branch divisor is cut
out by F = f1 f2 f3 f4 - Q^2 with linear f_i and a quadric Q.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from anticanon_lab.cycles import CycleConfig, named_surface
from anticanon_lab.polyring import (
    A, A1, A2, SCROLL, Z, LinearIdeal, Poly, PolyError, null_space,
    parse_poly, quadratic_rank, rank_of, reduce, to_text,
)

TYPES = ("I", "II", "III", "IV")


class BranchError(ValueError):
    pass


class ValidationError(BranchError):
    def __init__(self, check: str, residue: Poly, detail: str = ""):
        self.check = check
        self.residue = residue
        msg = f"check {check} failed"
        if detail:
            msg += f": {detail}"
        msg += f"; residue {to_text(residue)}"
        super().__init__(msg)


@dataclass
class ScrollModel:
    coordinates: Tuple[str, ...] = ("z0", "z1", "z2", "z3", "z4")
    conic: Poly = field(default_factory=lambda: SCROLL)

    @property
    def ridge_ideal(self) -> LinearIdeal:
        return LinearIdeal([Z[0], Z[1], Z[2]], name="ridge")

    @staticmethod
    def projection(point: Sequence) -> Tuple:
        return tuple(point[:3])

    def on_conic(self, lam: Sequence) -> bool:
        v = {"z0": lam[0], "z1": lam[1], "z2": lam[2], "z3": 0, "z4": 0}
        val = self.conic.subs({k: Poly.lift(x) for k, x in v.items()})
        return val.is_zero()


# ---------------------------------------------------------------- placements

def lambda_placements(typ: str) -> List[Tuple[Poly, Poly, Poly]]:
    """Points of the conic over which |F| has reducible members."""
    one, zero = Poly.const(1), Poly()
    p010 = (zero, one, zero)
    p111 = (one, one, one)
    p001 = (zero, zero, one)
    if typ == "I":
        return [p010, p001]
    if typ == "II":
        return [p010, p111, p001]
    if typ == "III":
        return [p010, p111, (A, one, A * A), p001]
    if typ == "IV":
        return [p010, p111, (A1, one, A1 * A1), (A2, one, A2 * A2), p001]
    raise BranchError(f"unknown type {typ!r}; expected one of {', '.join(TYPES)}")


def plane_ideal(lam) -> LinearIdeal:
    """Ideal of the plane P_lambda = {(t lambda, z3, z4)}."""
    l0, l1, l2 = lam
    if not l1.is_zero():
        gens = [Z[0] * l1 - Z[1] * l0, Z[2] * l1 - Z[1] * l2]
    else:
        gens = [Z[0], Z[1]]
    return LinearIdeal(gens, name=f"plane {tuple(to_text(x) for x in lam)}")


def linear_factors(typ: str, f: Optional[Poly] = None) -> List[Poly]:
    if typ == "I":
        if f is None:
            raise BranchError("type I needs the linear form f")
        return [Z[0], Z[3], Z[4], f]
    if typ == "II":
        return [Z[0], Z[0] - Z[1], Z[3], Z[4]]
    if typ == "III":
        return [Z[0], Z[0] - Z[1], Z[0] - Z[1] * A, Z[4]]
    if typ == "IV":
        return [Z[0], Z[0] - Z[1], Z[0] - Z[1] * A1, Z[0] - Z[1] * A2]
    raise BranchError(f"unknown type {typ!r}")


def hyperplane_forms(typ: str, f: Optional[Poly] = None) -> List[Poly]:
    """Hyperplanes cutting the double quartic curves (the non-ridge factors)."""
    if typ == "I":
        return [Z[3], Z[4], f]
    if typ == "II":
        return [Z[3], Z[4]]
    if typ == "III":
        return [Z[4]]
    return []


def hyperplane_ideal(h: Poly) -> LinearIdeal:
    return LinearIdeal([h], include_scroll=True, name=f"hyperplane ({to_text(h)})")


def conic_zero_multiplicities(typ: str) -> Dict[Tuple[str, ...], int]:
    """Zeros of the ridge-containing factors on the conic, with multiplicity.

    Substitutes the parametrisation (s t, s^2, t^2) and factors out t.
    """
    ridge = [g for g in linear_factors(typ, Z[3]) if not (g.coefficient_of((0, 0, 0, 1, 0)) or g.coefficient_of((0, 0, 0, 0, 1)))]
    prod = Poly.const(1)
    for g in ridge:
        prod = prod * g
    # z0 = s t, z1 = s^2, z2 = t^2 with s -> z3, t -> z4 as stand-ins
    sub = prod.subs({"z0": Z[3] * Z[4], "z1": Z[3] * Z[3], "z2": Z[4] * Z[4]})
    out: Dict[Tuple[str, ...], int] = {}
    for lam in lambda_placements(typ):
        if lam[1].is_zero():
            # lambda = (0,0,1): s = 0, multiplicity = power of z3 dividing
            mult = min(m[3] for m in sub.terms)
        elif lam[2].is_zero():
            mult = min(m[4] for m in sub.terms)
        else:
            # s/t = l1/l0 is a simple root of a linear factor (s - r t) unless repeated
            mult = 0
            for g in ridge:
                v = g.subs({"z0": lam[0], "z1": lam[1], "z2": lam[2]})
                if v.is_zero():
                    mult += 1
        out[tuple(to_text(x) for x in lam)] = mult
    return out


# ---------------------------------------------------------------- incidence

@dataclass
class IncidenceTable:
    typ: str
    curves: List[Tuple[str, str, str]]  # (name, kind, carrier)
    pairs: Dict[Tuple[str, str], int]
    total: int

    def to_dict(self) -> dict:
        return {
            "type": self.typ,
            "curves": [{"name": n, "kind": k, "carrier": c} for n, k, c in self.curves],
            "pairs": {f"{a}∩{b}": v for (a, b), v in self.pairs.items()},
            "total": self.total,
        }


INTERSECTION_RULES = {
    ("conic", "conic"): 2,
    ("conic", "quartic"): 2,
    ("quartic", "quartic"): 4,
}


def incidence_table(typ: str) -> IncidenceTable:
    k = {"I": 2, "II": 3, "III": 4, "IV": 5}[typ]
    curves = []
    for i in range(1, k + 1):
        kind = "splitting conic" if (i == k and typ != "I") else "conic"
        curves.append((f"C{i}", kind, f"P{i}"))
    for j in range(k + 1, 6):
        curves.append((f"C{j}", "quartic", f"H{j}"))
    pairs = {}
    for (n1, k1, _), (n2, k2, _) in itertools.combinations(curves, 2):
        key = tuple(sorted(("quartic" if x == "quartic" else "conic") for x in (k1, k2)))
        pairs[(n1, n2)] = INTERSECTION_RULES[key]
    # all conic pairs meet in the same two points q, q-bar on the ridge
    nconic = k
    shared = 2 if nconic >= 2 else 0
    total = shared + sum(v for (a, b), v in pairs.items()
                         if not (_kind(curves, a) != "quartic" and _kind(curves, b) != "quartic"))
    return IncidenceTable(typ, curves, pairs, total)


def _kind(curves, name):
    return next(k for n, k, _ in curves if n == name)


def incidence_closed_form(nconics: int, nquartics: int) -> int:
    return 2 + 4 * comb(nquartics, 2) + 2 * nconics * nquartics


# ---------------------------------------------------------------- quartic assembly

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    residue: str = "0"

    def to_dict(self):
        return {"check": self.name, "passed": self.passed, "detail": self.detail, "residue": self.residue}


@dataclass
class QuarticModel:
    typ: str
    Q: Poly
    factors: List[Poly]
    F: Poly
    plane_ideals: List[LinearIdeal]
    hyperplane_ideals: List[LinearIdeal]
    checks: List[CheckResult] = field(default_factory=list)
    params: Dict[str, Fraction] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": self.typ,
            "Q": to_text(self.Q),
            "factors": [to_text(f) for f in self.factors],
            "checks": [c.to_dict() for c in self.checks],
            "all_passed": all(c.passed for c in self.checks),
            "note": "necessary conditions only; which Q occur is not characterised",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def ridge_restriction(p: Poly) -> Poly:
    return p.subs({"z0": Poly(), "z1": Poly(), "z2": Poly()})


def binary_coefficients(p: Poly) -> Tuple[Poly, Poly, Poly]:
    """(b0, b1, b2) with p = b0 z3^2 + b1 z3 z4 + b2 z4^2."""
    return (p.coefficient_of((0, 0, 0, 2, 0)), p.coefficient_of((0, 0, 0, 1, 1)),
            p.coefficient_of((0, 0, 0, 0, 2)))


def check_parameters(typ: str, params: Dict[str, Fraction]):
    names = {"III": ["a"], "IV": ["a1", "a2"]}.get(typ, [])
    for n in names:
        if n in params and params[n] in (0, 1):
            raise BranchError(f"parameter {n} must avoid 0 and 1")
    if typ == "IV" and "a1" in params and "a2" in params and params["a1"] == params["a2"]:
        raise BranchError("parameters a1 and a2 must differ")


def assemble_quartic(typ: str, Q: Poly, f: Optional[Poly] = None,
                     params: Optional[Dict[str, Fraction]] = None, seed: int = 0) -> QuarticModel:
    """Build F = prod f_i - Q^2 and run the validation checks; raise on the first failure."""
    model = quartic_checks(typ, Q, f, params, seed)
    for c in model.checks:
        if not c.passed:
            raise ValidationError(c.name, parse_poly(c.residue) if c.residue else Poly(), c.detail)
    return model


def quartic_checks(typ: str, Q: Poly, f: Optional[Poly] = None,
                   params: Optional[Dict[str, Fraction]] = None, seed: int = 0) -> QuarticModel:
    """Same as assemble_quartic but records failures instead of raising."""
    params = dict(params or {})
    check_parameters(typ, params)
    if Q.zdegrees() != {2}:
        raise BranchError(f"Q must be a homogeneous quadric, got z-degrees {sorted(Q.zdegrees())}")
    if typ == "I":
        if f is None or f.zdegrees() != {1}:
            raise BranchError("type I needs a linear form f")
    factors = linear_factors(typ, f)
    prod = Poly.const(1)
    for g in factors:
        prod = prod * g
    F = prod - Q * Q
    planes = [plane_ideal(lam) for lam in lambda_placements(typ)]
    hyps = [hyperplane_ideal(h) for h in hyperplane_forms(typ, f)]
    model = QuarticModel(typ, Q, factors, F, planes, hyps, params=params)
    # (a) F = -Q^2 on each plane over a reducible fiber
    for I in planes:
        res = reduce(F + Q * Q, I)
        model.checks.append(CheckResult(f"a: F+Q^2 in I({I.name})", res.is_zero(), "", to_text(res)))
    # (b) ridge
    Fr, Qr = ridge_restriction(F), ridge_restriction(Q)
    res = Fr + Qr * Qr
    ok = res.is_zero()
    detail = ""
    if ok:
        b0, b1, b2 = binary_coefficients(Qr)
        if Qr.is_zero():
            ok, detail = False, "Q vanishes on the ridge"
        else:
            disc = b1 * b1 - b0 * b2 * 4
            ok, detail = _negative_everywhere(disc, params, seed)
            if not ok:
                detail = "ridge roots are not a distinct non-real conjugate pair: " + detail
    else:
        detail = "F restricted to the ridge is not -(Q restricted)^2"
    model.checks.append(CheckResult("b: ridge meets the branch divisor in q, q-bar", ok, detail,
                                    to_text(res) if not res.is_zero() else to_text(Qr) if not ok else "0"))
    # (c) splitting conic
    if typ != "I":
        red = reduce(Q, LinearIdeal([Z[0], Z[1]]))
        try:
            rk = quadratic_rank(red, ["z2", "z3", "z4"], seed=seed)
            ok = rk <= 2
            detail = f"rank {rk}"
        except PolyError as exc:
            ok, detail = False, str(exc)
        model.checks.append(CheckResult("c: conic over (0,0,1) is reducible", ok, detail, "0" if ok else to_text(red)))
    # (d) double quartic hyperplanes
    for I in hyps:
        res = reduce(F + Q * Q, I)
        model.checks.append(CheckResult(f"d: F+Q^2 in I({I.name})+I(Y)", res.is_zero(), "", to_text(res)))
    return model


def _negative_everywhere(disc: Poly, params, seed) -> Tuple[bool, str]:
    """disc < 0 at the given parameters (or at two seeded samples if symbolic)."""
    if disc.is_constant():
        v = disc.constant_value()
        return v < 0, f"discriminant {v}"
    from anticanon_lab.polyring import sample_parameters
    rng = random.Random(seed)
    vals = dict(params) if params else None
    samples = [vals] if vals else [sample_parameters(rng) for _ in range(2)]
    for s in samples:
        v = disc.evaluate(s)
        if v >= 0:
            return False, f"discriminant {v} at {s}"
    return True, "discriminant negative"


FIXTURE_Q = {
    "I": "z3^2 + z4^2 + z0*z3 + z1*z2 - 2*z0*z4 + z1*z3 + z2*z4",
    "II": "z3^2 + z4^2 + z0*z3 + z1*z2 - 2*z0*z4 + z1*z3",
    "III": "z3^2 + z4^2 + z0*z3 + z1*z2 - 2*z0*z4 + z1*z3",
    "IV": "z3^2 + z4^2 + z0*z3 + z1*z2 - 2*z0*z4 + z1*z3",
}
FIXTURE_F = "z1 + z3 + z4"


def fixture_model(typ: str, seed: int = 0) -> QuarticModel:
    f = parse_poly(FIXTURE_F) if typ == "I" else None
    return quartic_checks(typ, parse_poly(FIXTURE_Q[typ]), f, seed=seed)


# ---------------------------------------------------------------- quadric conditions

QMONOS = [m for m in itertools.combinations_with_replacement(range(5), 2)]  # 15 quadratic monomials


def _mono_value(m, p):
    return p[m[0]] * p[m[1]]


def _restrict_quadric(coeffs: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> Dict[Tuple[int, int], Fraction]:
    """Quadric with 15 coefficients restricted to span(basis), as coefficients in the basis coordinates."""
    n = len(basis)
    out: Dict[Tuple[int, int], Fraction] = {}
    for c, (i, j) in zip(coeffs, QMONOS):
        if not c:
            continue
        for a in range(n):
            for b in range(n):
                v = c * basis[a][i] * basis[b][j]
                if v:
                    key = (min(a, b), max(a, b))
                    out[key] = out.get(key, 0) + v
    return out


def _restriction_matrix(basis) -> List[List[Fraction]]:
    """Rows: coefficients of the restricted quadric as linear functions of the 15 coefficients."""
    n = len(basis)
    keys = list(itertools.combinations_with_replacement(range(n), 2))
    rows = [[Fraction(0)] * 15 for _ in keys]
    for idx in range(15):
        unit = [Fraction(0)] * 15
        unit[idx] = Fraction(1)
        restricted = _restrict_quadric(unit, basis)
        for r, key in enumerate(keys):
            rows[r][idx] = restricted.get(key, Fraction(0))
    return rows


def _apply_rows(rows, coeffs):
    return [sum(r * c for r, c in zip(row, coeffs)) for row in rows]


def poly_to_coeffs(p: Poly) -> List[Fraction]:
    out = []
    for i, j in QMONOS:
        m = [0] * 5
        m[i] += 1
        m[j] += 1
        c = p.coefficient_of(tuple(m))
        out.append(c.constant_value() if not c.is_zero() else Fraction(0))
    return out


def coeffs_to_poly(c: Sequence[Fraction]) -> Poly:
    out = Poly()
    for v, (i, j) in zip(c, QMONOS):
        if v:
            out = out + (Z[i] * Z[j]).scale(v)
    return out


@dataclass
class Condition:
    label: str
    rows: List[List[Fraction]]


def cond_point(label, p) -> Condition:
    p = [Fraction(x) for x in p]
    return Condition(label, [[_mono_value(m, p) for m in QMONOS]])


def _complement_rows(span: List[List[Fraction]], restr_rows) -> List[List[Fraction]]:
    """Conditions 'restricted quadric lies in span(span)' as rows on the 15 coefficients."""
    n = len(restr_rows)
    comp = null_space(span, n) if span else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    return [[sum(w[k] * restr_rows[k][c] for k in range(n)) for c in range(15)] for w in comp]


def cond_in_span(label, basis, quadrics: List[Sequence[Fraction]]) -> Condition:
    """The restriction to span(basis) is a combination of the restrictions of `quadrics`."""
    R = _restriction_matrix(basis)
    span = [_apply_rows(R, q) for q in quadrics]
    span = [s for s in span if any(s)]
    return Condition(label, _complement_rows(span, R))


def _gauss_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def cond_tangent(label, q, normal) -> Condition:
    """Gradient at the complex point q proportional to `normal` (both Gaussian rationals).

    Conditions at the conjugate point are the conjugate equations, hence implied
    for real quadrics.
    """
    grads = []
    for a in range(5):
        row_re, row_im = [], []
        for (i, j) in QMONOS:
            # d/dz_a (z_i z_j) at q
            val = (Fraction(0), Fraction(0))
            if i == a:
                val = (val[0] + q[j][0], val[1] + q[j][1])
            if j == a:
                val = (val[0] + q[i][0], val[1] + q[i][1])
            row_re.append(val[0])
            row_im.append(val[1])
        grads.append((row_re, row_im))
    rows = []
    for a, b in itertools.combinations(range(5), 2):
        # grad_a * n_b - grad_b * n_a = 0
        re = [grads[a][0][c] * normal[b][0] - grads[a][1][c] * normal[b][1]
              - grads[b][0][c] * normal[a][0] + grads[b][1][c] * normal[a][1] for c in range(15)]
        im = [grads[a][0][c] * normal[b][1] + grads[a][1][c] * normal[b][0]
              - grads[b][0][c] * normal[a][1] - grads[b][1][c] * normal[a][0] for c in range(15)]
        rows += [re, im]
    return Condition(label, rows)


def quadric_constraint_dim(conditions: Sequence[Condition]) -> Tuple[int, List[List[Fraction]]]:
    """Projective dimension of the quadrics satisfying all conditions, and a basis."""
    rows = [r for c in conditions for r in c.rows]
    rk = rank_of(rows) if rows else 0
    basis = null_space(rows, 15) if rows else [[Fraction(int(i == j)) for j in range(15)] for i in range(15)]
    return 14 - rk, basis


def _line_through(plane_basis, h_coeffs):
    """Basis of {v in span(plane_basis) : h(v) = 0}."""
    vals = [[sum(hc * b[i] for i, hc in enumerate(h_coeffs)) for b in plane_basis]]
    ns = null_space(vals, len(plane_basis))
    return [[sum(w[k] * plane_basis[k][i] for k in range(len(plane_basis))) for i in range(5)] for w in ns]


def _linear_coeffs(h: Poly) -> List[Fraction]:
    out = []
    for i in range(5):
        c = h.coefficient_of(tuple(int(j == i) for j in range(5)))
        out.append(c.constant_value() if not c.is_zero() else Fraction(0))
    return out


def _subspace(forms: List[List[Fraction]]) -> List[List[Fraction]]:
    return null_space(forms, 5)


@dataclass
class ConstraintInstance:
    typ: str
    params: Dict[str, Fraction]
    Q: Poly
    lams: List[Tuple[Fraction, Fraction, Fraction]]
    hyperplanes: List[Poly]
    stages: List[Tuple[str, List[Condition]]]


@dataclass
class ConstraintReport:
    typ: str
    dims: List[Tuple[str, int]]
    containing_dim: int
    every_member_contains: bool
    failures: List[str]
    degenerate: bool = False
    seeds: List[int] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        """Some member other than the scroll contains all five double curves."""
        return self.containing_dim >= 1

    def to_dict(self):
        return {"type": self.typ, "dims": {s: d for s, d in self.dims},
                "containing_dim": self.containing_dim, "certified": self.certified,
                "every_member_contains": self.every_member_contains,
                "basis_members_missing_curves": self.failures,
                "degenerate": self.degenerate, "seeds": self.seeds}


def _numeric_lams(typ, params):
    out = []
    for lam in lambda_placements(typ):
        out.append(tuple(x.evaluate(params) if not x.is_zero() else Fraction(0) for x in lam))
    return out


def _plane_basis(lam):
    return [[lam[0], lam[1], lam[2], Fraction(0), Fraction(0)],
            [Fraction(0)] * 3 + [Fraction(1), Fraction(0)],
            [Fraction(0)] * 4 + [Fraction(1)]]


def synthesize_instance(typ: str, seed: int = 0) -> ConstraintInstance:
    """A rational quadric Q = z3^2 + z4^2 + sum z_j L_j with a rational point on every C_i.

    The points (lambda_i, 1, 0) lie on the line P_i ∩ (z4 = 0); for types II-IV
    no z2 L2 term is used so the conic over (0,0,1) splits.
    """
    rng = random.Random(seed)
    params = {"a": Fraction(rng.choice([2, 3, -2, 5])), "a1": Fraction(2), "a2": Fraction(rng.choice([3, -3, 4]))}
    lams = _numeric_lams(typ, params)
    carriers = [0, 1] + ([2] if typ == "I" else [])
    unknowns = [(j, m) for j in carriers for m in range(5)]
    eqs = []
    for lam in lams:
        p = [lam[0], lam[1], lam[2], Fraction(1), Fraction(0)]
        row = [p[j] * p[m] for j, m in unknowns]
        const = Fraction(1)  # z3^2 + z4^2 at p
        if any(row):
            eqs.append(row + [const])
        # otherwise the conic over (0,0,1) splits and its vertex is the rational point
    ns = null_space(eqs, len(unknowns) + 1)
    while True:
        r = [Fraction(rng.randint(-3, 3)) for _ in ns]
        w = [sum(ri * v[i] for ri, v in zip(r, ns)) for i in range(len(unknowns) + 1)]
        if w[-1] != 0:
            break
    w = [x / w[-1] for x in w[:-1]]
    Q = Z[3] * Z[3] + Z[4] * Z[4]
    for (j, m), c in zip(unknowns, w):
        if c:
            Q = Q + (Z[j] * Z[m]).scale(c)
    hyps = [h.subs({}) for h in hyperplane_forms(typ, parse_poly(FIXTURE_F))]
    inst = ConstraintInstance(typ, params, Q, lams, hyps, [])
    inst.stages = _conditions(inst)
    return inst


def _pair_on_line(label, line_basis, Qc) -> Condition:
    # quadric restricted to the line is proportional to Q restricted to the line
    return cond_in_span(label, line_basis, [Qc])


def _known_point(lam, Qc, h) -> List[Fraction]:
    """A rational point of Q on the line P_lambda ∩ (h = 0) built into the instance.

    Candidates: (lambda, 1, 0), then the vertex (0,0,1,0,0) of a split conic.
    """
    cands = [[lam[0], lam[1], lam[2], Fraction(1), Fraction(0)]]
    if not any(lam[:2]):
        cands.append([Fraction(0), Fraction(0), Fraction(1), Fraction(0), Fraction(0)])
    for p in cands:
        val = sum(c * _mono_value(m, p) for c, m in zip(Qc, QMONOS))
        if val == 0 and sum(a * b for a, b in zip(h, p)) == 0:
            return p
    raise BranchError(f"no built-in rational point on the conic over {lam}")


def _conditions(inst: ConstraintInstance) -> List[Tuple[str, List[Condition]]]:
    typ = inst.typ
    Qc = poly_to_coeffs(inst.Q)
    Yc = poly_to_coeffs(SCROLL)
    ridge = [[Fraction(0)] * 3 + [Fraction(1), Fraction(0)], [Fraction(0)] * 4 + [Fraction(1)]]
    planes = [_plane_basis(l) for l in inst.lams]
    H = [_linear_coeffs(h) for h in inst.hyperplanes]

    def line(i, j):
        return _line_through(planes[i], H[j])

    def one_point(label, i, j):
        return cond_point(label, _known_point(inst.lams[i], Qc, H[j]))

    qq = cond_in_span("q, q-bar", ridge, [Qc])
    if typ == "I":
        first = [qq,
                 _pair_on_line("C1∩C3", line(0, 0), Qc),
                 _pair_on_line("C2∩C3", line(1, 0), Qc),
                 one_point("one point of C1∩C4", 0, 1),
                 one_point("one point of C2∩C4", 1, 1)]
        plane34 = _subspace([H[0], H[1]])
        second = [cond_in_span("C3∩C4", plane34, [Yc, Qc])]
        return [("8 points", first), ("C3∩C4", first + second)]
    if typ == "II":
        plane45 = _subspace([H[0], H[1]])
        conds = [qq,
                 cond_in_span("C4∩C5", plane45, [Yc, Qc]),
                 _pair_on_line("C1∩C4", line(0, 0), Qc),
                 one_point("one point of C1∩C5", 0, 1),
                 _pair_on_line("C2∩C4", line(1, 0), Qc),
                 one_point("one point of C2∩C5", 1, 1)]
        return [("12 points", conds)]
    qpt = [(Fraction(0), Fraction(0))] * 3 + [(Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))]
    normal = _gradient_at(inst.Q, qpt)
    tangent = cond_tangent("tangent space V at q", qpt, normal)
    if typ == "III":
        conds = [qq, tangent] + [_pair_on_line(f"C{i + 1}∩C5", line(i, 0), Qc) for i in range(4)]
        return [("(a),(b),(c)", conds)]
    z4 = [Fraction(0)] * 4 + [Fraction(1)]
    pts = [cond_point(f"point on C{i + 1}", _known_point(lam, Qc, z4)) for i, lam in enumerate(inst.lams)]
    return [("(a),(b),(c')", [qq, tangent] + pts)]


def _gradient_at(p: Poly, q):
    out = []
    c = poly_to_coeffs(p)
    for a in range(5):
        v = (Fraction(0), Fraction(0))
        for coef, (i, j) in zip(c, QMONOS):
            if not coef:
                continue
            if i == a:
                v = (v[0] + coef * q[j][0], v[1] + coef * q[j][1])
            if j == a:
                v = (v[0] + coef * q[i][0], v[1] + coef * q[i][1])
        out.append(v)
    return out


def containment_conditions(inst: ConstraintInstance) -> List[Condition]:
    """Linear conditions for a quadric to contain every double curve of the instance."""
    Qc = poly_to_coeffs(inst.Q)
    Yc = poly_to_coeffs(SCROLL)
    conds = [cond_in_span(f"contains C{i + 1}", _plane_basis(lam), [Qc]) for i, lam in enumerate(inst.lams)]
    k = len(inst.lams)
    for j, h in enumerate(inst.hyperplanes):
        conds.append(cond_in_span(f"contains C{k + j + 1}", _subspace([_linear_coeffs(h)]), [Yc, Qc]))
    return conds


def contains_double_curves(inst: ConstraintInstance, G: Sequence[Fraction]) -> List[str]:
    """Names of double curves NOT contained in the quadric G (empty list = all contained)."""
    out = []
    for c in containment_conditions(inst):
        if any(sum(r * g for r, g in zip(row, G)) for row in c.rows):
            out.append(c.label.split()[-1])
    return out


def constraint_report(typ: str, seed: int = 0, resamples: int = 2) -> ConstraintReport:
    """Dimension counts on rational instances, resampled to detect degeneracy."""
    seeds = [seed + 17 * r for r in range(resamples)]
    all_dims = []
    inst0 = None
    for s in seeds:
        inst = synthesize_instance(typ, s)
        inst0 = inst0 or inst
        all_dims.append([(label, quadric_constraint_dim(conds)[0]) for label, conds in inst.stages])
    dims = all_dims[0]
    degenerate = any(d != dims for d in all_dims[1:])
    final = inst0.stages[-1][1]
    dim_final, basis = quadric_constraint_dim(final)
    containing_dim, _ = quadric_constraint_dim(list(final) + containment_conditions(inst0))
    failures = []
    for b in basis:
        miss = contains_double_curves(inst0, b)
        if miss:
            failures.append(f"{to_text(coeffs_to_poly(b))} misses {', '.join(miss)}")
    return ConstraintReport(typ, dims, containing_dim, containing_dim == dim_final, failures, degenerate, seeds)


# ---------------------------------------------------------------- half-cycle search

def halves(k: int) -> Dict[str, Tuple[int, ...]]:
    """Cycle multiplicities of S_i^+- (components ordered C1..Ck, cC1..cCk).

    S_i^- contains C1..C_i and cC_{i+1}..cC_k; S_i^+ is the complementary half.
    """
    out = {}
    for i in range(1, k + 1):
        minus = [0] * (2 * k)
        for j in range(i):
            minus[j] = 1
        for j in range(i, k):
            minus[k + j] = 1
        out[f"S{i}-"] = tuple(minus)
        out[f"S{i}+"] = tuple(1 - x for x in minus)
    return out


def conj_half(name: str) -> str:
    return name[:-1] + ("-" if name.endswith("+") else "+")


def profile(names: Sequence[str], k: int) -> Tuple[int, ...]:
    hs = halves(k)
    tot = [0] * (2 * k)
    for n in names:
        tot = [a + b for a, b in zip(tot, hs[n])]
    return tuple(tot)


def _pic_trivial(dev: Sequence[int], vecs: Sequence[Tuple[int, ...]]) -> bool:
    # vecs: component classes as coordinate vectors
    return not any(sum(d * v[i] for d, v in zip(dev, vecs)) for i in range(len(vecs[0])))


def _half_key(n: str):
    return (int(n[1:-1]), n[-1] == "-")


def half_cycle_search(k: int, cfg: Optional[CycleConfig] = None) -> List[Tuple[str, ...]]:
    """4-multisets of halves whose cycle restriction is twice the cycle.

    Without a surface the test is literal (each component exactly twice).  With a
    surface it is the linear equivalence sum n_j C_j ~ 2C in its Picard lattice.
    """
    if not 2 <= k <= 6:
        raise BranchError("k must lie in 2..6")
    if cfg is not None and cfg.k != k:
        raise BranchError(f"surface has k={cfg.k}, asked for {k}")
    names = sorted(halves(k), key=_half_key)
    vecs = [c.vector() for c in cfg.classes()] if cfg is not None else None
    out = []
    for combo in itertools.combinations_with_replacement(names, 4):
        dev = [p - 2 for p in profile(combo, k)]
        good = not any(dev) if cfg is None else _pic_trivial(dev, vecs)
        if good:
            out.append(combo)
    return out


def canonical_selection(names: Sequence[str]) -> Tuple[str, ...]:
    return tuple(sorted(names, key=_half_key))


def is_fiber_sum(sel: Sequence[str]) -> bool:
    """True when the selection is a sum of two whole fibers S_i^+ + S_i^-."""
    return sorted(sel) == sorted(conj_half(n) for n in sel) and all(
        sel.count(n) == sel.count(conj_half(n)) for n in sel)


SELECTION_SURFACES = {
    "X1 on (-3,-2,-1)x4": ("toric-3-2-1", ["S1+", "S2+", "S3-", "S6-"]),
    "X2 on (-3,-2,-1)x4": ("toric-3-2-1", ["S3+", "S4+", "S5+", "S6-"]),
    "X1 on (-3,-1)x6": ("toric-3-1", ["S2+", "S3+", "S5+", "S6-"]),
    "X2 on (-3,-1)x6": ("toric-3-1", ["S1-", "S3-", "S4+", "S6+"]),
    "X3 on (-3,-1)x6": ("toric-3-1", ["S1+", "S2-", "S4-", "S5-"]),
    "X on (-2,-3,-2,-1)x2": ("k4-double-on-second", ["S1+", "S2+", "S3+", "S4-"]),
}


def selection_found(label: str) -> bool:
    surf, sel = SELECTION_SURFACES[label]
    cfg = named_surface(surf)
    return canonical_selection(sel) in set(half_cycle_search(cfg.k, cfg))


def relation_profiles() -> Dict[str, bool]:
    """X1+X2 = conj(X3) + two fibers and its cyclic companions, on the (-3,-1)x6 surface."""
    X1 = SELECTION_SURFACES["X1 on (-3,-1)x6"][1]
    X2 = SELECTION_SURFACES["X2 on (-3,-1)x6"][1]
    X3 = SELECTION_SURFACES["X3 on (-3,-1)x6"][1]

    def bar(X):
        return [conj_half(n) for n in X]

    def fib(i):
        return [f"S{i}+", f"S{i}-"]

    rels = {
        "X1+X2 = cX3 + S3 + S6": (X1 + X2, bar(X3) + fib(3) + fib(6)),
        "X2+X3 = cX1 + S1 + S4": (X2 + X3, bar(X1) + fib(1) + fib(4)),
        "X3+X1 = cX2 + S2 + S5": (X3 + X1, bar(X2) + fib(2) + fib(5)),
    }
    return {name: sorted(lhs) == sorted(rhs) and profile(lhs, 6) == profile(rhs, 6)
            for name, (lhs, rhs) in rels.items()}


# ---------------------------------------------------------------- .poly files

def parse_poly_file(text: str) -> Dict[str, object]:
    """Lines: '# comment', 'type II', 'params a=2 a1=3', 'Q = ...', 'f = ...'.

    A single bare expression is read as Q.
    """
    out: Dict[str, object] = {"params": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("type "):
                out["type"] = line.split()[1]
            elif line.startswith("params"):
                for tok in line.split()[1:]:
                    k, v = tok.split("=")
                    out["params"][k] = Fraction(v)
            elif "=" in line:
                k, v = line.split("=", 1)
                out[k.strip()] = parse_poly(v)
            elif "Q" not in out:
                out["Q"] = parse_poly(line)
            else:
                raise PolyError(f"unexpected content {line!r}")
        except (PolyError, ValueError) as exc:
            raise BranchError(f"line {lineno}: {exc}") from exc
    if "Q" not in out:
        raise BranchError("no quadric Q in file")
    return out
