"""Multivariate polynomials over Q in z0..z4 and the parameters a, a1, a2.

A Poly is a dict from exponent tuples to Fractions.  Reduction is only
supported modulo ideals spanned by linear forms, optionally together with
the scroll quadric z0^2 - z1*z2.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

VARS = ("z0", "z1", "z2", "z3", "z4", "a", "a1", "a2")
ZVARS = VARS[:5]
PARAMS = VARS[5:]
NV = len(VARS)
VAR_INDEX = {v: i for i, v in enumerate(VARS)}

Mono = Tuple[int, ...]
ZERO_MONO: Mono = (0,) * NV


class PolyError(ValueError):
    pass


class UnluckySpecialization(ArithmeticError):
    pass


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class Poly:
    """Sparse polynomial; immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Mono, Fraction]] = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _frac(c)
                if c != 0:
                    clean[tuple(m)] = c
        self.terms: Dict[Mono, Fraction] = clean

    # constructors
    @classmethod
    def const(cls, c) -> "Poly":
        return cls({ZERO_MONO: _frac(c)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        if name not in VAR_INDEX:
            raise PolyError(f"unknown variable {name!r}")
        m = [0] * NV
        m[VAR_INDEX[name]] = 1
        return cls({tuple(m): Fraction(1)})

    @classmethod
    def lift(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return cls.const(x)

    # arithmetic
    def __add__(self, other):
        other = Poly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly.lift(other))

    def __rsub__(self, other):
        return Poly.lift(other) - self

    def __mul__(self, other):
        other = Poly.lift(other)
        out: Dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PolyError("exponent must be a non-negative integer")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = _frac(c)
        return Poly({m: c * v for m, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # structure
    def zdegrees(self) -> set:
        return {sum(m[:5]) for m in self.terms}

    def zdegree(self) -> int:
        """Total degree in the z-variables (max over terms, -1 for zero)."""
        return max(self.zdegrees(), default=-1)

    def is_homogeneous(self) -> bool:
        return len(self.zdegrees()) <= 1

    def variables(self) -> List[str]:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return [VARS[i] for i in sorted(used)]

    def coefficient_of(self, zmono: Sequence[int]) -> "Poly":
        """Coefficient (a polynomial in the parameters) of a z-monomial."""
        zmono = tuple(zmono)
        out = {}
        for m, c in self.terms.items():
            if m[:5] == zmono:
                out[(0,) * 5 + m[5:]] = c
        return Poly(out)

    def is_constant(self) -> bool:
        return all(m == ZERO_MONO for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolyError(f"not a constant: {self}")
        return self.terms.get(ZERO_MONO, Fraction(0))

    def subs(self, mapping: Dict[str, "Poly"]) -> "Poly":
        """Simultaneous substitution of variables by polynomials."""
        idx = {VAR_INDEX[k]: Poly.lift(v) for k, v in mapping.items()}
        out = Poly()
        cache: Dict[Tuple[int, int], Poly] = {}
        for m, c in self.terms.items():
            keep = list(m)
            term = Poly.const(c)
            for i, e in enumerate(m):
                if e and i in idx:
                    keep[i] = 0
                    key = (i, e)
                    if key not in cache:
                        cache[key] = idx[i] ** e
                    term = term * cache[key]
            out = out + term * Poly({tuple(keep): Fraction(1)})
        return out

    def specialize(self, values: Dict[str, Fraction]) -> "Poly":
        return self.subs({k: Poly.const(v) for k, v in values.items()})

    def evaluate(self, values: Dict[str, Fraction]) -> Fraction:
        return self.specialize(values).constant_value()

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Poly({to_text(self)!r})"


Z = [Poly.var(v) for v in ZVARS]
A = Poly.var("a")
A1 = Poly.var("a1")
A2 = Poly.var("a2")


def linear_form(coeffs: Sequence) -> Poly:
    """sum coeffs[i]*z_i; entries may be Polys in the parameters."""
    out = Poly()
    for c, z in zip(coeffs, Z):
        out = out + Poly.lift(c) * z
    return out


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"\s*(?:(\d+)|(z[0-4]|a[12]?)|(.))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, op = m.groups()
        if num is not None:
            toks.append(("num", int(num), m.start(1)))
        elif name is not None:
            toks.append(("var", name, m.start(2)))
        else:
            if op not in "+-*^/()":
                raise PolyError(f"unexpected character {op!r} at column {m.start(3) + 1}")
            toks.append(("op", op, m.start(3)))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        t = self.toks[self.i]
        if (kind and t[0] != kind) or (value is not None and t[1] != value):
            raise PolyError(f"expected {value or kind} at column {t[2] + 1}, got {t[1]!r}")
        self.i += 1
        return t

    def expr(self):
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        out = self.term().scale(sign)
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                out = out + rhs if t[1] == "+" else out - rhs
            else:
                return out

    def term(self):
        out = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                out = out * self.factor()
            elif t[0] == "op" and t[1] == "/":
                # only division by an integer literal is allowed
                self.take()
                d = self.take("num")[1]
                if d == 0:
                    raise PolyError("division by zero")
                out = out.scale(Fraction(1, d))
            else:
                return out

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            return base ** self.take("num")[1]
        return base

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return Poly.const(t[1])
        if t[0] == "var":
            self.take()
            return Poly.var(t[1])
        if t[0] == "op" and t[1] == "(":
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        if t[0] == "op" and t[1] == "-":
            self.take()
            return -self.factor()
        raise PolyError(f"unexpected token {t[1]!r} at column {t[2] + 1}")


def parse_poly(text: str) -> Poly:
    p = _Parser(text)
    out = p.expr()
    p.take("end")
    return out


def _mono_text(m: Mono) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 1:
            parts.append(VARS[i])
        elif e > 1:
            parts.append(f"{VARS[i]}^{e}")
    return "*".join(parts)


def sorted_monos(p: Poly) -> List[Mono]:
    # z-degree descending, then lex with z0 > z1 > ... (parameters last)
    return sorted(p.terms, key=lambda m: (-sum(m[:5]), tuple(-e for e in m)))


def to_text(p: Poly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for k, m in enumerate(sorted_monos(p)):
        c = p.terms[m]
        mono = _mono_text(m)
        neg = c < 0
        a = -c if neg else c
        if mono:
            if a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"{a.numerator}/{a.denominator}*{mono}"
        else:
            body = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- ideals


@dataclass
class LinearIdeal:
    """Ideal generated by linear forms in z, optionally plus z0^2 - z1*z2."""

    generators: List[Poly]
    include_scroll: bool = False
    name: str = ""
    _solved: Optional[Dict[int, Poly]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for g in self.generators:
            if g.zdegrees() - {1}:
                raise PolyError(f"generator is not linear in z: {g}")
        self._solved = self._solve()

    def _pivot_candidates(self):
        if self.include_scroll:
            # keep the scroll quadric untouched by substitution
            return (3, 4)
        return (0, 1, 2, 3, 4)

    def _solve(self) -> Dict[int, Poly]:
        solved: Dict[int, Poly] = {}
        for g in self.generators:
            g = _apply(g, solved)
            if g.is_zero():
                raise PolyError("linear generators are dependent")
            pivot = None
            for i in self._pivot_candidates():
                c = g.coefficient_of(_unit(i))
                if not c.is_zero() and c.is_constant():
                    pivot = i
                    break
            if pivot is None:
                raise PolyError(f"no admissible pivot in generator {g}")
            c = g.coefficient_of(_unit(pivot)).constant_value()
            rest = g - Z[pivot].scale(c)
            value = rest.scale(-1 / c)
            solved = {k: _apply(v, {pivot: value}) for k, v in solved.items()}
            solved[pivot] = value
        return solved

    def pivots(self) -> List[str]:
        return [ZVARS[i] for i in sorted(self._solved)]


def _unit(i: int) -> Tuple[int, ...]:
    m = [0] * 5
    m[i] = 1
    return tuple(m)


def _apply(p: Poly, solved: Dict[int, Poly]) -> Poly:
    if not solved:
        return p
    return p.subs({ZVARS[i]: v for i, v in solved.items()})


def _scroll_rewrite(p: Poly) -> Poly:
    # z0^e -> z0^(e mod 2) (z1 z2)^(e div 2); one pass is exhaustive
    out: Dict[Mono, Fraction] = {}
    for m, c in p.terms.items():
        e = m[0]
        if e >= 2:
            h = e // 2
            m = (e - 2 * h, m[1] + h, m[2] + h) + m[3:]
        out[m] = out.get(m, 0) + c
    return Poly(out)


def reduce(p: Poly, ideal: LinearIdeal, require_homogeneous: bool = True) -> Poly:
    """Normal form of p modulo the ideal; zero iff p lies in it."""
    if require_homogeneous and not p.is_homogeneous():
        raise PolyError(f"non-homogeneous input (z-degrees {sorted(p.zdegrees())}): {p}")
    out = _apply(p, ideal._solved)
    if ideal.include_scroll:
        out = _scroll_rewrite(out)
    return out


def is_neg_square(p: Poly, q: Poly, ideal: LinearIdeal) -> bool:
    return reduce(p + q * q, ideal).is_zero()


SCROLL = Z[0] * Z[0] - Z[1] * Z[2]


# ---------------------------------------------------------------- quadratic rank


def rank_of(rows: List[List[Fraction]]) -> int:
    """Exact rank by fraction-free-ish Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows if any(r)]
    if not m:
        return 0
    rank = 0
    ncols = len(m[0])
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        for r in range(rank + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / pv
                row_r, row_p = m[r], m[rank]
                for c in range(col, ncols):
                    if row_p[c]:
                        row_r[c] -= f * row_p[c]
        rank += 1
        if rank == len(m):
            break
    return rank


def null_space(rows: List[List[Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of {x : rows x = 0} over Q."""
    m = [list(map(Fraction, r)) for r in rows]
    pivcols = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][col]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivcols.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivcols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivcols):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def sample_parameters(rng: random.Random) -> Dict[str, Fraction]:
    """Random rationals for a, a1, a2 avoiding 0, 1 and a1 = a2."""
    while True:
        vals = {}
        for name in PARAMS:
            num = rng.randint(-97, 97)
            den = rng.choice([d for d in range(-97, 98) if d != 0])
            vals[name] = Fraction(num, den)
        if any(v in (0, 1) for v in vals.values()):
            continue
        if vals["a1"] == vals["a2"]:
            continue
        return vals


def gram_matrix(p: Poly, var_names: Sequence[str]) -> List[List[Poly]]:
    idx = [VAR_INDEX[v] for v in var_names]
    n = len(idx)
    g = [[Poly() for _ in range(n)] for _ in range(n)]
    for m, c in p.terms.items():
        hits = [(k, m[i]) for k, i in enumerate(idx) if m[i]]
        deg = sum(e for _, e in hits)
        if deg != 2:
            raise PolyError(f"not quadratic in {list(var_names)}: {p}")
        if any(m[i] for i in range(5) if i not in idx):
            raise PolyError(f"term outside the selected variables: {p}")
        coeff_mono = tuple(0 if i in idx else e for i, e in enumerate(m))
        cpoly = Poly({coeff_mono: c})
        if len(hits) == 1:
            k = hits[0][0]
            g[k][k] = g[k][k] + cpoly
        else:
            (k, _), (l, _) = hits
            half = cpoly.scale(Fraction(1, 2))
            g[k][l] = g[k][l] + half
            g[l][k] = g[l][k] + half
    return g


def quadratic_rank(p: Poly, var_names: Sequence[str], seed: int = 0) -> int:
    """Rank of the Gram matrix over Q(a, a1, a2), certified by two samples."""
    g = gram_matrix(p, var_names)
    rng = random.Random(seed)
    ranks = []
    for _ in range(2):
        vals = sample_parameters(rng)
        rows = [[e.evaluate(vals) for e in row] for row in g]
        ranks.append(rank_of(rows))
    if ranks[0] != ranks[1]:
        raise UnluckySpecialization(f"unlucky specialization: ranks {ranks}")
    return ranks[0]
