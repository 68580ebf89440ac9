"""Picard lattices of blowups of P1 x P1 at conjugate pairs of points.

Basis: f1, f2 (the two rulings) and exceptional classes e1..en, ce1..cen
where ce_i is the conjugate of e_i.  The real structure fixes f1 and f2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class DivisorClass:
    f1: int
    f2: int
    e: Tuple[int, ...]
    ce: Tuple[int, ...]

    def __post_init__(self):
        if len(self.e) != len(self.ce):
            raise LatticeError("e and ce parts must have equal length")

    @property
    def npairs(self) -> int:
        return len(self.e)

    @classmethod
    def zero(cls, npairs: int) -> "DivisorClass":
        return cls(0, 0, (0,) * npairs, (0,) * npairs)

    @classmethod
    def from_vector(cls, vec: Sequence[int]) -> "DivisorClass":
        n = (len(vec) - 2) // 2
        return cls(vec[0], vec[1], tuple(vec[2:2 + n]), tuple(vec[2 + n:]))

    def vector(self) -> Tuple[int, ...]:
        return (self.f1, self.f2) + self.e + self.ce

    def _check(self, other):
        if not isinstance(other, DivisorClass):
            raise TypeError("expected a DivisorClass")
        if other.npairs != self.npairs:
            raise LatticeError(f"mismatched lattice dimension: {self.npairs} vs {other.npairs} pairs")

    def __add__(self, other):
        self._check(other)
        return DivisorClass.from_vector([a + b for a, b in zip(self.vector(), other.vector())])

    def __sub__(self, other):
        self._check(other)
        return DivisorClass.from_vector([a - b for a, b in zip(self.vector(), other.vector())])

    def __neg__(self):
        return DivisorClass.from_vector([-a for a in self.vector()])

    def __mul__(self, k: int):
        return DivisorClass.from_vector([k * a for a in self.vector()])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.vector())

    def extend(self, npairs: int) -> "DivisorClass":
        """Same class viewed on a further blowup (new exceptional coefficients 0)."""
        pad = (0,) * (npairs - self.npairs)
        return DivisorClass(self.f1, self.f2, self.e + pad, self.ce + pad)

    def __str__(self):
        return format_class(self)


def unit(name: str, npairs: int) -> DivisorClass:
    """Basis vector by name: f1, f2, e<i>, ce<i> (1-based)."""
    z = [0] * (2 + 2 * npairs)
    if name == "f1":
        z[0] = 1
    elif name == "f2":
        z[1] = 1
    else:
        m = re.fullmatch(r"(c?)e(\d+)", name)
        if not m:
            raise LatticeError(f"unknown basis element {name!r}")
        i = int(m.group(2))
        if not 1 <= i <= npairs:
            raise LatticeError(f"index out of range in {name!r} (have {npairs} pairs)")
        z[(2 + npairs if m.group(1) else 2) + i - 1] = 1
    return DivisorClass.from_vector(z)


def bidegree(a: int, b: int, npairs: int) -> DivisorClass:
    """Pullback of O(a, b): a f1 + b f2, where f1 is the class of a (1,0)-curve."""
    return DivisorClass(a, b, (0,) * npairs, (0,) * npairs)


def pair(d1: DivisorClass, d2: DivisorClass) -> int:
    d1._check(d2)
    val = d1.f1 * d2.f2 + d1.f2 * d2.f1
    val -= sum(a * b for a, b in zip(d1.e, d2.e))
    val -= sum(a * b for a, b in zip(d1.ce, d2.ce))
    return val


def canonical(npairs: int) -> DivisorClass:
    return DivisorClass(-2, -2, (1,) * npairs, (1,) * npairs)


def anticanonical(npairs: int) -> DivisorClass:
    return -canonical(npairs)


def chi(d: DivisorClass) -> int:
    k = canonical(d.npairs)
    twice = pair(d, d - k)
    return twice // 2 + 1


def genus(d: DivisorClass) -> int:
    k = canonical(d.npairs)
    twice = pair(d, d + k)
    return twice // 2 + 1


def conjugate(d: DivisorClass) -> DivisorClass:
    return DivisorClass(d.f1, d.f2, d.ce, d.e)


def format_class(d: DivisorClass) -> str:
    names = ["f1", "f2"] + [f"e{i + 1}" for i in range(d.npairs)] + [f"ce{i + 1}" for i in range(d.npairs)]
    out = ""
    for c, name in zip(d.vector(), names):
        if c == 0:
            continue
        sign = "-" if c < 0 else ("+" if out else "")
        mag = "" if abs(c) == 1 else str(abs(c))
        out += f"{sign}{mag}{name}"
    return out or "0"


_CLASS_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*(f1|f2|c?e\d+|K)")


def parse_class(text: str, npairs: int) -> DivisorClass:
    """Parse a formal sum such as '2f1+2f2-e1-ce3' or '-2K'."""
    text = text.strip()
    if text == "0":
        return DivisorClass.zero(npairs)
    pos = 0
    total = DivisorClass.zero(npairs)
    while pos < len(text):
        m = _CLASS_TERM.match(text, pos)
        if not m or (pos > 0 and not m.group(1)):
            raise LatticeError(f"cannot parse class at column {pos + 1}: {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = int(m.group(2)) if m.group(2) else 1
        token = m.group(3)
        base = canonical(npairs) if token == "K" else unit(token, npairs)
        total = total + base * (sign * coef)
        pos = m.end()
    return total


@dataclass
class SurfaceLattice:
    """A blowup of the quadric surface with its registered negative curves."""

    npairs: int
    catalog: List[Tuple[str, DivisorClass]] = field(default_factory=list)

    def __post_init__(self):
        for name, c in self.catalog:
            if c.npairs != self.npairs:
                raise LatticeError(f"catalog curve {name} lives on another lattice")
            if pair(c, c) >= 0:
                raise LatticeError(f"catalog curve {name} has self-intersection {pair(c, c)} >= 0")

    @property
    def rank(self) -> int:
        return 2 + 2 * self.npairs

    @property
    def K(self) -> DivisorClass:
        return canonical(self.npairs)

    def check(self, d: DivisorClass):
        if d.npairs != self.npairs:
            raise LatticeError(f"class has {d.npairs} pairs, lattice has {self.npairs}")
        return d
