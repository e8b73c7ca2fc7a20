"""Slopes on cusp tori and (partial) Dehn fillings."""
from __future__ import annotations

import math
import re
from typing import NamedTuple, Optional, Sequence, Tuple


class SlopeError(ValueError):
    pass


class Slope(NamedTuple):
    """A slope ``p * meridian + q * longitude`` with gcd 1, ``q > 0`` or ``(1, 0)``."""

    p: int
    q: int

    @classmethod
    def make(cls, p: int, q: int) -> "Slope":
        p, q = int(p), int(q)
        if p == 0 and q == 0:
            raise SlopeError("(0, 0) is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        s = text.strip().replace(" ", "")
        if s in ("inf", "infinity", "oo", "1/0", "-1/0"):
            return cls(1, 0)
        m = re.fullmatch(r"([+-]?\d+)(?:/([+-]?\d+))?", s)
        if not m:
            m = re.fullmatch(r"\(?([+-]?\d+),([+-]?\d+)\)?", s)
            if not m:
                raise SlopeError("cannot parse slope {!r}".format(text))
        q = int(m.group(2)) if m.group(2) is not None else 1
        return cls.make(int(m.group(1)), q)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def __str__(self):
        if self.q == 0:
            return "inf"
        if self.q == 1:
            return str(self.p)
        return "{}/{}".format(self.p, self.q)


# A filling assigns to each cusp either a Slope or None (left complete/unfilled).
Filling = Tuple[Optional[Slope], ...]


def complete(cusps: int) -> Filling:
    return (None,) * cusps


def parse_filling(text: str) -> Filling:
    """Parse ``(1/2;2)``, ``(*;1/2;2)`` or ``(-3)``; ``*`` marks an unfilled cusp."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise SlopeError("empty slope tuple")
    out = []
    for part in s.split(";"):
        part = part.strip()
        out.append(None if part == "*" else Slope.parse(part))
    return tuple(out)


def format_filling(fill: Sequence[Optional[Slope]]) -> str:
    return "(" + ";".join("*" if s is None else str(s) for s in fill) + ")"


def filled_cusps(fill: Sequence[Optional[Slope]]):
    return [c for c, s in enumerate(fill) if s is not None]
