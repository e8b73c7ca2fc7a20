"""Randomised damage to certificate text, for soundness tests."""
import re

from veerobs.slopes import Slope

KINDS = ("delete-clause", "edit-slope", "dangling-fact")
_LIT = re.compile(r"l(\d+)=([^ |;]+)")


def _clause_lines(lines):
    return [i for i, line in enumerate(lines) if line.strip().startswith("clause ")]


def tamper(text, kind, rng):
    """Return ``text`` with one defect of the given kind, chosen with ``rng``."""
    lines = text.splitlines()
    i = rng.choice(_clause_lines(lines))
    line = lines[i]
    if kind == "delete-clause":
        del lines[i]
    elif kind == "edit-slope":
        body, _, source = line.partition(" ; from ")
        lits = list(_LIT.finditer(body))
        m = rng.choice(lits)
        s = Slope.parse(m.group(2))
        new = Slope.make(s.p + s.q, s.q) if s.q else Slope.make(rng.randint(-9, 9) or 1, 1)
        body = body[:m.start(2)] + str(new) + body[m.end(2):]
        lines[i] = body + " ; from " + source
    elif kind == "dangling-fact":
        body, _, source = line.partition(" ; from ")
        lines[i] = body + " ; from " + source.replace(":", ":zz", 1)
    else:
        raise ValueError(kind)
    return "\n".join(lines) + "\n"
