"""
Certificates that a manifold is not persistently foliar (NPF), and the
double-cover verdicts built from them.

Clause model
------------
A manifold with cusps ``0..k-1`` is persistently foliar when one can choose
an exceptional slope ``l_c`` on every cusp such that each filling avoiding
all the ``l_c`` carries a taut foliation.  A filling ``(s_0, ..., s_{k-1})``
known to be non-taut therefore forces the clause ``l_0 = s_0 or ... or
l_{k-1} = s_{k-1}``.  Partial fillings contribute clauses over their filled
cusps when every completion is non-taut: either directly (universal facts)
or because the partial filling is identified with a manifold that is
itself NPF.  The manifold is NPF exactly when the clause set cannot be
satisfied.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .catalog import FactBase, FillingFact, IdentificationFact, UniversalFact
from .covers import DoubleCover, enumerate_double_covers
from .geometry import MATCH_TOL
from .slopes import Slope
from .triangulation import Triangulation

Literal = Tuple[int, Slope]


class CyclicIdentification(ValueError):
    pass


class UnresolvedCover(LookupError):
    pass


@dataclass(frozen=True)
class Clause:
    literals: Tuple[Literal, ...]
    source: str                      # fact id
    uses: Optional[str] = None       # NPF manifold an identification relies on

    def __str__(self):
        return " | ".join("l{}={}".format(c, s) for c, s in self.literals)


@dataclass(frozen=True)
class Certificate:
    target: str
    clauses: Tuple[Clause, ...]
    subs: Tuple["Certificate", ...] = ()

    def walk(self):
        """This certificate and every sub-certificate, each once, depth first."""
        seen = set()
        stack = [self]
        while stack:
            c = stack.pop()
            if c.target in seen:
                continue
            seen.add(c.target)
            yield c
            stack.extend(reversed(c.subs))

    def to_text(self) -> str:
        lines = []
        for cert in self.walk():
            lines.append("npf {}".format(cert.target))
            for cl in cert.clauses:
                lines.append("  clause {} ; from {}".format(cl, cl.source))
            for sub in cert.subs:
                lines.append("  uses {}".format(sub.target))
        return "\n".join(lines) + "\n"


class CertificateSyntaxError(ValueError):
    pass


def parse_certificate(text: str) -> Certificate:
    """Inverse of :meth:`Certificate.to_text`; the first record is the root."""
    records: Dict[str, dict] = {}
    order = []
    cur = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("npf "):
            cur = line[4:].strip()
            if cur in records:
                raise CertificateSyntaxError("line {}: duplicate record {}".format(lineno, cur))
            records[cur] = {"clauses": [], "uses": []}
            order.append(cur)
        elif cur is None:
            raise CertificateSyntaxError("line {}: content before the first npf record".format(lineno))
        elif line.startswith("clause "):
            body, sep, source = line[7:].partition(" ; from ")
            if not sep:
                raise CertificateSyntaxError("line {}: clause without a source".format(lineno))
            lits = []
            for lit in body.split("|"):
                lit = lit.strip()
                if not lit.startswith("l") or "=" not in lit:
                    raise CertificateSyntaxError("line {}: bad literal {!r}".format(lineno, lit))
                c, s = lit[1:].split("=", 1)
                try:
                    lits.append((int(c), Slope.parse(s)))
                except ValueError as exc:
                    raise CertificateSyntaxError("line {}: {}".format(lineno, exc)) from None
            records[cur]["clauses"].append((tuple(lits), source.strip()))
        elif line.startswith("uses "):
            records[cur]["uses"].append(line[5:].strip())
        else:
            raise CertificateSyntaxError("line {}: unrecognised line {!r}".format(lineno, line))
    if not order:
        raise CertificateSyntaxError("empty certificate")

    built: Dict[str, Certificate] = {}

    def build(name, stack=()):
        if name in built:
            return built[name]
        if name in stack:
            raise CertificateSyntaxError("cyclic uses through {}".format(name))
        if name not in records:
            raise CertificateSyntaxError("missing record for {}".format(name))
        rec = records[name]
        subs = tuple(build(u, stack + (name,)) for u in rec["uses"])
        clauses = []
        for lits, source in rec["clauses"]:
            uses = None
            if source.startswith("ident:"):
                uses = source.rsplit("=", 1)[-1]
            clauses.append(Clause(lits, source, uses))
        built[name] = Certificate(name, tuple(clauses), subs)
        return built[name]

    return build(order[0])


# -- clause engine ---------------------------------------------------------------

def _filled_literals(slopes) -> Tuple[Literal, ...]:
    return tuple((c, s) for c, s in enumerate(slopes) if s is not None)


def clauses_from_facts(name: str, facts: FactBase,
                       npf_oracle: Callable[[str], Optional[object]] = lambda _: None) -> List[Clause]:
    """
    Clauses on the exceptional slopes of ``name`` implied by ``facts``.

    ``npf_oracle(result)`` should return something truthy (usually a
    Certificate) when ``result`` is known to be NPF.
    """
    out = []
    for f in facts.fillings_of(name):
        out.append(Clause(_filled_literals(f.slopes), f.fact_id))
    for u in facts.universals_of(name):
        lits = _filled_literals(u.partial)
        if lits:
            out.append(Clause(lits, u.fact_id))
    for i in facts.idents_of(name):
        if npf_oracle(i.result):
            out.append(Clause(_filled_literals(i.partial), i.fact_id, i.result))
    return out


def clause_set_satisfiable(clauses: Sequence[Clause], cusp_count: int):
    """
    ``(True, witness)`` if some choice of one slope per cusp meets every
    clause, else ``(False, None)``.

    Only the slopes that occur in the clauses matter for a cusp, plus one
    fresh slope standing for "anything else" (reported as ``None``).
    """
    choices = []
    for c in range(cusp_count):
        seen = sorted({s for cl in clauses for (cc, s) in cl.literals if cc == c})
        choices.append(seen + [None])
    for assignment in itertools.product(*choices):
        if all(any(assignment[c] == s for c, s in cl.literals if c < cusp_count) for cl in clauses):
            return True, assignment
    return False, None


class NPFEngine:
    """Memoised NPF certification over one FactBase."""

    def __init__(self, facts: FactBase):
        self.facts = facts
        self._memo: Dict[str, Optional[Certificate]] = {}

    def certify(self, name: str, _stack: Tuple[str, ...] = ()) -> Optional[Certificate]:
        if name in self._memo:
            return self._memo[name]
        if name in _stack:
            raise CyclicIdentification(" -> ".join(_stack + (name,)))
        k = self.facts.cusp_count(name)
        if k is None:
            self._memo[name] = None
            return None
        stack = _stack + (name,)
        subs: Dict[str, Certificate] = {}

        def oracle(result):
            rk = self.facts.cusp_count(result)
            if rk is not None and rk >= k:
                raise CyclicIdentification("identification {} -> {} does not reduce the cusp count".format(
                    name, result))
            cert = self.certify(result, stack)
            if cert is not None:
                subs[result] = cert
            return cert

        clauses = clauses_from_facts(name, self.facts, oracle)
        sat, _ = clause_set_satisfiable(clauses, k)
        cert = None
        if not sat:
            cert = _minimal_certificate(name, clauses, k, subs)
        self._memo[name] = cert
        return cert


def _minimal_certificate(name, clauses, k, subs) -> Certificate:
    """Drop clauses greedily while the set stays unsatisfiable, so certificates stay readable."""
    kept = list(clauses)
    for cl in list(clauses):
        trial = [c for c in kept if c is not cl]
        if not clause_set_satisfiable(trial, k)[0]:
            kept = trial
    used = []
    for cl in kept:
        if cl.uses and cl.uses not in used:
            used.append(cl.uses)
    return Certificate(name, tuple(kept), tuple(subs[u] for u in used))


def certify_npf(name: str, facts: FactBase, engine: Optional[NPFEngine] = None) -> Optional[Certificate]:
    engine = engine or NPFEngine(facts)
    return engine.certify(name)


# -- independent checking -------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def _expected_literals(fact, target):
    if isinstance(fact, FillingFact):
        return fact.name == target, _filled_literals(fact.slopes), None
    if isinstance(fact, UniversalFact):
        return fact.base == target, _filled_literals(fact.partial), None
    if isinstance(fact, IdentificationFact):
        return fact.base == target, _filled_literals(fact.partial), fact.result
    return False, (), None


def verify_certificate(cert: Certificate, facts: FactBase, _stack: Tuple[str, ...] = ()) -> CheckResult:
    """Re-derive every clause from ``facts``, re-check unsatisfiability, recurse into sub-certificates."""
    if cert.target in _stack:
        return CheckResult(False, "cyclic certificate through {}".format(cert.target))
    k = facts.cusp_count(cert.target)
    if k is None:
        return CheckResult(False, "no record for {}".format(cert.target))
    subs = {s.target: s for s in cert.subs}
    for cl in cert.clauses:
        fact = facts.fact(cl.source)
        if fact is None:
            return CheckResult(False, "{}: fact {} is not in the fact base".format(cert.target, cl.source))
        about, lits, needs = _expected_literals(fact, cert.target)
        if not about:
            return CheckResult(False, "{}: fact {} is about another manifold".format(cert.target, cl.source))
        if tuple(cl.literals) != lits:
            return CheckResult(False, "{}: clause {} does not follow from {}".format(cert.target, cl, cl.source))
        if any(not 0 <= c < k for c, _ in cl.literals):
            return CheckResult(False, "{}: clause {} names a missing cusp".format(cert.target, cl))
        if needs is not None:
            sub = subs.get(needs)
            if sub is None:
                return CheckResult(False, "{}: clause from {} lacks a certificate for {}".format(
                    cert.target, cl.source, needs))
            rk = facts.cusp_count(needs)
            if rk is None or rk >= k:
                return CheckResult(False, "{}: identification with {} does not reduce cusps".format(
                    cert.target, needs))
    sat, witness = clause_set_satisfiable(cert.clauses, k)
    if sat:
        return CheckResult(False, "{}: clauses are satisfiable, e.g. by {}".format(
            cert.target, ", ".join("l{}={}".format(c, "other" if s is None else s) for c, s in enumerate(witness))))
    for sub in cert.subs:
        res = verify_certificate(sub, facts, _stack + (cert.target,))
        if not res:
            return res
    return CheckResult(True)


# -- verdicts -------------------------------------------------------------------

@dataclass(frozen=True)
class CoverVerdict:
    cover: DoubleCover = field(repr=False)
    names: Tuple[str, ...]
    status: str                        # "npf", "unknown" or "unresolved"
    name: Optional[str] = None         # alias carrying the certificate
    certificate: Optional[Certificate] = None

    @property
    def multiplicity(self) -> int:
        return self.cover.multiplicity

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return "=".join(self.names) if self.names else "?"


@dataclass(frozen=True)
class Verdict:
    name: str
    covers: Tuple[CoverVerdict, ...]
    self_certificate: Optional[Certificate] = None

    @property
    def no_pA_flow_complement(self) -> bool:
        return bool(self.covers) and all(c.status == "npf" for c in self.covers)

    @property
    def no_veering(self) -> bool:
        return self.no_pA_flow_complement

    @property
    def no_edge_orientable_veering(self) -> bool:
        return self.self_certificate is not None or self.no_veering

    @property
    def status(self) -> str:
        return "no-veering" if self.no_veering else "unknown"


def resolve_cover(dc: DoubleCover, facts: FactBase, tol: float = MATCH_TOL) -> List[str]:
    if dc.fingerprint is None or not dc.fingerprint.geometric:
        return []
    return facts.names_matching(dc.fingerprint, tol)


def obstruct_manifold(name: str, tri: Triangulation, facts: FactBase,
                      engine: Optional[NPFEngine] = None, tol: float = MATCH_TOL) -> Verdict:
    """
    Certify ``name`` has no veering triangulation via its double covers.

    Every double cover is matched to census names by fingerprint; a cover
    counts as NPF when any of its names has a certificate.  Covers without
    a match are reported as unresolved, which leaves the verdict unknown.
    """
    engine = engine or NPFEngine(facts)
    out = []
    for dc in enumerate_double_covers(tri):
        names = tuple(resolve_cover(dc, facts, tol))
        if not names:
            out.append(CoverVerdict(dc, (), "unresolved"))
            continue
        for alias in names:
            cert = engine.certify(alias)
            if cert is not None:
                out.append(CoverVerdict(dc, names, "npf", alias, cert))
                break
        else:
            out.append(CoverVerdict(dc, names, "unknown"))
    return Verdict(name, tuple(out), engine.certify(name))
