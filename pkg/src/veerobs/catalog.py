"""
Census records and the fact tables the obstruction engine reasons with.

All tables are CSV files with a header row; lines starting with ``#`` are
comments.  The file kind is recognised from its header:

==================  ===================================
header              contents
==================  ===================================
name,cusps,...      reference fingerprints
name,slopes,status  fillings known to be non-taut
base,partial,result partial fillings identified by name
base,partial,just.. partial fillings all of whose completions are non-taut
name,file,...       triangulation manifest (TRI-v1 paths)
==================  ===================================
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .geometry import MATCH_TOL, Fingerprint, fingerprint
from .geometry.fingerprint import parse_fingerprint_fields
from .slopes import Filling, SlopeError, format_filling, parse_filling
from .triangulation import Triangulation, parse_triangulation

NON_TAUT = "non-taut"


class CatalogError(ValueError):
    pass


class ParseError(CatalogError):
    def __init__(self, message, path=None, lineno=None):
        self.path, self.lineno = path, lineno
        where = "{}:{}: ".format(path, lineno) if lineno is not None else ""
        super().__init__(where + message)


class DanglingName(CatalogError):
    pass


class SlopeArityMismatch(CatalogError):
    pass


class MissingTriangulation(CatalogError, LookupError):
    pass


@dataclass(frozen=True)
class ManifoldRecord:
    name: str
    fingerprint: Fingerprint


@dataclass(frozen=True)
class FillingFact:
    name: str
    slopes: Filling
    status: str = NON_TAUT

    @property
    def fact_id(self) -> str:
        return "nontaut:{}{}".format(self.name, format_filling(self.slopes))


@dataclass(frozen=True)
class IdentificationFact:
    base: str
    partial: Filling
    result: str

    @property
    def fact_id(self) -> str:
        return "ident:{}{}={}".format(self.base, format_filling(self.partial), self.result)


@dataclass(frozen=True)
class UniversalFact:
    base: str
    partial: Filling
    justification: str

    @property
    def fact_id(self) -> str:
        return "universal:{}{}".format(self.base, format_filling(self.partial))


@dataclass(frozen=True)
class FactBase:
    records: Mapping[str, ManifoldRecord] = field(default_factory=dict)
    fillings: Tuple[FillingFact, ...] = ()
    idents: Tuple[IdentificationFact, ...] = ()
    universals: Tuple[UniversalFact, ...] = ()
    tri_paths: Mapping[str, Path] = field(default_factory=dict)
    nameless: Tuple[str, ...] = ()

    # -- queries ---------------------------------------------------------------

    def cusp_count(self, name: str) -> Optional[int]:
        rec = self.records.get(name)
        return rec.fingerprint.cusp_count if rec else None

    def fact(self, fact_id: str):
        return self._by_id.get(fact_id)

    @property
    def _by_id(self):
        cache = self.__dict__.get("_id_cache")
        if cache is None:
            cache = {f.fact_id: f for f in self.fillings + self.idents + self.universals}
            object.__setattr__(self, "_id_cache", cache)
        return cache

    def fillings_of(self, name: str) -> List[FillingFact]:
        return [f for f in self.fillings if f.name == name]

    def idents_of(self, name: str) -> List[IdentificationFact]:
        return [f for f in self.idents if f.base == name]

    def universals_of(self, name: str) -> List[UniversalFact]:
        return [f for f in self.universals if f.base == name]

    def names_matching(self, fp: Fingerprint, tol: float = MATCH_TOL) -> List[str]:
        """Every record whose fingerprint matches ``fp``, in sorted order."""
        return sorted(n for n, r in self.records.items() if r.fingerprint.matches(fp, tol))

    def triangulation(self, name: str) -> Triangulation:
        path = self.tri_paths.get(name)
        if path is None:
            raise MissingTriangulation("no triangulation bundled for {!r}".format(name))
        return parse_triangulation(Path(path).read_text(), name=name)

    def with_facts(self, fillings=None, idents=None, universals=None) -> "FactBase":
        """Copy with some fact lists replaced (records and triangulations kept)."""
        return FactBase(self.records,
                        tuple(self.fillings if fillings is None else fillings),
                        tuple(self.idents if idents is None else idents),
                        tuple(self.universals if universals is None else universals),
                        self.tri_paths, self.nameless)

    def __len__(self):
        return len(self.fillings) + len(self.idents) + len(self.universals)


# -- loading -------------------------------------------------------------------

def default_data_dir() -> Path:
    return Path(str(resources.files("veerobs") / "data"))


def _rows(text: str, path):
    lines = [(i + 1, line) for i, line in enumerate(text.splitlines())
             if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        return None, []
    reader = csv.reader(io.StringIO("\n".join(line for _, line in lines)))
    parsed = list(reader)
    header = [h.strip() for h in parsed[0]]
    body = [(lines[k][0], [c.strip() for c in row]) for k, row in enumerate(parsed) if k > 0]
    return header, body


def _parse_filling(text, path, lineno):
    try:
        return parse_filling(text)
    except SlopeError as exc:
        raise ParseError(str(exc), path, lineno) from None


def _expand(paths) -> List[Path]:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(p.glob("*.csv")))
        else:
            out.append(p)
    return out


def load_catalog(paths: Union[str, Path, Iterable[Union[str, Path]]], allow_nameless: bool = False) -> FactBase:
    """
    Load fingerprint records, fact tables and triangulation manifests.

    ``paths`` may mix files and directories (every ``*.csv`` in a directory
    is read).  Facts are de-duplicated and sorted, so loading is idempotent
    and independent of file order.  Names used by facts must have a
    fingerprint record unless ``allow_nameless`` is set, in which case they
    are listed in ``FactBase.nameless`` and arity checks are skipped for them.
    """
    records: Dict[str, ManifoldRecord] = {}
    fillings, idents, universals = set(), set(), set()
    tri_paths: Dict[str, Path] = {}
    for path in _expand(paths):
        header, body = _rows(path.read_text(encoding="utf-8"), path)
        if header is None:
            continue
        kind = tuple(header[:3])
        for lineno, row in body:
            if len(row) < len(header) and kind != ("name", "file"):
                raise ParseError("expected {} fields, got {}".format(len(header), len(row)), path, lineno)
            if kind == ("name", "cusps", "volume"):
                name = row[0]
                try:
                    fp = parse_fingerprint_fields(*row[1:6])
                except (ValueError, IndexError) as exc:
                    raise ParseError(str(exc), path, lineno) from None
                if name in records and records[name].fingerprint != fp:
                    raise ParseError("conflicting records for {}".format(name), path, lineno)
                records[name] = ManifoldRecord(name, fp)
            elif kind == ("name", "slopes", "status"):
                if row[2] != NON_TAUT:
                    raise ParseError("unknown status {!r}".format(row[2]), path, lineno)
                slopes = _parse_filling(row[1], path, lineno)
                if any(s is None for s in slopes):
                    raise ParseError("filling facts need a slope on every cusp", path, lineno)
                fillings.add(FillingFact(row[0], slopes, row[2]))
            elif kind == ("base", "partial", "result"):
                partial = _parse_filling(row[1], path, lineno)
                if all(s is not None for s in partial):
                    raise ParseError("identification needs at least one unfilled cusp", path, lineno)
                if all(s is None for s in partial):
                    raise ParseError("identification needs at least one filled cusp", path, lineno)
                idents.add(IdentificationFact(row[0], partial, row[2]))
            elif kind == ("base", "partial", "justification"):
                partial = _parse_filling(row[1], path, lineno)
                universals.add(UniversalFact(row[0], partial, row[2]))
            elif kind[:2] == ("name", "file"):
                tri_paths[row[0]] = path.parent / row[1]
            elif kind[:1] == ("isosig",):
                break  # veering census subset, read by load_veering_census
            else:
                raise ParseError("unrecognised header {}".format(",".join(header)), path, 1)
    base = FactBase(records, tuple(sorted(fillings, key=lambda f: f.fact_id)),
                    tuple(sorted(idents, key=lambda f: f.fact_id)),
                    tuple(sorted(universals, key=lambda f: f.fact_id)), tri_paths)
    return _check(base, allow_nameless)


def _check(fb: FactBase, allow_nameless: bool) -> FactBase:
    nameless = set()

    def arity(name, n, what):
        k = fb.cusp_count(name)
        if k is None:
            if not allow_nameless:
                raise DanglingName("{} refers to {!r}, which has no fingerprint record".format(what, name))
            nameless.add(name)
            return
        if k != n:
            raise SlopeArityMismatch("{}: {} slopes for {} with {} cusp(s)".format(what, n, name, k))

    for f in fb.fillings:
        arity(f.name, len(f.slopes), f.fact_id)
    for f in fb.universals:
        arity(f.base, len(f.partial), f.fact_id)
    for f in fb.idents:
        arity(f.base, len(f.partial), f.fact_id)
        holes = sum(1 for s in f.partial if s is None)
        k = fb.cusp_count(f.result)
        if k is None:
            if not allow_nameless:
                raise DanglingName("{} refers to {!r}, which has no fingerprint record".format(f.fact_id, f.result))
            nameless.add(f.result)
        elif k != holes:
            raise SlopeArityMismatch("{}: {} unfilled cusp(s) but {} has {}".format(f.fact_id, holes, f.result, k))
    return FactBase(fb.records, fb.fillings, fb.idents, fb.universals, fb.tri_paths, tuple(sorted(nameless)))


def load_default() -> FactBase:
    return load_catalog(default_data_dir())


# -- identification checks ------------------------------------------------------

@dataclass(frozen=True)
class IdentReport:
    fact: IdentificationFact
    status: str                 # "pass", "fail" or "non-geometric"
    computed: Optional[Fingerprint] = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def __str__(self):
        return "{} {}{}".format(self.status, self.fact.fact_id, ": " + self.detail if self.detail else "")


def verify_identification(f: IdentificationFact, base: FactBase,
                          tris: Optional[Mapping[str, Triangulation]] = None,
                          tol: float = MATCH_TOL) -> IdentReport:
    """Fingerprint the partial filling of the base and compare with the result's record."""
    tri = tris.get(f.base) if tris else None
    if tri is None:
        tri = base.triangulation(f.base)
    if tri.cusp_count != len(f.partial):
        raise SlopeArityMismatch("{}: triangulation has {} cusps".format(f.fact_id, tri.cusp_count))
    rec = base.records.get(f.result)
    if rec is None:
        raise DanglingName("no fingerprint record for {!r}".format(f.result))
    fp = fingerprint(tri, f.partial)
    if not fp.geometric:
        return IdentReport(f, "non-geometric", fp, fp.note)
    if fp.matches(rec.fingerprint, tol):
        return IdentReport(f, "pass", fp, "volume {:.9f}".format(fp.volume))
    return IdentReport(f, "fail", fp, "computed volume {:.9f} vs {:.9f}".format(
        fp.volume, rec.fingerprint.volume if rec.fingerprint.volume is not None else float("nan")))


def load_veering_census(path=None) -> List["VeeringCensusEntry"]:
    path = Path(path) if path else default_data_dir() / "veering_census.csv"
    header, body = _rows(path.read_text(encoding="utf-8"), path)
    if header is None:
        return []
    if header[:4] != ["isosig", "taut_angles", "edge_orientable", "names"]:
        raise ParseError("unexpected header for the veering census", path, 1)
    out = []
    for lineno, row in body:
        if row[2] not in ("E", "N"):
            raise ParseError("edge_orientable must be E or N", path, lineno)
        out.append(VeeringCensusEntry(row[0], row[1], row[2] == "E", tuple(row[3].split(";"))))
    return out


@dataclass(frozen=True)
class VeeringCensusEntry:
    isosig: str
    taut_angles: str
    edge_orientable: bool
    names: Tuple[str, ...]


def load_manifest(path) -> List[Tuple[str, Path]]:
    """``(name, tri path)`` pairs of a ``name,file`` manifest, in file order."""
    path = Path(path)
    header, body = _rows(path.read_text(encoding="utf-8"), path)
    if header is None or header[:2] != ["name", "file"]:
        raise ParseError("manifest needs a name,file header", path, 1)
    return [(row[0], path.parent / row[1]) for _, row in body]
