"""
``veerobs`` command-line front end.

Exit codes: 0 success (or certified), 1 not certified / unknown / check
failed, 2 usage or input error.  Every subcommand writes its report to
standard output in a deterministic order; diagnostics go to standard error.

Wherever a triangulation is expected the argument may be a TRI file, a
bundled manifold name (``m006``) or ``isosig:<signature>``.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .catalog import (CatalogError, FactBase, default_data_dir, load_catalog, load_manifest,
                      load_veering_census, verify_identification)
from .covers import enumerate_double_covers, with_cover_homology
from .geometry import (MATCH_TOL, GeometryError, assemble_system, fingerprint, format_complex,
                       residual, solve_shapes, volume)
from .geometry.gluing import SOLVER_TOL, set_solver_tolerance
from .isosig import decode_isosig
from .obstruction import (Certificate, CertificateSyntaxError, NPFEngine, Verdict, obstruct_manifold,
                          parse_certificate, verify_certificate)
from .slopes import SlopeError, complete, parse_filling
from .triangulation import Triangulation, TriangulationError, parse_triangulation
from .veering import (CHIRALITIES, VeeringStructure, all_veering, find_veering, is_edge_orientable,
                      verify_veering)

EXIT_OK, EXIT_NO, EXIT_INPUT = 0, 1, 2
RANGES = {"census100": "census100.csv"}


class InputError(Exception):
    """Bad command-line input; reported on stderr with exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    data: Path
    tol_solver: float
    tol_match: float
    fmt: str
    jobs: int

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        data = Path(args.data) if args.data else default_data_dir()
        if not data.exists():
            raise InputError("data directory {} does not exist".format(data))
        for flag, value in (("--tol-solver", args.tol_solver), ("--tol-match", args.tol_match)):
            if not value > 0:
                raise InputError("{} must be positive".format(flag))
        if args.jobs < 1:
            raise InputError("--jobs must be at least 1")
        return cls(data, args.tol_solver, args.tol_match, args.format, args.jobs)

    def facts(self) -> FactBase:
        return load_catalog(self.data)


# -- input helpers ----------------------------------------------------------------

def load_input(source: str, cfg: Optional[RunConfig] = None, facts: Optional[FactBase] = None) -> Triangulation:
    if source.startswith("isosig:"):
        return decode_isosig(source[len("isosig:"):], name=source[len("isosig:"):])
    path = Path(source)
    if path.is_file():
        return parse_triangulation(path.read_text(encoding="utf-8"), name=path.stem)
    if cfg is not None:
        facts = facts or cfg.facts()
        if source in facts.tri_paths:
            return facts.triangulation(source)
    raise InputError("{!r} is neither a file, a bundled name nor isosig:<sig>".format(source))


def _filling(text: Optional[str], tri: Triangulation):
    if text is None:
        return complete(tri.cusp_count)
    fill = parse_filling(text)
    if len(fill) != tri.cusp_count:
        raise InputError("filling {} has {} entries but the triangulation has {} cusps".format(
            text, len(fill), tri.cusp_count))
    return fill


def _emit_rows(out, cfg: RunConfig, header: Sequence[str], rows: Sequence[Sequence[object]]):
    if cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


# -- tri ------------------------------------------------------------------------------

def cmd_tri_validate(args, cfg, out):
    status = EXIT_OK
    rows = []
    for source in args.inputs:
        try:
            tri = load_input(source, cfg)
        except (TriangulationError, OSError) as exc:
            rows.append((source, "invalid", str(exc)))
            status = EXIT_INPUT
            continue
        probs = tri.problems()
        if probs:
            rows.append((source, "invalid", "; ".join(probs)))
            status = EXIT_INPUT
        else:
            rows.append((source, "ok", "{} tets, {} edges, {} cusps".format(
                tri.tet_count, len(tri.edge_classes), tri.cusp_count)))
    _emit_rows(out, cfg, ("input", "status", "detail"), rows)
    return status


# -- veering --------------------------------------------------------------------------

def _chiralities(arg):
    return CHIRALITIES if arg == "both" else (arg,)


def cmd_veering_search(args, cfg, out):
    tri = load_input(args.input, cfg)
    tri.require_valid()
    chir = _chiralities(args.chirality)
    found = [vs for vs in all_veering(tri) if vs.chirality in chir] if args.all else \
        [vs for vs in [find_veering(tri, chir)] if vs is not None]
    if not found:
        out.write("{}: no veering structure\n".format(tri.name or args.input))
        return EXIT_NO
    rows = [(str(vs), "E" if is_edge_orientable(tri, vs) else "N") for vs in found]
    _emit_rows(out, cfg, ("structure", "edge_orientable"), rows)
    return EXIT_OK


def _structure(tri, text):
    if text is None:
        vs = find_veering(tri)
        if vs is None:
            raise InputError("{} has no veering structure to check".format(tri.name))
        return vs
    path = Path(text)
    if path.is_file():
        text = path.read_text(encoding="utf-8").strip()
    try:
        return VeeringStructure.parse(text)
    except ValueError as exc:
        raise InputError("cannot parse structure {!r}: {}".format(text, exc)) from None


def cmd_veering_check(args, cfg, out):
    tri = load_input(args.input, cfg)
    vs = _structure(tri, args.structure)
    report = verify_veering(tri, vs)
    out.write("{}: {}\n".format(tri.name or args.input, report))
    return EXIT_OK if report else EXIT_NO


def cmd_veering_edge_orientable(args, cfg, out):
    tri = load_input(args.input, cfg)
    tri.require_valid()
    vs = _structure(tri, args.structure)
    report = verify_veering(tri, vs)
    if not report:
        out.write("{}: not veering ({})\n".format(tri.name or args.input, report))
        return EXIT_NO
    flag = is_edge_orientable(tri, vs)
    out.write("{}: {} ({})\n".format(tri.name or args.input, "edge-orientable" if flag
                                     else "not edge-orientable", vs))
    return EXIT_OK


# -- covers ---------------------------------------------------------------------------

def cmd_covers_list(args, cfg, out):
    facts = cfg.facts()
    tri = load_input(args.input, cfg, facts)
    tri.require_valid()
    covers = enumerate_double_covers(tri, dedup=not args.all)
    rows = []
    export = Path(args.export) if args.export else None
    if export:
        export.mkdir(parents=True, exist_ok=True)
    for dc in covers:
        fp = dc.fingerprint
        names = facts.names_matching(fp, cfg.tol_match) if fp is not None and fp.geometric else []
        vol = "{:.10f}".format(fp.volume) if fp is not None and fp.geometric else "-"
        rows.append((str(dc.cocycle), dc.multiplicity, dc.cover.tet_count, dc.cover.cusp_count, vol,
                     ";".join(names) or "?"))
        if export:
            stem = "{}~{}".format(tri.name or "cover", dc.cocycle)
            (export / (stem + ".tri")).write_text(dc.to_tri(), encoding="utf-8")
            (export / (stem + ".proj")).write_text(dc.sidecar(), encoding="utf-8")
    _emit_rows(out, cfg, ("cocycle", "classes", "tets", "cusps", "volume", "names"), rows)
    return EXIT_OK


# -- geom -----------------------------------------------------------------------------

def _solve(args, cfg):
    tri = load_input(args.input, cfg)
    tri.require_valid()
    fill = _filling(args.fill, tri)
    system = assemble_system(tri)
    return tri, fill, system, solve_shapes(system, fill, tol=cfg.tol_solver)


def cmd_geom_solve(args, cfg, out):
    tri, fill, system, z = _solve(args, cfg)
    rows = [(t, format_complex(complex(round(w.real, 12), round(w.imag, 12)))) for t, w in enumerate(z)]
    _emit_rows(out, cfg, ("tet", "shape"), rows)
    if cfg.fmt == "text":
        out.write("residual {:.1e}\n".format(residual(system, fill, z)))
    return EXIT_OK


def cmd_geom_volume(args, cfg, out):
    tri, fill, _, z = _solve(args, cfg)
    out.write("{:.12f}\n".format(volume(z)))
    return EXIT_OK


def cmd_geom_fingerprint(args, cfg, out):
    tri = load_input(args.input, cfg)
    tri.require_valid()
    fill = _filling(args.fill, tri)
    fp = fingerprint(tri, fill)
    if all(s is None for s in fill):
        fp = with_cover_homology(fp, tri)
    if cfg.fmt == "csv":
        out.write("name,cusps,volume,shapes,h1,cover_h1\n")
    out.write(fp.to_row(tri.name or args.input) + "\n")
    if not fp.geometric:
        sys.stderr.write("not geometric: {}\n".format(fp.note))
        return EXIT_NO
    return EXIT_OK


# -- catalog --------------------------------------------------------------------------

def cmd_catalog_verify_idents(args, cfg, out):
    facts = cfg.facts()
    rows = []
    ok = True
    for f in facts.idents:
        rep = verify_identification(f, facts, tol=cfg.tol_match)
        ok &= rep.status == "pass"
        rows.append((f.fact_id, rep.status, rep.detail))
    _emit_rows(out, cfg, ("fact", "status", "detail"), rows)
    return EXIT_OK if ok else EXIT_NO


# -- obstruct -------------------------------------------------------------------------

def _checked(verdict: Verdict, facts: FactBase) -> Tuple[Verdict, List[str]]:
    """Re-verify every certificate in ``verdict``; failures are downgraded to unknown."""
    notes = []
    covers = []
    for cv in verdict.covers:
        if cv.certificate is not None:
            res = verify_certificate(cv.certificate, facts)
            if not res:
                notes.append("certificate for {} rejected: {}".format(cv.label, res.reason))
                cv = type(cv)(cv.cover, cv.names, "unknown")
        covers.append(cv)
    selfcert = verdict.self_certificate
    if selfcert is not None and not verify_certificate(selfcert, facts):
        notes.append("certificate for {} rejected".format(verdict.name))
        selfcert = None
    return Verdict(verdict.name, tuple(covers), selfcert), notes


def _cover_summary(v: Verdict) -> str:
    parts = []
    for cv in v.covers:
        mult = "x{}".format(cv.multiplicity) if cv.multiplicity > 1 else ""
        parts.append("{}{}[{}]".format(cv.label, mult, cv.status))
    return " ".join(parts)


def cmd_obstruct_certify(args, cfg, out):
    facts = cfg.facts()
    tri = load_input(args.input, cfg, facts)
    tri.require_valid()
    name = tri.name or args.input
    verdict, notes = _checked(obstruct_manifold(name, tri, facts, tol=cfg.tol_match), facts)
    out.write("{}: {}\n".format(name, verdict.status))
    for cv in verdict.covers:
        out.write("  double cover {} (cocycle {}, {} class{}): {}\n".format(
            cv.label, cv.cover.cocycle, cv.multiplicity, "" if cv.multiplicity == 1 else "es", cv.status))
        if cv.certificate is not None:
            for line in cv.certificate.to_text().splitlines():
                out.write("    " + line + "\n")
    for note in notes:
        out.write("  warning: " + note + "\n")
    if verdict.self_certificate is not None:
        out.write("  {} itself is not persistently foliar: no edge-orientable veering triangulation\n".format(name))
    if args.out:
        certs = [cv.certificate for cv in verdict.covers if cv.certificate is not None]
        Path(args.out).write_text("".join(c.to_text() for c in certs), encoding="utf-8")
    return EXIT_OK if verdict.no_veering else EXIT_NO


def cmd_obstruct_verify(args, cfg, out):
    facts = cfg.facts()
    try:
        text = Path(args.certificate).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from None
    certs = _split_certificates(text)
    status = EXIT_OK
    for cert in certs:
        res = verify_certificate(cert, facts)
        out.write("npf {}: {}\n".format(cert.target, "verified" if res else "rejected: " + res.reason))
        if not res:
            status = EXIT_NO
    return status


def _split_certificates(text: str) -> List[Certificate]:
    """Parse a file holding one or more root certificates (each with its sub-records)."""
    try:
        whole = parse_certificate(text)
    except CertificateSyntaxError as exc:
        raise InputError("certificate: {}".format(exc)) from None
    roots = [whole]
    covered = {c.target for c in whole.walk()}
    blocks, cur = [], []
    for line in text.splitlines():
        if line.startswith("npf ") and cur:
            blocks.append(cur)
            cur = []
        cur.append(line)
    if cur:
        blocks.append(cur)
    for i, block in enumerate(blocks):
        target = block[0][4:].strip()
        if target in covered:
            continue
        try:
            cert = parse_certificate("\n".join(sum(blocks[i:], [])))
        except CertificateSyntaxError as exc:
            raise InputError("certificate: {}".format(exc)) from None
        roots.append(cert)
        covered |= {c.target for c in cert.walk()}
    return roots


def _report_one(job):
    name, path, data, tol_match, tol_solver = job
    set_solver_tolerance(tol_solver)
    facts = load_catalog(data)
    tri = parse_triangulation(Path(path).read_text(encoding="utf-8"), name=name)
    verdict, notes = _checked(obstruct_manifold(name, tri, facts, tol=tol_match), facts)
    return name, verdict.status, _cover_summary(verdict), verdict.self_certificate is not None, notes


def cmd_obstruct_report(args, cfg, out):
    if args.manifest:
        manifest = Path(args.manifest)
    else:
        manifest = cfg.data / RANGES[args.range]
    if not manifest.is_file():
        raise InputError("manifest {} not found".format(manifest))
    entries = load_manifest(manifest)
    facts = cfg.facts()
    census = {n for e in load_veering_census(cfg.data / "veering_census.csv") for n in e.names} \
        if (cfg.data / "veering_census.csv").is_file() else set()
    if cfg.jobs > 1:
        jobs = [(n, str(p), str(cfg.data), cfg.tol_match, cfg.tol_solver) for n, p in entries]
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_report_one, jobs))
    else:
        engine = NPFEngine(facts)
        results = []
        for name, path in entries:
            tri = parse_triangulation(Path(path).read_text(encoding="utf-8"), name=name)
            verdict, notes = _checked(obstruct_manifold(name, tri, facts, engine, tol=cfg.tol_match), facts)
            results.append((name, verdict.status, _cover_summary(verdict),
                            verdict.self_certificate is not None, notes))
    rows = [(name, status, "yes" if name in census else "no", "npf" if npf else "-", covers)
            for name, status, covers, npf, _ in results]
    _emit_rows(out, cfg, ("name", "verdict", "veering_census", "self", "double_covers"), rows)
    for name, _, _, _, notes in results:
        for note in notes:
            sys.stderr.write("{}: {}\n".format(name, note))
    if cfg.fmt == "text":
        no_veering = [r[0] for r in rows if r[1] == "no-veering"]
        in_census = [r[0] for r in rows if r[2] == "yes"]
        out.write("\nappears in the veering census ({}): {}\n".format(len(in_census), ", ".join(in_census)))
        out.write("has no veering triangulations ({}): {}\n".format(len(no_veering), ", ".join(no_veering)))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="data directory (default: bundled data)")
    common.add_argument("--tol-solver", type=float, default=SOLVER_TOL, help="gluing equation residual bound")
    common.add_argument("--tol-match", type=float, default=MATCH_TOL, help="fingerprint matching tolerance")
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch commands")

    ap = argparse.ArgumentParser(prog="veerobs", description="Veering triangulations and foliation obstructions.")
    ap.add_argument("--version", action="version", version="%(prog)s " + __version__)
    groups = ap.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    g = groups.add_parser("tri", help="triangulation files").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "validate", cmd_tri_validate, "check TRI files for consistency")
    p.add_argument("inputs", nargs="+")

    g = groups.add_parser("veering", help="veering structures").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "search", cmd_veering_search, "search for a veering structure")
    p.add_argument("input")
    p.add_argument("--chirality", choices=("L", "R", "both"), default="both")
    p.add_argument("--all", action="store_true", help="list every structure")
    p = leaf(g, "check", cmd_veering_check, "verify a structure 'bits colours chirality'")
    p.add_argument("input")
    p.add_argument("structure", nargs="?", help="structure string or file (default: search)")
    p = leaf(g, "edge-orientable", cmd_veering_edge_orientable, "edge-orientability of a veering structure")
    p.add_argument("input")
    p.add_argument("structure", nargs="?")

    g = groups.add_parser("covers", help="double covers").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "list", cmd_covers_list, "list connected double covers")
    p.add_argument("input")
    p.add_argument("--all", action="store_true", help="one row per cohomology class, no grouping")
    p.add_argument("--export", metavar="DIR", help="write each cover as TRI plus a .proj sidecar")

    g = groups.add_parser("geom", help="hyperbolic geometry").add_subparsers(dest="cmd", required=True)
    for name, func in (("solve", cmd_geom_solve), ("volume", cmd_geom_volume),
                       ("fingerprint", cmd_geom_fingerprint)):
        p = leaf(g, name, func, name + " for a (partial) filling")
        p.add_argument("input")
        p.add_argument("--fill", help="filling such as '(2;*)' or '(-3/1)'; default complete")

    g = groups.add_parser("catalog", help="fact catalog").add_subparsers(dest="cmd", required=True)
    leaf(g, "verify-idents", cmd_catalog_verify_idents, "recompute identification facts")

    g = groups.add_parser("obstruct", help="double-cover obstruction").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "certify", cmd_obstruct_certify, "certify that a manifold has no veering triangulation")
    p.add_argument("input")
    p.add_argument("--out", help="write the cover certificates to this file")
    p = leaf(g, "verify", cmd_obstruct_verify, "check a certificate file")
    p.add_argument("certificate")
    p = leaf(g, "report", cmd_obstruct_report, "table over a manifest")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--range", choices=sorted(RANGES), default="census100")
    src.add_argument("--manifest", help="name,file manifest instead of a bundled range")
    return ap


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    buf = io.StringIO()
    old_tol = None
    try:
        cfg = RunConfig.from_args(args)
        old_tol = set_solver_tolerance(cfg.tol_solver)
        code = args.func(args, cfg, buf)
    except (InputError, TriangulationError, CatalogError, SlopeError, OSError) as exc:
        sys.stderr.write("veerobs: error: {}\n".format(exc))
        return EXIT_INPUT
    except GeometryError as exc:
        out.write(buf.getvalue())
        sys.stderr.write("veerobs: {}\n".format(exc))
        return EXIT_NO
    finally:
        if old_tol is not None:
            set_solver_tolerance(old_tol)
    out.write(buf.getvalue())
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
