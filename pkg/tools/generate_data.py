"""
Regenerate the bundled census data under src/veerobs/data/.

Development-time only: needs SnapPy (triangulations, peripheral curves,
reference fingerprints) and the public veering census text file
(``veering_census_with_data.txt`` from the ``veering`` source package).
The fact tables (facts.csv, idents.csv, universal.csv) are hand-curated and
are not touched by this script.

    python tools/generate_data.py --veering-census path/to/veering_census_with_data.txt
"""
import argparse
import ast
import csv
import sys
from pathlib import Path

import snappy

sys.path.insert(0, str(Path(__file__).resolve().parent))
from snappy_export import CuspOrderMismatch, from_snappy  # noqa: E402

from veerobs.geometry import GeometryError, canonical_modulus, fingerprint, format_complex  # noqa: E402
from veerobs.geometry.fingerprint import format_cover_h1, sort_shapes  # noqa: E402
from veerobs.geometry.homology import format_h1  # noqa: E402
from veerobs.slopes import Slope  # noqa: E402
from veerobs.covers import double_cover_homology  # noqa: E402
from veerobs.triangulation import serialize  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "veerobs" / "data"

# names whose triangulations are bundled besides the first 100 census manifolds
EXTRA_TRIANGULATIONS = ["L5a1", "L8n5", "t12048", "t12066", "v3222", "s649"]

# partial fillings that must have a geometric solution on the bundled triangulation
REQUIRED_FILLINGS = {
    "t12048": [((2, 1), None), ((3, 1), None), ((3, 2), None)],
    "L8n5": [(None, (1, 2), (2, 1))],
    "v3222": [((1, 1), None), ((2, 1), None)],
    "t12066": [((2, 1), (2, 1), None), ((3, 1), (3, 1), None), ((2, 1), (3, 1), None), ((3, 1), (2, 1), None)],
}

FACT_NAMES = [
    "s649", "s874", "t07681", "t07933", "t07939", "v3222", "v3387", "v3431", "t09618", "t09795",
    "t10615", "t10708", "t10831", "t11579", "t11693", "t12066", "t12048", "t12038", "t12310",
    "o9_33110", "L8n5", "L5a1", "m035", "m307", "m149", "s673", "m288", "s778", "t07936", "t08875",
]


def reference_fingerprint_row(name):
    M = snappy.ManifoldHP(name)
    vol = float(M.volume())
    shapes = sort_shapes(canonical_modulus(complex(c["shape"])) for c in M.cusp_info())
    h1 = format_h1(_h1_tuple(M))
    covers = sorted(_h1_tuple(C) for C in M.covers(2))
    return "{},{},{:.12g},{},{},{}".format(name, M.num_cusps(), vol, ";".join(format_complex(s) for s in shapes),
                                          h1, format_cover_h1(covers))


def _h1_tuple(M):
    divs = M.homology().elementary_divisors()
    return tuple(sorted(d for d in divs if d > 1)) + tuple(d for d in divs if d == 0)


def _slopes(fill):
    return tuple(None if s is None else Slope.make(*s) for s in fill)


def good_triangulation(name, tries=400):
    """A triangulation of ``name`` on which the complete and required structures are geometric."""
    M = snappy.Manifold(name)
    required = REQUIRED_FILLINGS.get(name, [])
    expected = {}
    for fill in required:
        N = snappy.Manifold(name)
        for c, s in enumerate(fill):
            if s is not None:
                N.dehn_fill(s, c)
        expected[fill] = float(N.volume())
    for attempt in range(tries):
        if attempt:
            M.randomize()
        try:
            tri = from_snappy(M, name)
        except CuspOrderMismatch:
            continue
        try:
            ok = fingerprint(tri).geometric
            for fill in required:
                if not ok:
                    break
                fp = fingerprint(tri, _slopes(fill))
                ok = fp.geometric and abs(fp.volume - expected[fill]) < 1e-8
        except GeometryError:
            ok = False
        if ok:
            # peripheral framing must survive retriangulation
            for fill in required:
                N = M.copy()
                for c, s in enumerate(fill):
                    if s is not None:
                        N.dehn_fill(s, c)
                assert abs(float(N.volume()) - expected[fill]) < 1e-8
            if attempt:
                print("{}: {} tets after {} attempts".format(name, tri.tet_count, attempt), file=sys.stderr)
            return tri
    raise RuntimeError("no good triangulation found for " + name)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--veering-census", required=True)
    ap.add_argument("--sample", type=int, default=150, help="leading veering census entries to bundle")
    args = ap.parse_args()

    census = [snappy.OrientableCuspedCensus[i].name() for i in range(100)]
    (DATA / "tri").mkdir(parents=True, exist_ok=True)

    meta = []
    for name in census + EXTRA_TRIANGULATIONS:
        tri = good_triangulation(name)
        ours = double_cover_homology(tri)
        assert ours == tuple(sorted(_h1_tuple(C) for C in snappy.Manifold(name).covers(2))), name
        path = DATA / "tri" / "{}.tri".format(name)
        path.write_text(serialize(tri))
        meta.append((name, "tri/{}.tri".format(name), tri.tet_count, tri.cusp_count))
    with open(DATA / "triangulations.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "file", "tets", "cusps"])
        w.writerows(meta)
    with open(DATA / "census100.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "file"])
        for name in census:
            w.writerow([name, "tri/{}.tri".format(name)])

    names = list(dict.fromkeys(census + FACT_NAMES))
    for name in census:
        for cover in snappy.Manifold(name).covers(2):
            ids = cover.identify()
            if ids:
                names.append(ids[0].name())
    names = list(dict.fromkeys(names))
    rows = [reference_fingerprint_row(n) for n in names]
    with open(DATA / "fingerprints.csv", "w") as fh:
        fh.write("# reference values computed with SnapPy {} (high precision); cusp moduli reduced to the\n"
                 "# modular fundamental domain and folded to Re >= 0; cover_h1 lists H1 of each connected double cover\n".format(snappy.__version__))
        fh.write("name,cusps,volume,shapes,h1,cover_h1\n")
        fh.write("\n".join(rows) + "\n")

    in_census = set(census)
    picked = []
    with open(args.veering_census) as fh:
        for k, line in enumerate(fh):
            parts = line.split()
            sig, angle = parts[0].split("_")
            eo = parts[5]
            assert eo in ("E", "N"), line
            mnames = ast.literal_eval(line[line.rindex("["):])
            if k < args.sample or in_census & set(mnames):
                picked.append((sig, angle, eo, ";".join(mnames)))
    with open(DATA / "veering_census.csv", "w", newline="") as fh:
        fh.write("# subset of the public veering census: leading entries plus every entry naming one of the\n"
                 "# first 100 orientable cusped census manifolds; edge_orientable is the census E/N flag\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["isosig", "taut_angles", "edge_orientable", "names"])
        w.writerows(picked)


if __name__ == "__main__":
    main()
