import io

from veerobs.catalog import default_data_dir
from veerobs.cli import run

from _fixtures import census

DATA = str(default_data_dir())


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def test_certify_m006_names_cover_and_slopes():
    code, text = call("obstruct", "certify", "m006", "--data", DATA)
    assert code == 0
    assert "double cover s649" in text
    assert "l0=-1/3" in text and "l0=-1/4" in text


def test_certify_unknown_exit_code():
    code, text = call("obstruct", "certify", "m004")
    assert code == 1 and "unknown" in text


def test_certificate_file_verifies(tmp_path):
    cert = tmp_path / "l5a1.cert"
    assert call("obstruct", "certify", "L5a1", "--out", str(cert))[0] == 0
    code, text = call("obstruct", "verify", str(cert))
    assert code == 0
    assert text.splitlines() == ["npf L8n5: verified", "npf t12048: verified"]
    cert.write_text(cert.read_text().replace("l0=-1/3", "l0=-1/5"))
    assert call("obstruct", "verify", str(cert))[0] == 1
    cert.write_text("npf nothing\n  clause l0=1\n")
    assert call("obstruct", "verify", str(cert))[0] == 2


def test_veering_search_on_isosig():
    sig = next(e.isosig for e in census() if "m004" in e.names)
    code, text = call("veering", "search", "isosig:" + sig)
    assert code == 0
    structure = text.splitlines()[1].split()
    assert len(structure) == 4 and structure[2] in ("L", "R")
    assert call("veering", "check", "isosig:" + sig, " ".join(structure[:3]))[0] == 0
    assert call("veering", "search", "m006")[0] == 1


def test_edge_orientable_subcommand():
    code, text = call("veering", "edge-orientable", "m003")
    assert code == 0 and "not edge-orientable" in text
    code, text = call("veering", "edge-orientable", "m004")
    assert code == 0 and text.startswith("m004: edge-orientable")


def test_geometry_commands():
    code, text = call("geom", "volume", "m004")
    assert code == 0 and text.strip() == "2.029883212819"
    code, text = call("geom", "volume", "t12048", "--fill", "(2;*)")
    assert code == 0 and text.strip().startswith("5.33348956")
    code, text = call("geom", "fingerprint", "m006", "--format", "csv")
    assert code == 0 and text.splitlines()[0].startswith("name,cusps")
    assert call("geom", "volume", "m004", "--fill", "(inf)")[0] == 1
    assert call("geom", "volume", "m004", "--fill", "(1;2)")[0] == 2


def test_covers_list_and_export(tmp_path):
    code, text = call("covers", "list", "L5a1", "--export", str(tmp_path))
    assert code == 0
    assert "L8n5;t12066" in text and "t12048" in text
    assert len(list(tmp_path.glob("*.tri"))) == 2 and len(list(tmp_path.glob("*.proj"))) == 2
    code, text = call("tri", "validate", *map(str, sorted(tmp_path.glob("*.tri"))))
    assert code == 0 and text.count(" ok ") == 2


def test_catalog_verify_idents():
    code, text = call("catalog", "verify-idents", "--format", "csv")
    assert code == 0
    rows = text.splitlines()
    assert rows[0] == "fact,status,detail" and len(rows) == 11
    assert all(",pass," in r for r in rows[1:])


def test_input_errors(tmp_path):
    assert call("geom", "volume", "no-such-manifold")[0] == 2
    assert call("geom", "volume", "m004", "--tol-solver", "-1")[0] == 2
    assert call("obstruct", "report", "--data", str(tmp_path / "missing"))[0] == 2
    assert call("bogus")[0] == 2
    bad = tmp_path / "bad.tri"
    bad.write_text("% TRI v1\ntets 1\n0: 0:1023 0:1023 0:0132 0:0132\n")
    code, text = call("tri", "validate", str(bad))
    assert code == 2 and "invalid" in text
    assert call("veering", "search", str(bad))[0] == 2
    assert call("veering", "search", "isosig:!!")[0] == 2


def test_report_is_deterministic_and_parallel_safe():
    a = call("obstruct", "report", "--range", "census100")
    b = call("obstruct", "report", "--range", "census100", "--jobs", "2")
    assert a == b and a[0] == 0
    csv_code, csv_text = call("obstruct", "report", "--format", "csv")
    assert csv_text.splitlines()[0] == "name,verdict,veering_census,self,double_covers"
    assert len(csv_text.splitlines()) == 101
