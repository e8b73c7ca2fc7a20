import random

import pytest
from hypothesis import given, strategies as st

from veerobs.obstruction import (CertificateSyntaxError, Clause, CyclicIdentification, NPFEngine,
                                 certify_npf, clause_set_satisfiable, clauses_from_facts, obstruct_manifold,
                                 parse_certificate, verify_certificate)
from veerobs.catalog import IdentificationFact, ParseError, default_data_dir, load_catalog
from veerobs.slopes import Slope

from _fixtures import NO_VEERING_NAMES, facts, tri
from _tamper import KINDS, tamper

S = Slope.parse


def clause(*lits, source="x"):
    return Clause(tuple((c, S(s)) for c, s in lits), source)


def test_one_cusp_clauses():
    assert not clause_set_satisfiable([clause((0, "-1/3")), clause((0, "-1/4"))], 1)[0]
    sat, witness = clause_set_satisfiable([clause((0, "-1/3"))], 1)
    assert sat and witness == (S("-1/3"),)
    assert clause_set_satisfiable([], 1) == (True, (None,))


def test_two_cusp_clauses():
    cls = [clause((0, "1"), (1, "2")), clause((0, "3")), clause((1, "4"))]
    assert not clause_set_satisfiable(cls, 2)[0]
    sat, witness = clause_set_satisfiable(cls[:2], 2)
    assert sat and witness[0] == S("3")
    # a clause naming one cusp twice
    assert clause_set_satisfiable([clause((0, "1"), (1, "1")), clause((0, "2"))], 2)[0]


def test_m006_cover_certificate():
    fb = facts()
    cert = certify_npf("s649", fb)
    assert cert is not None
    assert sorted(str(c) for c in cert.clauses) == ["l0=-1/3", "l0=-1/4"]
    assert verify_certificate(cert, fb)


def test_clauses_from_facts_respects_oracle():
    fb = facts()
    without = clauses_from_facts("L8n5", fb)
    with_ = clauses_from_facts("L8n5", fb, lambda name: name == "m149")
    assert len(with_) == len(without) + 1
    assert with_[-1].uses == "m149"


def test_universal_and_identification_chain():
    fb = facts()
    cert = certify_npf("L8n5", fb)
    assert cert is not None and verify_certificate(cert, fb)
    assert [s.target for s in cert.subs] == ["m149"]
    assert certify_npf("t12048", fb) is not None


def test_certificates_are_minimal():
    fb = facts()
    engine = NPFEngine(fb)
    for name in ["s649", "L8n5", "t12048", "t12066"]:
        cert = engine.certify(name)
        k = fb.cusp_count(name)
        for i in range(len(cert.clauses)):
            rest = cert.clauses[:i] + cert.clauses[i + 1:]
            assert clause_set_satisfiable(rest, k)[0]


def test_text_round_trip():
    fb = facts()
    for name in ["s649", "L8n5", "t12066"]:
        cert = certify_npf(name, fb)
        again = parse_certificate(cert.to_text())
        assert again == cert
        assert verify_certificate(again, fb)


@pytest.mark.parametrize("text", [
    "",
    "clause l0=1 ; from x\n",
    "npf a\n  clause l0=1\n",
    "npf a\n  clause q0=1 ; from x\n",
    "npf a\n  uses b\n",
    "npf a\n  uses b\nnpf b\n  uses a\n",
    "npf a\nnpf a\n",
    "npf a\n  wibble\n",
])
def test_certificate_syntax_errors(text):
    with pytest.raises(CertificateSyntaxError):
        parse_certificate(text)


def _all_certificates(fb):
    engine = NPFEngine(fb)
    out = []
    for name in ["s649", "L8n5", "t12048", "t12066", "s874", "t07681"]:
        cert = engine.certify(name)
        if cert is not None:
            out.append(cert)
    return out


@given(st.integers(0, 2 ** 31), st.sampled_from(KINDS))
def test_tampered_certificates_are_rejected(seed, kind):
    fb = facts()
    rng = random.Random(seed)
    cert = rng.choice(_all_certificates(fb))
    try:
        bad = parse_certificate(tamper(cert.to_text(), kind, rng))
    except CertificateSyntaxError:
        return
    assert not verify_certificate(bad, fb)


def test_certificate_for_wrong_manifold_is_rejected():
    fb = facts()
    cert = certify_npf("s649", fb)
    moved = parse_certificate(cert.to_text().replace("npf s649", "npf m149"))
    assert not verify_certificate(moved, fb)


def test_missing_sub_certificate_is_rejected():
    fb = facts()
    text = certify_npf("L8n5", fb).to_text()
    head = text.split("npf m149")[0]
    with pytest.raises(CertificateSyntaxError):
        parse_certificate(head)
    stripped = head.replace("  uses m149\n", "")
    assert not verify_certificate(parse_certificate(stripped), fb)


@given(st.integers(0, 2 ** 31))
def test_more_facts_never_lose_certificates(seed):
    rng = random.Random(seed)
    full = facts()
    pool = list(full.fillings)
    small = rng.sample(pool, rng.randint(0, len(pool)))
    larger = small + rng.sample(pool, rng.randint(0, len(pool)))
    idents = [f for f in full.idents if rng.random() < 0.7]
    fb_small = full.with_facts(fillings=small, idents=idents)
    fb_large = full.with_facts(fillings=larger, idents=list(full.idents))
    e_small, e_large = NPFEngine(fb_small), NPFEngine(fb_large)
    for name in ["s649", "L8n5", "t12048", "s874", "t08875"]:
        cert = e_small.certify(name)
        if cert is not None:
            assert verify_certificate(cert, fb_large)
            assert e_large.certify(name) is not None


def test_cyclic_identifications_are_detected():
    # load-time arity checks make every identification drop a cusp, so a
    # cycle can only come from a fact base assembled without them
    full = facts()
    loop = [IdentificationFact("s778", (None,), "s649"), IdentificationFact("s649", (None,), "s778")]
    with pytest.raises(CyclicIdentification):
        NPFEngine(full.with_facts(idents=loop)).certify("s778")


def test_identifications_must_drop_a_cusp(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("base,partial,result\nt12048,(*;*),L5a1\n")
    with pytest.raises(ParseError):
        load_catalog([default_data_dir(), bad])


def test_m006_verdict():
    v = obstruct_manifold("m006", tri("m006"), facts())
    assert v.status == "no-veering" and v.no_pA_flow_complement
    assert [c.label for c in v.covers] == ["s649"]


def test_m004_stays_unknown():
    v = obstruct_manifold("m004", tri("m004"), facts())
    assert v.status == "unknown" and not v.no_veering


def test_census_no_veering_names_have_verified_certificates():
    fb = facts()
    engine = NPFEngine(fb)
    for name in NO_VEERING_NAMES[:6]:
        v = obstruct_manifold(name, tri(name), fb, engine)
        assert v.no_veering, name
        for cv in v.covers:
            assert verify_certificate(cv.certificate, fb)
