import json
import random

import jsonschema
import pydot
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CORPUS, FIXTURES
from normcheck import synth
from normcheck.dsl import parse_model, serialize_model
from normcheck.model import Model
from normcheck.report import Verdict, decide, load_schema, model_digest, report_to_dict, to_dot, to_json

HOSPITAL = (FIXTURES / "corpus" / "01_hospital.nms").read_text("utf-8")
REJECTION = '\nargument A1 rejects H_G1_NP1 { claim "encryption keys are shared" }\n'


def test_hospital_is_compliant():
    r = decide(parse_model(HOSPITAL))
    assert r.overall is Verdict.COMPLIANT
    [v] = r.np_verdicts
    assert (v.np, v.status, v.applicable_to) == ("NP1", Verdict.COMPLIANT, ("Hospital",))
    assert r.specification.per_goal["G1"].tasks == ("T1", "T2")


def test_unattacked_rejection_makes_it_non_compliant():
    r = decide(parse_model(HOSPITAL + REJECTION))
    assert r.overall is Verdict.NON_COMPLIANT
    assert r.np_verdicts[0].causes == ({"defeated_hypothesis": "H_G1_NP1", "outcome": "solution_rejected"},)


def test_zero_nps_is_vacuously_compliant():
    assert decide(Model()).overall is Verdict.COMPLIANT
    assert decide(parse_model("actor A\ngoal G owner A")).overall is Verdict.COMPLIANT


def test_vacuous_report_golden_bytes():
    golden = (FIXTURES / "golden" / "vacuous_report.json").read_bytes()
    assert to_json(decide(Model())).encode("utf-8") == golden


def test_not_applicable_np_with_w1_blocks_overall():
    r = decide(parse_model((FIXTURES / "corpus" / "20_unbound_np.nms").read_text()))
    v = r.verdict_for("NP2")
    assert v.status is Verdict.NOT_APPLICABLE
    assert r.verdict_for("NP1").status is Verdict.COMPLIANT
    assert r.overall is Verdict.NON_COMPLIANT
    assert v.causes == ({"finding": "W1", "subject": "NP2"},)


def test_negative_binding_is_not_applicable_and_harmless():
    r = decide(parse_model((FIXTURES / "corpus" / "07_negative_binding.nms").read_text()))
    assert r.verdict_for("NP9").status is Verdict.NOT_APPLICABLE
    assert r.overall is Verdict.COMPLIANT


def test_one_justified_hypothesis_suffices():
    r = decide(parse_model((FIXTURES / "corpus" / "14_two_realizations.nms").read_text()))
    v = r.verdict_for("NP1")
    assert [h.status.value for h in v.hypotheses] == ["defeated", "justified"]
    assert v.status is Verdict.COMPLIANT


def test_blocking_finding_on_chain_taints_the_np():
    r = decide(parse_model((FIXTURES / "corpus" / "18_unoperationalized.nms").read_text()))
    assert r.verdict_for("NP1").causes == ({"finding": "W5", "subject": "G2"},)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_reports_validate_against_schema(path):
    doc = json.loads(to_json(decide(parse_model(path.read_text("utf-8")))))
    jsonschema.validate(doc, load_schema())


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_every_negative_verdict_has_a_cause(path):
    r = decide(parse_model(path.read_text("utf-8")))
    for v in r.np_verdicts:
        if v.status is Verdict.NON_COMPLIANT:
            assert v.causes
    if r.overall is Verdict.NON_COMPLIANT:
        assert any(f.blocking for f in r.findings) or any(v.causes for v in r.np_verdicts)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_removing_all_nps_gives_compliance(path):
    m = parse_model(path.read_text("utf-8"))
    stripped = Model(actors=m.actors, goals=m.goals, tasks=m.tasks,
                     arguments=[a for a in m.arguments if a.kind.value != "hypothesis"])
    assert decide(stripped).overall is Verdict.COMPLIANT


def test_equal_reports_give_identical_bytes():
    a = to_json(decide(parse_model(HOSPITAL + REJECTION)))
    b = to_json(decide(parse_model(REJECTION + HOSPITAL)))
    assert a == b


def test_digest_tracks_canonical_text():
    m1 = parse_model(HOSPITAL)
    m2 = parse_model(serialize_model(m1))
    assert model_digest(m1) == model_digest(m2)
    assert model_digest(parse_model(HOSPITAL + REJECTION)) != model_digest(m1)


@given(st.integers(0, 2**32 - 1))
def test_random_reports_validate(seed):
    m = synth.argument_log(random.Random(seed))
    jsonschema.validate(report_to_dict(decide(m)), load_schema())


def dot_graphs(text):
    graphs = pydot.graph_from_dot_data(text)
    assert graphs is not None
    return graphs


def test_dot_single_node():
    [g] = dot_graphs(to_dot(decide(parse_model(HOSPITAL))))
    assert len(g.get_nodes()) == 2  # the root plus the default-attribute pseudo node
    assert g.get_edges() == []


def test_dot_chain_has_two_attack_edges():
    m = parse_model(HOSPITAL + REJECTION + 'argument A2 rejects A1 { claim "keys are rotated" }')
    [g] = dot_graphs(to_dot(decide(m)))
    edges = g.get_edges()
    assert len(edges) == 2
    assert {e.get("label") for e in edges} == {'"attack"'}
    assert {n.get_name() for n in g.get_nodes()} >= {'"H_G1_NP1"', '"H_G1_NP1/A1"', '"H_G1_NP1/A1/A2"'}


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_dot_parses_for_every_corpus_file(path):
    r = decide(parse_model(path.read_text("utf-8")))
    text = to_dot(r)
    n_trees = sum(len(v.hypotheses) for v in r.np_verdicts)
    if n_trees:
        assert len(dot_graphs(text)) == n_trees
    else:
        assert text == ""
