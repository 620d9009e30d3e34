import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import MAX_ENUMERATION, enumerate_markings, flatten, locally_sound, simple_lines, tree_lines
from normcheck import synth
from normcheck.argumentation import (
    Mark, NotAHypothesis, Relation, Status, UnknownArgument, build_tree, justify, justify_all, mark_tree,
    revalidate,
)
from normcheck.dsl import parse_model
from normcheck.model import Argument, ArgumentKind, IntegrityError
from normcheck.process import compute_solution

BASE = '''
np NP1 { subject "Covered Entity" modality duty }
actor Hospital
argument E evidence { claim "handles PHI" }
binding Hospital is "Covered Entity" justified_by E
goal G1 owner Hospital compliance { refine and [T1] }
task T1
realize G1 -> NP1
'''
H = "H_G1_NP1"


def model(extra=""):
    return parse_model(BASE + extra)


def shape(node):
    return (node.argument, node.relation.value, [shape(c) for c in node.children])


def marks(node):
    return {n.argument: n.mark.value for n, _ in flatten(node)}


def test_unattacked_root_is_single_node():
    t = build_tree(model(), H)
    assert shape(t) == (H, "root", [])


def test_attack_chain():
    m = model('argument A1 rejects H_G1_NP1 { claim "a" }\nargument A2 rejects A1 { claim "b" }')
    t = build_tree(m, H)
    assert shape(t) == (H, "root", [("A1", "attack", [("A2", "attack", [])])])


def test_mutual_attack_is_cut_on_the_path():
    m = model('argument A1 rejects H_G1_NP1, A2 { claim "a" }\nargument A2 rejects A1 { claim "b" }')
    t = build_tree(m, H)
    assert shape(t) == (H, "root", [("A1", "attack", [("A2", "attack", [])])])
    assert tree_lines(t) == simple_lines(m, H)


def test_unknown_root():
    with pytest.raises(UnknownArgument):
        build_tree(model(), "Nope")


def test_leaf_undefeated_and_single_attacker_defeats():
    assert mark_tree(build_tree(model(), H)).mark is Mark.UNDEFEATED
    m = model('argument A1 rejects H_G1_NP1 { claim "a" }')
    assert marks(mark_tree(build_tree(m, H))) == {H: "defeated", "A1": "undefeated"}


def test_reinstatement():
    m = model('argument A1 rejects H_G1_NP1 { claim "a" }\nargument A2 rejects A1 { claim "b" }')
    t = mark_tree(build_tree(m, H))
    assert marks(t) == {H: "undefeated", "A1": "defeated", "A2": "undefeated"}
    [labelling] = enumerate_markings(t)
    assert labelling == [True, False, True]


def test_justify_statuses():
    assert justify(model(), H).status is Status.JUSTIFIED
    assert justify(model('argument R rejects H_G1_NP1 { claim "r" }'), H).status is Status.DEFEATED


def test_support_does_not_rescue_an_attacker():
    m = model('''
    argument A1 rejects H_G1_NP1 { claim "a" }
    argument S1 supports A1 { claim "s" }
    argument A2 rejects A1 { claim "b" }
    ''')
    r = justify(m, H)
    assert r.status is Status.JUSTIFIED
    assert marks(r.tree) == {H: "undefeated", "A1": "defeated", "S1": "undefeated", "A2": "undefeated"}


def test_attacking_a_support_only_defeats_the_support():
    m = model('argument S1 supports H_G1_NP1 { claim "s" }\nargument A1 rejects S1 { claim "a" }')
    r = justify(m, H)
    assert r.status is Status.JUSTIFIED
    assert marks(r.tree)["S1"] == "defeated"


def test_not_a_hypothesis():
    with pytest.raises(NotAHypothesis):
        justify(model(), "E")


def test_attacks_on_chain_elements_reach_the_root():
    m = model('argument RV revises T1 { claim "task is insufficient" }')
    r = justify(m, H)
    assert r.status is Status.DEFEATED and r.outcome == "revision_required"
    assert [(c.argument, c.relation) for c in r.tree.children] == [("RV", Relation.ATTACK)]


def test_attacks_elsewhere_do_not_reach_the_root():
    m = model('actor Other\nargument X rejects Other { claim "irrelevant" }')
    assert justify(m, H).status is Status.JUSTIFIED


def test_outcome_distinguishes_rejection_from_revision():
    m = model('argument R rejects H_G1_NP1 { claim "r" }\nargument V revises H_G1_NP1 { claim "v" }')
    assert justify(m, H).outcome == "solution_rejected"


def test_revalidate_examples():
    m = model()
    ext, delta = revalidate(m, [])
    assert delta == {} and ext == m
    attack = Argument("A1", "a", ArgumentKind.REJECTION_ATTACK, [H])
    m2, delta = revalidate(m, [attack])
    assert delta == {H: (Status.JUSTIFIED, Status.DEFEATED)}
    m3, delta = revalidate(m2, [Argument("A2", "b", ArgumentKind.REJECTION_ATTACK, ["A1"])])
    assert delta == {H: (Status.DEFEATED, Status.JUSTIFIED)}
    assert justify(m3, H).status is Status.JUSTIFIED
    assert [a.id for a in m3.arguments][-2:] == ["A1", "A2"]


def test_revalidate_rejects_bad_arguments():
    with pytest.raises(IntegrityError):
        revalidate(model(), [Argument("A1", "a", ArgumentKind.REJECTION_ATTACK, ["Missing"])])
    with pytest.raises(IntegrityError):
        revalidate(model(), [Argument("E", "dup", ArgumentKind.SUPPORT, [H])])


logs = st.integers(0, 2**32 - 1).map(lambda s: synth.argument_log(random.Random(s)))


@given(logs)
def test_marking_is_total_and_locally_sound(m):
    for h in m.hypotheses:
        t = mark_tree(build_tree(m, h))
        assert locally_sound(t)


@given(logs)
def test_marking_agrees_with_enumeration(m):
    for h in m.hypotheses:
        t = mark_tree(build_tree(m, h))
        if t.size > MAX_ENUMERATION:
            continue
        [labelling] = enumerate_markings(t)
        assert labelling == [n.mark is Mark.UNDEFEATED for n, _ in flatten(t)]


@given(logs)
def test_tree_nodes_are_exactly_the_simple_lines(m):
    for h in m.hypotheses:
        rel = m.realization_of(h)
        lifted = {rel.np} | compute_solution(m, rel.goal).reached
        t = build_tree(m, h)
        assert tree_lines(t) == simple_lines(m, h, lifted)
        assert t.depth <= len(m.arguments)


@given(logs)
def test_children_sorted_and_deterministic(m):
    for h in m.hypotheses:
        t = build_tree(m, h)
        for node, _ in flatten(t):
            ids = [c.argument for c in node.children]
            assert ids == sorted(ids)
        assert build_tree(m, h) == t


@given(logs)
def test_support_transparency(m):
    stripped = m.without([ArgumentKind.SUPPORT, ArgumentKind.EVIDENCE])
    before = {h: r.status for h, r in justify_all(m).items()}
    after = {h: r.status for h, r in justify_all(stripped).items()}
    assert before == after


@given(logs, st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_revalidate_matches_recomputation(m, seed, count):
    new = synth.new_arguments(random.Random(seed), m, count)
    before = {h: r.status for h, r in justify_all(m).items()}
    ext, delta = revalidate(m, new)
    scratch = {h: r.status for h, r in justify_all(ext).items()}
    for h in scratch:
        old, new_status = delta.get(h, (before[h], before[h]))
        assert old is before[h]
        assert new_status is scratch[h]
    assert all(old is not new_status for old, new_status in delta.values())
