import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from surgery_cert.homology import (LinkingMatrix, SurgerySpec, chain_link, h1_order, hopf_link,
                                   presentation_matrix)
from surgery_cert.lspace import (AdditivityError, CertificateError, MediantSplit, PreconditionError,
                                 audit_tree, certificate_tree, dump_tree, farey_split, load_tree,
                                 split_index, verify_additivity)
from oracles import brute_farey_pairs, continued_fraction, leibniz_det

F = Fraction


@pytest.mark.parametrize("a, left, right", [
    (F(5, 4), F(1), F(4, 3)),
    (F(1, 2), F(0), F(1)),
    (F(7, 5), F(4, 3), F(3, 2)),
])
def test_farey_examples(a, left, right):
    s = farey_split(a)
    assert (s.left, s.right) == (left, right)
    assert brute_farey_pairs(a.numerator, a.denominator) == [(left, right)]


def test_farey_negative():
    s = farey_split(F(-7, 3))
    assert s.left + 0 < F(-7, 3) < s.right
    assert brute_farey_pairs(-7, 3) == [(s.left, s.right)]


def test_farey_rejects_integers_and_unreduced():
    with pytest.raises(ValueError):
        farey_split(F(3))
    with pytest.raises(ValueError):
        farey_split(6, 4)


def test_mediant_split_invariants_enforced():
    with pytest.raises(ValueError):
        MediantSplit(F(5, 4), F(1, 2), F(4, 2))


@given(st.integers(2, 400), st.integers(-2000, 2000))
def test_farey_split_properties(q, p):
    if gcd(p, q) != 1:
        return
    s = farey_split(p, q)
    assert s.left < F(p, q) < s.right
    assert s.left.numerator + s.right.numerator == p


def test_split_index_is_last_nonintegral():
    assert split_index(SurgerySpec.of(F(1, 2), 3, F(5, 3), 7)) == 2
    assert split_index(SurgerySpec.of(1, 2)) is None


# -- additivity -----------------------------------------------------------------

def test_additivity_hopf_example():
    assert verify_additivity(hopf_link(1), SurgerySpec.of(F(5, 4), 3), 0) == (2, 9, 11)


def test_additivity_lens_space():
    assert verify_additivity(LinkingMatrix.zero(1), SurgerySpec.of(F(3, 2)), 0) == (1, 2, 3)


def test_half_integer_splits_into_integers():
    s = farey_split(F(9, 2))
    assert s.left.denominator == s.right.denominator == 1


def test_additivity_rejects_integer_index():
    with pytest.raises(ValueError):
        verify_additivity(hopf_link(1), SurgerySpec.of(F(5, 4), 3), 1)


def test_additivity_reports_infinite_h1():
    # (1/2, 2) on the Hopf link: the left parent (0, 2) has det -1, the right (1, 2) has det 1
    with pytest.raises(AdditivityError):
        verify_additivity(hopf_link(1), SurgerySpec.of(F(1, 2), 2), 0)


# -- trees ------------------------------------------------------------------------

def test_tree_hopf_example():
    cert = certificate_tree(hopf_link(1), SurgerySpec.of(F(5, 4), 3), 1)
    t = cert.tree
    assert (t.h1, t.left.h1, t.right.h1) == (11, 2, 9)
    assert t.left.spec == SurgerySpec.of(1, 3) and t.right.spec == SurgerySpec.of(F(4, 3), 3)
    assert not t.right.is_leaf
    assert cert.internal_nodes == 3 and cert.leaves == 4


def test_tree_integral_spec_is_leaf():
    cert = certificate_tree(hopf_link(1), SurgerySpec.of(5, 6), 2)
    assert cert.tree.is_leaf and cert.internal_nodes == 0


def test_tree_chain_preset():
    M = 49
    L = chain_link(4)
    spec = SurgerySpec(tuple(F(M ** (i + 1), 4) for i in range(4)))
    cert = certificate_tree(L, spec, 12)
    assert cert.leaves == 4 ** 4
    for leaf in cert.tree.leaves():
        assert leaf.spec.is_integral() and min(leaf.spec.slopes) >= 12
    for node in cert.tree.iter_unique():
        assert node.h1 == abs(leibniz_det(presentation_matrix(L, node.spec)))
    assert audit_tree(L, cert.tree, 12) > 0


def test_tree_below_C_rejected():
    with pytest.raises(PreconditionError):
        certificate_tree(hopf_link(1), SurgerySpec.of(F(5, 4), 3), 2)


def test_lemma_route_above_threshold():
    cert = certificate_tree(hopf_link(1), SurgerySpec.of(F(17, 4), F(9, 2)), 4)
    assert cert.positivity == "lemma"


def test_negative_f_fails():
    with pytest.raises(CertificateError):
        certificate_tree(hopf_link(3), SurgerySpec.of(F(5, 2), 2), 1)


@pytest.mark.parametrize("q", range(2, 51))
def test_tree_shape_single_slope(q):
    L = LinkingMatrix.zero(1)
    for p in range(q + 1, 3 * q):
        if gcd(p, q) != 1:
            continue
        cert = certificate_tree(L, SurgerySpec.of(F(p, q)), 1)
        cf = continued_fraction(p, q)
        assert cert.leaves == q
        assert cert.tree.depth() == sum(cf[1:]) - 1


def test_tree_round_trip():
    L = hopf_link(1)
    cert = certificate_tree(L, SurgerySpec.of(F(5, 4), F(7, 3)), 1)
    L2, C, tree = load_tree(dump_tree(cert, L))
    assert (L2, C) == (L, 1)
    assert tree == cert.tree
    assert audit_tree(L2, tree, C) == cert.internal_nodes


def test_audit_catches_tampering():
    import json
    L = hopf_link(1)
    cert = certificate_tree(L, SurgerySpec.of(F(5, 4), 3), 1)
    doc = json.loads(dump_tree(cert, L))
    doc["tree"]["h1"] = "12"
    _, C, tree = load_tree(json.dumps(doc))
    with pytest.raises(CertificateError):
        audit_tree(L, tree, C)


def test_random_trees_additive():
    rng = random.Random(99)
    for _ in range(60):
        n = rng.randint(1, 3)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                rows[i][j] = rows[j][i] = rng.randint(-2, 2)
        L = LinkingMatrix.from_rows(rows)
        slopes = tuple(F(rng.randint(20 * q, 30 * q), q) for q in (rng.randint(1, 9) for _ in range(n)))
        cert = certificate_tree(L, SurgerySpec(slopes), 6)
        for node in cert.tree.iter_unique():
            if not node.is_leaf:
                assert node.left.h1 + node.right.h1 == node.h1 == h1_order(L, node.spec)


def test_fast_farey_oracle_agrees_with_slow_one():
    from oracles import farey_pairs_by_denominator
    for q in range(2, 30):
        for p in range(-40, 90):
            if gcd(p, q) == 1:
                assert farey_pairs_by_denominator(p, q) == brute_farey_pairs(p, q)
