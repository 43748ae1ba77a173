import random

import pytest

from amalgam.stallings import (
    NotAMemberError,
    build,
    coset_intersection,
    pullback,
)
from amalgam.words import Alphabet, Word, identity, parse_word, substitute

from bruteforce import generated_elements, reduced_words, subgroup_elements
from conftest import random_member, random_reduced

F = Alphabet(("a", "b", "d"))


def w(text):
    return parse_word(text, F)


def C():
    return build([w("a^2"), w("b")])


def test_build_examples():
    g = C()
    assert g.graph.nstates == 2
    assert g.graph.nedges == 3
    assert build([w("a")]).graph.nstates == 1
    assert build([w("a"), w("a^-1")]).graph.nstates == 1
    assert build([w("a"), w("a^-1")]).graph.nedges == 1


def test_build_drops_trivial_generators():
    g = build([w(""), w("a")])
    assert g.generators == (w("a"),)
    trivial = build([], F)
    assert trivial.graph.nstates == 1 and trivial.graph.nedges == 0


def test_graphs_are_folded_cores():
    for gens in ([w("a^2"), w("b")], [w("a b a^-1")], [w("a b"), w("b d")],
                 [w("a b a b^-1"), w("d^2"), w("a^3")]):
        build(gens).graph.check_folded()


def test_contains_examples():
    g = C()
    assert g.contains(w("a^2 b"))
    assert not g.contains(w("a"))
    assert g.contains(w(""))


def test_contains_matches_generated_products():
    rng = random.Random(5)
    for gens in ([w("a^2"), w("b")], [w("a b"), w("d")]):
        g = build(gens)
        elems = generated_elements(gens, 3)
        for e in elems:
            assert g.contains(e)
        for cand in reduced_words(F, 3):
            if cand in elems:
                assert g.contains(cand)


def test_coset_rep_examples():
    g = C()
    assert g.coset_rep(w("b^3")) == (w(""), w("b^3"))
    assert g.coset_rep(w("d a^4")) == (w("d a^4"), w(""))
    assert g.coset_rep(w("b^2 d")) == (w("d"), w("b^2"))


def test_coset_rep_contract():
    rng = random.Random(11)
    g = C()
    for _ in range(300):
        word = random_reduced(rng, F, rng.randint(0, 9))
        rep, head = g.coset_rep(word)
        assert head * rep == word
        assert g.contains(head)
        assert len(rep) <= len(word)
        assert len(head) <= len(word) + 2 * g.graph.diameter()
        c = random_member(rng, list(g.generators), rng.randint(0, 3))
        rep2, _ = g.coset_rep(c * word)
        assert rep2 == rep


def test_coset_rep_minimality():
    g = C()
    members = subgroup_elements(g, 6)
    for text in ("d a", "b a", "a b d", "a^3"):
        word = w(text)
        rep, _ = g.coset_rep(word)
        shortest = min(len(h * word) for h in members)
        assert len(rep) == shortest


def test_basis_examples():
    g = C()
    assert set(g.basis()) == {w("a^2"), w("b")}
    assert build([w("a")]).basis() == (w("a"),)
    assert build([w("a"), w("a^-1")]).basis() == (w("a"),)
    sub = build([w("a b a b^-1"), w("d^2")])
    assert len(sub.basis()) == sub.graph.rank


def test_express_roundtrips():
    rng = random.Random(23)
    for gens in ([w("a^2"), w("b")], [w("a b"), w("b")], [w("a b a^-1"), w("d")]):
        g = build(gens)
        glist = list(g.generators)
        for _ in range(170):
            member = random_member(rng, glist, rng.randint(0, 5))
            expr_t = g.express_in_generators(member)
            assert substitute(expr_t, glist, F) == member
            expr_b = g.express_in_basis(member)
            assert substitute(expr_b, list(g.basis()), F) == member


def test_express_roundtrip_stress():
    # random generating tuples exercise deep folding histories
    rng = random.Random(99)
    for trial in range(40):
        gens = []
        for _ in range(rng.randint(1, 4)):
            gens.append(random_reduced(rng, F, rng.randint(1, 6)))
        g = build(gens)
        g.graph.check_folded()
        glist = list(g.generators)
        for _ in range(25):
            member = random_member(rng, glist, rng.randint(0, 6))
            assert substitute(g.express_in_generators(member), glist, F) == member
            assert substitute(g.express_in_basis(member), list(g.basis()), F) == member


def test_express_requires_membership():
    g = C()
    with pytest.raises(NotAMemberError):
        g.express_in_generators(w("a"))
    with pytest.raises(NotAMemberError):
        g.express_in_basis(w("d"))


def test_express_in_generators_spec_values():
    g = C()
    assert g.express_in_generators(w("")) == Word(g.t_alphabet, ())
    expr = g.express_in_generators(w("a^2 b a^2"))
    assert substitute(expr, list(g.generators), F) == w("a^2 b a^2")
    g2 = build([w("a b"), w("b")])
    expr2 = g2.express_in_generators(w("a"))
    assert substitute(expr2, list(g2.generators), F) == w("a")


def test_pullback_examples():
    p = pullback(C(), build([w("a^3")]))
    assert p.contains(w("a^6"))
    assert not p.contains(w("a^2"))
    assert not p.contains(w("a^3"))
    g = C()
    same = pullback(g, g)
    for cand in reduced_words(F, 5):
        assert same.contains(cand) == g.contains(cand)
    assert pullback(build([w("a")]), build([w("b")])).graph.is_trivial()


def test_pullback_random_agreement():
    rng = random.Random(2)
    g1 = build([w("a^2"), w("b d")])
    g2 = build([w("a^2"), w("d")])
    p = pullback(g1, g2)
    for word in reduced_words(F, 6):
        assert p.contains(word) == (g1.contains(word) and g2.contains(word))
    for _ in range(400):
        word = random_reduced(rng, F, rng.randint(7, 8))
        assert p.contains(word) == (g1.contains(word) and g2.contains(word))


def test_conjugate_graph_examples():
    g = build([w("b")])
    conj = g.conjugate(w("a"))
    assert conj.contains(w("a^-1 b a"))
    assert not conj.contains(w("b"))
    g2 = C()
    conj2 = g2.conjugate(w("a^2 b"))  # z inside the subgroup
    for word in reduced_words(F, 5):
        assert conj2.contains(word) == g2.contains(word)
    meet = pullback(g2.conjugate(w("a")), g2)
    assert meet.contains(w("a^2"))
    assert not meet.contains(w("a^-1 b a"))


def test_coset_intersection_examples():
    K, L = C(), build([w("a^2")])
    hit = coset_intersection(K, w("d"), L, w("d"))
    assert hit is not None
    M, h = hit
    assert K.contains(h * ~w("d")) and L.contains(h * ~w("d"))
    assert M.contains(w("a^2")) and not M.contains(w("b"))
    same = coset_intersection(K, w("d a"), K, w("d a"))
    assert same is not None
    only_a = build([w("a")])
    assert coset_intersection(only_a, w("b"), only_a, w("d")) is None


def test_coset_intersection_against_enumeration():
    K, L = C(), build([w("a^2"), w("d b")])
    elems_k = subgroup_elements(K, 6)
    elems_l = subgroup_elements(L, 6)
    for a_txt, b_txt in (("d", "d"), ("a", "a b"), ("b d", "d"), ("a", "d")):
        a, b = w(a_txt), w(b_txt)
        hit = coset_intersection(K, a, L, b)
        brute = {h * a for h in elems_k} & {h * b for h in elems_l}
        if hit is None:
            assert not brute
        else:
            M, h = hit
            assert K.contains(h * ~a) and L.contains(h * ~b)
            for cand in brute:
                assert M.contains(cand * ~h)


def test_conjugacy_into_examples():
    g = C()
    hit = g.conjugacy_into(w("a^-1 b a"))
    assert hit is not None
    h, z = hit
    assert g.contains(h) and ~z * h * z == w("a^-1 b a")
    assert g.conjugacy_into(w("d")) is None
    Y = Alphabet(("x", "y", "z"))
    cb = build([parse_word("x", Y), parse_word("y^2", Y)])
    hit2 = cb.conjugacy_into(parse_word("y^2", Y))
    assert hit2 == (parse_word("y^2", Y), identity(Y))


def test_conjugacy_into_completeness_small():
    g = C()
    conjugates = {
        ~z * h * z
        for z in reduced_words(F, 3)
        for h in subgroup_elements(g, 4)
    }
    for word in reduced_words(F, 4):
        hit = g.conjugacy_into(word)
        if hit is not None:
            h, z = hit
            assert g.contains(h) and ~z * h * z == word
        if word in conjugates:
            assert hit is not None


def test_double_transversal_examples():
    g = C()
    ts = g.double_transversal()
    assert ts[0] == w("")
    assert len(ts) == 2
    # soundness: H meets H^t for the nontrivial representative
    t = ts[1]
    assert not pullback(g.conjugate(t), g).graph.is_trivial()
    assert build([w("b")]).double_transversal() == (w(""),)
    whole = build([w("a"), w("b"), w("d")])
    assert whole.double_transversal() == (w(""),)


def test_double_transversal_completeness_small():
    g = C()
    ts = g.double_transversal()
    for word in reduced_words(F, 5):
        meets = not pullback(g.conjugate(word), g).graph.is_trivial()
        if not meets:
            continue
        in_some = any(
            coset_intersection(g, word, g.conjugate(~t), t) is not None
            for t in ts
        )
        assert in_some, f"{word!r} in N* but outside every double coset"


def test_malnormality_flags():
    assert build([w("b")]).is_malnormal()
    assert not C().is_malnormal()
    assert build([w("a"), w("b"), w("d")]).is_malnormal()
    two = Alphabet(("a", "b"))
    assert build([parse_word("b", two)]).is_malnormal()
    assert not build([parse_word("a^2", two), parse_word("b", two)]).is_malnormal()


def test_z_subgroup_examples():
    g = C()
    z = g.z_subgroup(w("a"))
    assert z.contains(w("a^2"))
    assert not z.contains(w("b"))
    z_id = g.z_subgroup(w(""))
    for word in reduced_words(F, 4):
        assert z_id.contains(word) == g.contains(word)
    assert build([w("b")]).z_subgroup(w("a")).graph.is_trivial()


def test_z_subgroup_matches_definition():
    g = C()
    t = w("a")
    z = g.z_subgroup(t)
    for word in reduced_words(F, 4):
        expected = g.contains(word) and g.contains(~t * word * t)
        assert z.contains(word) == expected


def test_generalized_normalizer_membership():
    g = C()
    assert g.in_generalized_normalizer(w("a"))
    assert not g.in_generalized_normalizer(w("d"))
    assert g.in_generalized_normalizer(w("a^2 b"))


def test_z_set_examples():
    g = C()
    assert g.in_z_set(w("a^2"))
    assert not g.in_z_set(w("b"))
    with pytest.raises(NotAMemberError):
        g.in_z_set(w("d"))
    assert not build([w("b")]).in_z_set(w("b"))
    hit = g.z_set_witness(w("a^2"))
    t, target, conj = hit
    assert g.contains(target) and g.contains(conj)
    assert g.contains(~t * target * t)  # target really lies in Z_t
    assert ~conj * target * conj == w("a^2")
