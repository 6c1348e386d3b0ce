import random
from importlib import resources

import pytest
from hypothesis import given, strategies as st

import oracles
from serrelab import dsl
from serrelab.gog import (
    AbelianVertexGroup,
    ConjugacySolver,
    Edge,
    Elliptic,
    FreeVertexGroup,
    GogError,
    GogHom,
    GraphOfGroups,
    Hyperbolic,
    Vertex,
    are_conjugate_elements,
    concat,
    cyclic_reduce,
    equal,
    from_word,
    inverse,
    is_trivial,
    nf_length,
    normal_form,
    path_key,
    pi1_presentation,
    to_word,
    twist,
    validate,
    vertex_automorphism,
)
from serrelab.words import Alphabet, are_conjugate, power

A = Alphabet("A", ("a", "b"))
C = Alphabet("C", ("c", "d"))
F3 = Alphabet("F3", ("a", "b", "d"))


def load(fname, graph):
    text = (resources.files("serrelab") / "fixtures" / fname).read_text()
    return dsl.parse(text).graph(graph)


AMAL = load("amalgam.gg", "Amal")
HNN = load("hnn.gg", "H")
# F(a,b) *_{a=c} F(c,d) is free on a, b, d
COLLAPSE = GogHom(AMAL, F3, {"a": F3.gen("a"), "b": F3.gen("b"), "c": F3.gen("a"), "d": F3.gen("d")})


def elements(g, max_size=10):
    alph = pi1_presentation(g).alphabet
    return st.lists(st.integers(0, 2 * len(alph) - 1), max_size=max_size).map(
        lambda ls: from_word(g, alph.from_letters(ls))
    )


def test_fixtures_validate():
    assert validate(AMAL).ok and validate(HNN).ok
    assert not COLLAPSE.failing_relations()


@pytest.mark.parametrize("g", [AMAL, HNN], ids=["amalgam", "hnn"])
@given(data=st.data())
def test_group_laws(g, data):
    p, q, r = (data.draw(elements(g)) for _ in range(3))
    assert is_trivial(g, concat(g, p, inverse(g, p)))
    lhs = normal_form(g, concat(g, concat(g, p, q), r))
    assert lhs == normal_form(g, concat(g, p, concat(g, q, r)))
    assert normal_form(g, lhs) == lhs


@given(elements(AMAL), elements(AMAL))
def test_amalgam_equality_matches_free_image(p, q):
    assert equal(AMAL, p, q) == (COLLAPSE(p) == COLLAPSE(q))


@given(elements(AMAL, 8), elements(AMAL, 8))
def test_amalgam_conjugacy_matches_free_image(p, q):
    res = are_conjugate_elements(AMAL, p, q)
    assert res.conjugate == (are_conjugate(COLLAPSE(p), COLLAPSE(q)) is not None)
    assert res.verify(AMAL, p, q)


@pytest.mark.parametrize("g", [AMAL, HNN], ids=["amalgam", "hnn"])
@given(data=st.data())
def test_conjugates_are_found_with_certificates(g, data):
    p = data.draw(elements(g, 8))
    z = data.draw(elements(g, 8))
    q = concat(g, inverse(g, z), p, z)
    res = are_conjugate_elements(g, p, q)
    assert res.conjugate and res.verify(g, p, q)


@pytest.mark.parametrize("g", [AMAL, HNN], ids=["amalgam", "hnn"])
@given(data=st.data())
def test_word_round_trip(g, data):
    p = data.draw(elements(g))
    assert equal(g, from_word(g, to_word(g, p)), p)


@given(elements(HNN))
def test_cyclic_reduction(p):
    c, core = cyclic_reduce(HNN, p)
    assert equal(HNN, concat(HNN, c, core, inverse(HNN, c)), p)


def test_classification():
    s = ConjugacySolver(HNN)
    x = HNN.vertex_loop(0, HNN.vertex_group(0).gen("x"))
    t = from_word(HNN, pi1_presentation(HNN).alphabet.gen("t"))
    assert isinstance(s.classify(x), Elliptic)
    assert isinstance(s.classify(t), Hyperbolic)
    assert isinstance(s.classify(concat(HNN, t, x, inverse(HNN, t))), Elliptic)


def test_stable_letter_centralizes_attachment():
    P = pi1_presentation(HNN).alphabet
    w = from_word(HNN, P.word("x", "y", ("x", -1), ("y", -1)))
    t = from_word(HNN, P.gen("t"))
    assert equal(HNN, concat(HNN, inverse(HNN, t), w, t), w)
    assert not equal(HNN, concat(HNN, inverse(HNN, t), from_word(HNN, P.gen("x")), t), from_word(HNN, P.gen("x")))


def test_short_elements_against_exhaustive_conjugators():
    # nf length <= 3 against conjugators of nf length <= 2 each side
    for g in (AMAL, HNN):
        els = oracles.elements_up_to(g, 3, 3)
        conj = oracles.elements_up_to(g, 2, 2)
        pairs = oracles.gog_conjugacy_pairs(g, els, conj)
        s = ConjugacySolver(g)
        for i in range(len(els)):
            for j in range(i + 1, len(els)):
                res = s.decide(els[i], els[j])
                assert res.conjugate == ((i, j) in pairs), (i, j)
                assert res.verify(g, els[i], els[j])


def test_elements_up_to_are_distinct():
    els = oracles.elements_up_to(AMAL, 3, 3)
    assert len({path_key(AMAL, p) for p in els}) == len(els)
    assert all(nf_length(AMAL, p) <= 3 for p in els)


def test_validation_errors():
    F = FreeVertexGroup(A)
    a = A.gen("a")
    bad_tree = GraphOfGroups("X", (Vertex("P", F),), (Edge("e", 0, a, 0, a, tree=True),))
    assert any("cycle" in e for e in validate(bad_tree).errors)
    half = GraphOfGroups("X", (Vertex("P", F),), (Edge("e", 0, a, 0, None),))
    assert not validate(half).ok
    split = GraphOfGroups("X", (Vertex("P", F), Vertex("Q", FreeVertexGroup(C))), ())
    assert any("disconnected" in e for e in validate(split).errors)
    trivial = GraphOfGroups("X", (Vertex("P", F),), (Edge("e", 0, A.identity(), 0, a),))
    assert not validate(trivial).ok
    clash = GraphOfGroups("X", (Vertex("P", F), Vertex("Q", F)), (Edge("e", 0, a, 1, a, tree=True),))
    assert any("appears in" in e for e in validate(clash).errors)


def test_abelian_vertex_graph():
    # F(a,b) with Z^2 = <u, s> glued along a = u: the centralizer of a grows
    Z = AbelianVertexGroup(2, ("u", "s"))
    g = GraphOfGroups(
        "Z", (Vertex("P", FreeVertexGroup(A)), Vertex("Q", Z)), (Edge("c", 0, A.gen("a"), 1, (1, 0), tree=True),)
    )
    assert validate(g).ok
    P = pi1_presentation(g).alphabet
    a, b, s = (from_word(g, P.gen(n)) for n in ("a", "b", "s"))
    assert equal(g, concat(g, a, s), concat(g, s, a))
    assert not equal(g, concat(g, b, s), concat(g, s, b))
    sol = ConjugacySolver(g)
    p = concat(g, s, b, inverse(g, s))
    res = sol.decide(p, b)
    assert res.conjugate and res.verify(g, p, b)
    assert not sol.decide(s, a).conjugate


def test_twist_preserves_relations():
    P = pi1_presentation(HNN).alphabet
    rng = random.Random(2)
    for _ in range(30):
        w = P.from_letters([rng.randrange(6) for _ in range(8)])
        p = from_word(HNN, w)
        q = twist(HNN, p, {"t": 3})
        back = twist(HNN, q, {"t": -3})
        assert equal(HNN, back, p)


def test_vertex_automorphism_extends():
    F = HNN.vertex_group(0).alphabet
    x, y = F.gens()
    inner = {"x": x, "y": x * y * power(x, -1)}
    # without an edge conjugator the attachment [x,y] is not preserved
    with pytest.raises(GogError):
        vertex_automorphism(HNN, HNN.identity(), "V", inner, {})
    P = pi1_presentation(HNN).alphabet
    xl = from_word(HNN, P.gen("x"))
    rng = random.Random(4)
    for _ in range(20):
        p = from_word(HNN, P.from_letters([rng.randrange(6) for _ in range(7)]))
        out = vertex_automorphism(HNN, p, "V", inner, {"t": x})
        # the inner automorphism by x extends to conjugation by x
        assert equal(HNN, out, concat(HNN, xl, p, inverse(HNN, xl)))
