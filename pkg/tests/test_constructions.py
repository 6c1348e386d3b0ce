import random

import pytest

from serrelab.constructions import (
    F2,
    R2,
    FROZEN_RHO,
    c_double,
    cdouble_hom_family,
    centralizer_embedding,
    euler_characteristic,
    fig3_tower,
    is_syllabic,
    magnus_pair_gog,
    mirror_images_conjugate,
    mirror_pair,
    ncl_witnesses,
    random_mirror_pairs,
    verify_magnus_pair,
)
from serrelab.gog import (
    are_conjugate_elements,
    check_strict,
    concat,
    equal,
    format_path,
    from_word,
    inverse,
    loop_of_generator,
    normal_form,
    pi1_presentation,
    validate,
)
from serrelab.words import commutator, power, rename

x, y = F2.gens()
W = commutator(x, y)


@pytest.fixture(scope="module")
def magnus():
    return magnus_pair_gog()


@pytest.fixture(scope="module")
def double():
    return c_double(W)


def test_magnus_graph_shape(magnus):
    g = magnus.graph
    assert validate(g).ok
    assert [v.name for v in g.vertices] == ["Su", "U", "V", "Sv"]
    # each surface is a sphere with four boundary components
    assert euler_characteristic(0, 4) == -2


def test_u_and_v_not_conjugate_up_to_inverse(magnus):
    g = magnus.graph
    for q in (magnus.v, inverse(g, magnus.v)):
        assert not are_conjugate_elements(g, magnus.u, q).conjugate


def test_normal_closure_witnesses(magnus):
    for wit in ncl_witnesses(magnus):
        assert wit.verify(magnus.graph)
        assert len(wit.factors) == 3


def test_frozen_map_is_strict(magnus):
    rep = check_strict(magnus.graph, magnus.rho, magnus.surfaces)
    assert rep.strict and rep.surjective, rep.details
    assert not magnus.rho.failing_relations()
    assert set(FROZEN_RHO) == set(pi1_presentation(magnus.graph).alphabet.generators)


def test_magnus_report(magnus):
    rep = verify_magnus_pair(magnus)
    assert rep.verified, rep.failures
    d = rep.as_dict()
    assert d["u_v_not_conjugate"] and d["rho_images_conjugate"]


def test_c_double_validation():
    assert validate(c_double(W).graph).ok
    with pytest.raises(ValueError):
        c_double(power(x, 2))
    with pytest.raises(ValueError):
        c_double(F2.identity())


def test_standard_retraction_fixes_first_factor(double):
    g = double.graph
    P = pi1_presentation(g).alphabet
    rng = random.Random(0)
    for _ in range(20):
        w = F2.from_letters([rng.randrange(4) for _ in range(6)])
        assert double.standard_retraction(from_word(g, rename(w, P))) == w


def test_mirror_pair_rejects_powers_of_w(double):
    with pytest.raises(ValueError):
        mirror_pair(double, power(W, -2))
    with pytest.raises(ValueError):
        mirror_pair(double, y * x * power(y, -1) * power(x, -1))
    mp = mirror_pair(double, commutator(power(x, 2), y))
    assert mp.right.alphabet == R2


def test_family_mixes_all_kinds(double):
    fam = cdouble_hom_family(double, 30, seed=1)
    assert {m.kind for m in fam} == {"retraction", "conjugation", "abelian"}
    for m in fam:
        assert not m.hom.failing_relations()


def test_case_two_identity_member(double):
    # r -> w x w^-1, s -> w y w^-1 respects the relation because conjugation by w fixes w
    from serrelab.gog import GogHom

    h = GogHom(double.graph, F2, {"x": x, "y": y, "r": W * x * power(W, -1), "s": W * y * power(W, -1)})
    assert not h.failing_relations()


def test_mirror_images_conjugate(double):
    rng = random.Random(3)
    fam = cdouble_hom_family(double, 20, seed=2)
    for mp in random_mirror_pairs(double, 5, rng):
        for m in fam:
            assert mirror_images_conjugate(double, m.hom, mp)


def test_centralizer_embedding(double):
    emb = centralizer_embedding(double)
    h = emb.hnn
    P = pi1_presentation(double.graph).alphabet
    wr = rename(rename(W, R2, {"x": "r", "y": "s"}), P)
    # w(r,s) pinches to w(x,y)
    assert equal(h, emb.embed_word(wr), emb.embed_word(rename(W, P)))
    assert is_syllabic(h, emb.embed_word(rename(W, P) * wr))
    t = loop_of_generator(h, "t")
    for mp in random_mirror_pairs(double, 5, random.Random(5)):
        L, R = mp.loops(double)
        assert equal(h, concat(h, t, emb(R), inverse(h, t)), emb(L))


def test_commutator_product_image_shape(double):
    emb = centralizer_embedding(double)
    P = pi1_presentation(double.graph).alphabet
    rs = rename(commutator(R2.gen("r"), R2.gen("s")), P)
    img = emb.embed_word(rename(W, P) * rs)
    # [x,y] [r,s] collapses to [x,y]^2 because t commutes with w
    assert equal(emb.hnn, img, emb.embed_word(rename(W * W, P)))
    other = rename(x * y * power(x, -1) * power(y, -1), P) * rename(R2.word("r", "r", ("s", -1)), P)
    nf = normal_form(emb.hnn, emb.embed_word(other))
    assert [s for _, s in nf.letters] == [-1, 1]
    assert "t" in format_path(emb.hnn, nf)


def test_fig3_tower(magnus):
    tw = fig3_tower(magnus)
    assert validate(tw.graph).ok
    assert not tw.rho_star.failing_relations()
    u, v = tw.include(magnus.u), tw.include(magnus.v)
    assert tw.rho_star(u) == magnus.rho(magnus.u)
    # in the tower u and v become conjugate through the new stable letter
    res = are_conjugate_elements(tw.graph, u, v)
    assert res.conjugate and res.verify(tw.graph, u, v)
