"""Named groups as executable fixtures: the Magnus-pair group, C-doubles,
the centralizer embedding, and the tower over the Magnus pair."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .gog import (
    AbelianVertexGroup,
    Edge,
    FreeVertexGroup,
    GogError,
    GogHom,
    GraphOfGroups,
    PathWord,
    Vertex,
    are_conjugate_elements,
    check_strict,
    concat,
    equal,
    format_path,
    from_word,
    inverse,
    loop_of_generator,
    normal_form,
    path_power,
    pi1_presentation,
    require_valid,
    to_word,
)
from .gog.conjugacy import ConjugacySolver
from .gog.presentation import StrictnessReport
from .homs import random_endomorphism
from .words import (
    Alphabet,
    Word,
    are_conjugate,
    exponent_vector,
    invert,
    primitive_root,
    product,
    random_word,
    reduced_words,
    rename,
)

SU = Alphabet("Su", ("a", "b", "c"))
SV = Alphabet("Sv", ("p", "q", "r"))
F3 = Alphabet("F3", ("x", "y", "z"))
F2 = Alphabet("F", ("x", "y"))
R2 = Alphabet("R", ("r", "s"))

# Found by ``find_strict_map(magnus_pair_gog(), 3, seed=0)``; see scripts/find_rho.py.
FROZEN_RHO: dict[str, str] = {
    "a": "x y x^-1",
    "b": "z y^-1 z^-1",
    "c": "z y z^-1",
    "p": "x y x^-1",
    "q": "y^-1",
    "r": "y",
    "u": "x y x^-1",
    "v": "x y x^-1",
    "e_b": "z y^-1 x^-1",
    "e_c": "z y^-1 x^-1",
    "f_q": "y^-2 x^-1",
    "f_r": "y^-2 x^-1",
    "f_d": "1",
}


def parse_simple_word(alphabet: Alphabet, text: str) -> Word:
    """Space-separated ``g`` / ``g^k`` tokens (``1`` is the identity)."""
    syl = []
    for tok in text.split():
        if tok == "1":
            continue
        name, _, exp = tok.partition("^")
        syl.append((alphabet.index(name), int(exp) if exp else 1))
    return Word(alphabet, syl)


# -- the Magnus pair group ---------------------------------------------------


@dataclass
class MagnusPairFixture:
    graph: GraphOfGroups
    u: PathWord
    v: PathWord
    rho: Optional[GogHom]
    surfaces: tuple[str, str] = ("Su", "Sv")


def magnus_pair_graph() -> GraphOfGroups:
    """Two four-boundary spheres glued to two cyclic vertex groups.

    The boundaries ``a, b, c`` of ``Su`` are glued to ``<v>`` and ``abc`` to
    ``<u>``; the boundaries ``p, q, r`` of ``Sv`` go to ``<u>`` and ``pqr`` to
    ``<v>``.  Orientations are chosen so that ``b`` and ``q`` are glued to
    the inverse generator.
    """
    a, b, c = SU.gens()
    p, q, r = SV.gens()
    one = (1,)
    vertices = (
        Vertex("Su", FreeVertexGroup(SU)),
        Vertex("U", AbelianVertexGroup(1, ("u",))),
        Vertex("V", AbelianVertexGroup(1, ("v",))),
        Vertex("Sv", FreeVertexGroup(SV)),
    )
    su, uu, vv, sv = range(4)
    edges = (
        Edge("e_a", su, a, vv, one, tree=True),
        Edge("e_b", su, invert(b), vv, one),
        Edge("e_c", su, c, vv, one),
        Edge("e_d", su, a * b * c, uu, one, tree=True),
        Edge("f_p", sv, p, uu, one, tree=True),
        Edge("f_q", sv, invert(q), uu, one),
        Edge("f_r", sv, r, uu, one),
        Edge("f_d", sv, p * q * r, vv, one),
    )
    return require_valid(GraphOfGroups("U", vertices, edges, base=su))


def frozen_rho(g: GraphOfGroups) -> GogHom:
    return GogHom(g, F3, {k: parse_simple_word(F3, v) for k, v in FROZEN_RHO.items()})


def magnus_pair_gog(rho: Optional[GogHom] = None, with_rho: bool = True) -> MagnusPairFixture:
    g = magnus_pair_graph()
    if rho is None and with_rho:
        rho = frozen_rho(g)
    return MagnusPairFixture(g, loop_of_generator(g, "u"), loop_of_generator(g, "v"), rho)


def euler_characteristic(genus: int, boundaries: int) -> int:
    return 2 - 2 * genus - boundaries


def boundary_words(g: GraphOfGroups, vertex: str) -> list[Word]:
    v = g.vertex_index(vertex)
    out = []
    for e in g.edges:
        if e.src == v and e.src_attach is not None:
            out.append(e.src_attach)
        if e.dst == v and e.dst_attach is not None:
            out.append(e.dst_attach)
    return out


def find_strict_map(
    f: MagnusPairFixture, max_image_length: int, seed: int = 0
) -> Optional[GogHom]:
    """Search for a strict surjection onto ``F3`` with short generator images.

    The relations are solved rather than guessed: once ``rho(v)`` and the
    stable letters of ``e_b``, ``e_c`` are chosen, the images of ``a, b, c``
    and ``u`` follow, and likewise on the ``Sv`` side, where the image of
    ``f_d`` is read off a free-group conjugacy certificate.
    """
    L = max_image_length
    if L <= 0:
        return None
    g = f.graph
    rng = random.Random(seed)
    words = [w for w in reduced_words(F3, L)]
    nontrivial = [w for w in words if not w.is_identity()]
    rng.shuffle(words)
    rng.shuffle(nontrivial)

    def conj_short(x: Word, base: Word) -> Optional[Word]:
        w = product([x, base, invert(x)])
        return w if len(w) <= L else None

    for V in nontrivial:
        side_u = []
        for X in words:
            b = conj_short(X, invert(V))
            if b is None:
                continue
            for Y in words:
                c = conj_short(Y, V)
                if c is None:
                    continue
                U = product([V, b, c])
                if U.is_identity() or len(U) > L:
                    continue
                side_u.append((X, Y, b, c, U))
        for X, Y, b, c, U in side_u:
            for Q in words:
                q = conj_short(Q, invert(U))
                if q is None:
                    continue
                for R in words:
                    r = conj_short(R, U)
                    if r is None:
                        continue
                    cert = are_conjugate(product([U, q, r]), V)
                    if cert is None or len(cert.conjugator) > L:
                        continue
                    images = {
                        "a": V, "b": b, "c": c, "u": U, "v": V,
                        "p": U, "q": q, "r": r,
                        "e_b": X, "e_c": Y, "f_q": Q, "f_r": R,
                        "f_d": cert.conjugator,
                    }
                    hom = GogHom(g, F3, images)
                    if hom.failing_relations():
                        continue
                    rep = check_strict(g, hom, f.surfaces)
                    if rep.strict and rep.surjective:
                        return hom
    return None


@dataclass
class NclWitness:
    """``target == prod conj_i source^sign_i conj_i^-1``."""

    target: PathWord
    source: PathWord
    factors: list[tuple[PathWord, int]]

    def product(self, g: GraphOfGroups) -> PathWord:
        parts = [
            concat(g, c, path_power(g, self.source, s), inverse(g, c)) for c, s in self.factors
        ]
        return normal_form(g, concat(g, *parts))

    def verify(self, g: GraphOfGroups) -> bool:
        return equal(g, self.product(g), self.target)


def _boundary_witness(
    g: GraphOfGroups, surface: str, boundary_edges: Sequence[str], d_edge: str, source: str, target: str
) -> NclWitness:
    """Express the generator of ``target`` through conjugates of ``source``.

    The surface relation ``g_1 g_2 g_3 = d`` holds with each ``g_i`` glued to
    the ``source`` vertex and ``d`` glued to the ``target`` vertex.
    """
    S = g.vertex_index(surface)
    src_v = g.vertex_index(source)
    tgt_v = g.vertex_index(target)
    TS, Tsrc, Ttgt = g.tree_path(S), g.tree_path(src_v), g.tree_path(tgt_v)
    de = g.edge_index(d_edge)
    # d e_d = e_d t, so t = e_d^-1 d e_d and T_t t T_t^-1 = W (T_S d T_S^-1) W^-1
    W = concat(g, Ttgt, inverse(g, g.path_from_letters(S, [(de, 1)])), inverse(g, TS))
    factors = []
    grp = g.vertex_group(S)
    gens = []
    for name in boundary_edges:
        i = g.edge_index(name)
        e = g.edges[i]
        att = e.src_attach
        root, k = primitive_root(att)
        if k != 1 or len(att) != 1:
            raise GogError(f"edge {name}: boundary attachment is not a generator or its inverse")
        sign = att.syllables[0][1]
        gens.append(grp.alphabet.generators[att.syllables[0][0]])
        conj = concat(g, W, TS, g.path_from_letters(S, [(i, 1)]), inverse(g, Tsrc))
        factors.append((normal_form(g, conj), sign))
    d = g.edges[de].src_attach
    if d != product([grp.gen(n) for n in gens]):
        raise GogError(f"{d_edge} is not attached along the product of the listed boundaries")
    return NclWitness(loop_of_generator(g, g.vertex_group(tgt_v).generators()[0]),
                      loop_of_generator(g, g.vertex_group(src_v).generators()[0]),
                      factors)


def ncl_witnesses(f: MagnusPairFixture) -> tuple[NclWitness, NclWitness]:
    g = f.graph
    u_from_v = _boundary_witness(g, "Su", ("e_a", "e_b", "e_c"), "e_d", "V", "U")
    v_from_u = _boundary_witness(g, "Sv", ("f_p", "f_q", "f_r"), "f_d", "U", "V")
    return u_from_v, v_from_u


@dataclass
class MagnusReport:
    not_conjugate: bool
    witnesses_verify: bool
    strict: bool
    images_conjugate: bool
    strictness: Optional[StrictnessReport] = None
    image_certificate: Optional[str] = None
    witness_sizes: tuple[int, int] = (0, 0)
    failures: list[str] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.not_conjugate and self.witnesses_verify and self.strict and self.images_conjugate

    def as_dict(self) -> dict:
        return {
            "u_v_not_conjugate": self.not_conjugate,
            "ncl_witnesses_verify": self.witnesses_verify,
            "witness_factor_counts": list(self.witness_sizes),
            "rho_strict": self.strictness.as_dict() if self.strictness else None,
            "rho_images_conjugate": self.images_conjugate,
            "rho_image_conjugator": self.image_certificate,
            "failures": list(self.failures),
        }


def verify_magnus_pair(f: MagnusPairFixture, solver: Optional[ConjugacySolver] = None) -> MagnusReport:
    g = f.graph
    s = solver or ConjugacySolver(g)
    failures = []
    vinv = normal_form(g, inverse(g, f.v))
    nc = True
    for p, q in ((f.u, f.v), (f.v, f.u), (f.u, vinv), (vinv, f.u)):
        if are_conjugate_elements(g, p, q, s).conjugate:
            nc = False
            failures.append(f"{format_path(g, p)} ~ {format_path(g, q)}")
    w1, w2 = ncl_witnesses(f)
    wit = w1.verify(g) and w2.verify(g)
    if not wit:
        failures.append("normal-closure witness failed")
    strict = False
    img = False
    rep = None
    cert_text = None
    if f.rho is None:
        failures.append("no strict map")
    else:
        rep = check_strict(g, f.rho, f.surfaces)
        strict = rep.strict and rep.surjective
        if not strict:
            failures.append("rho is not a strict surjection: " + "; ".join(rep.details))
        cert = are_conjugate(f.rho(f.u), f.rho(f.v), allow_inverse=True)
        img = cert is not None
        if cert is not None:
            cert_text = f"{cert.conjugator} (sign {cert.sign})"
        else:
            failures.append("rho(u), rho(v) not conjugate")
    return MagnusReport(nc, wit, strict, img, rep, cert_text, (len(w1.factors), len(w2.factors)), failures)


# -- C-doubles ---------------------------------------------------------------


@dataclass
class CDoubleFixture:
    w: Word
    graph: GraphOfGroups
    standard_retraction: GogHom
    c_test_assumed: bool = False
    primitive_assumed_false: bool = True


def c_double(w: Word, c_test_assumed: bool = False) -> CDoubleFixture:
    """The double of ``F(x,y)`` along ``w``: ``<F(x,y), F(r,s) | w(x,y) = w(r,s)>``."""
    if w.alphabet != F2:
        w = rename(w, F2)
    if w.is_identity():
        raise ValueError("C-double needs a nontrivial word")
    if primitive_root(w)[1] != 1:
        raise ValueError(f"C-double needs an indivisible word; {w} is a proper power")
    wr = rename(w, R2, {"x": "r", "y": "s"})
    g = require_valid(
        GraphOfGroups(
            "D",
            (Vertex("X", FreeVertexGroup(F2)), Vertex("R", FreeVertexGroup(R2))),
            (Edge("w", 0, w, 1, wr, tree=True),),
        )
    )
    x, y = F2.gens()
    std = GogHom(g, F2, {"x": x, "y": y, "r": x, "s": y})
    return CDoubleFixture(w, g, std, c_test_assumed)


@dataclass
class MirrorPair:
    left: Word
    right: Word

    def loops(self, f: CDoubleFixture) -> tuple[PathWord, PathWord]:
        g = f.graph
        return g.vertex_loop(0, self.left), g.vertex_loop(1, self.right)


def mirror_pair(f: CDoubleFixture, left: Word, power_bound: int = 4) -> MirrorPair:
    if left.alphabet != F2:
        left = rename(left, F2)
    for n in range(-power_bound, power_bound + 1):
        if are_conjugate(left, f.w ** n, allow_inverse=True) is not None:
            raise ValueError(f"{left} is ~± w^{n}")
    return MirrorPair(left, rename(left, R2, {"x": "r", "y": "s"}))


def random_mirror_pairs(
    f: CDoubleFixture, count: int, rng: random.Random, max_length: int = 8, commutator_subgroup: bool = True
) -> list[MirrorPair]:
    out: list[MirrorPair] = []
    while len(out) < count:
        L = rng.randint(2, max_length)
        left = random_word(F2, L, rng)
        if commutator_subgroup and any(exponent_vector(left)):
            continue
        try:
            out.append(mirror_pair(f, left))
        except ValueError:
            continue
    return out


def _double_hom(f: CDoubleFixture, x_img: Word, y_img: Word, r_img: Word, s_img: Word) -> GogHom:
    return GogHom(f.graph, F2, {"x": x_img, "y": y_img, "r": r_img, "s": s_img})


@dataclass
class FamilyMember:
    kind: str
    hom: GogHom
    note: str = ""


def cdouble_hom_family(f: CDoubleFixture, count: int, seed: int = 0) -> list[FamilyMember]:
    """Maps ``D -> F(x,y)`` of three kinds, each checked against the relation.

    ``retraction``: a random endomorphism after the standard retraction.
    ``conjugation``: ``r, s`` go to ``w^n x w^-n, w^n y w^-n`` before the
    endomorphism.  ``abelian``: each factor lands in a cyclic subgroup; only
    offered when ``w`` lies in the commutator subgroup.
    """
    rng = random.Random(seed)
    kinds = ["retraction", "conjugation"]
    if not any(exponent_vector(f.w)):
        kinds.append("abelian")
    x, y = F2.gens()
    out: list[FamilyMember] = []
    i = 0
    while len(out) < count:
        kind = kinds[i % len(kinds)]
        i += 1
        if kind == "retraction":
            E = random_endomorphism(F2, rng, max_length=3)
            hom = _double_hom(f, E(x), E(y), E(x), E(y))
            note = f"E = ({E(x)}, {E(y)})"
        elif kind == "conjugation":
            E = random_endomorphism(F2, rng, max_length=3)
            n = rng.choice([k for k in range(-3, 4) if k])
            wn = f.w ** n
            hom = _double_hom(f, E(x), E(y), E(wn * x * invert(wn)), E(wn * y * invert(wn)))
            note = f"n = {n}, E = ({E(x)}, {E(y)})"
        else:
            g1 = random_word(F2, rng.randint(1, 3), rng)
            g2 = random_word(F2, rng.randint(1, 3), rng)
            ex = [rng.randint(-2, 2) for _ in range(4)]
            hom = _double_hom(f, g1 ** ex[0], g1 ** ex[1], g2 ** ex[2], g2 ** ex[3])
            note = f"cyclic images in <{g1}>, <{g2}>"
        if hom.failing_relations():
            raise GogError(f"family member of kind {kind} breaks the double relation")
        out.append(FamilyMember(kind, hom, note))
    return out


def mirror_images_conjugate(f: CDoubleFixture, hom: GogHom, pair: MirrorPair) -> bool:
    L, R = pair.loops(f)
    return are_conjugate(hom(L), hom(R)) is not None


# -- the centralizer embedding ----------------------------------------------


@dataclass
class CentralizerEmbedding:
    double: CDoubleFixture
    hnn: GraphOfGroups
    images: dict[str, PathWord]

    def __call__(self, p: PathWord) -> PathWord:
        """Image of a loop of the double."""
        w = to_word(self.double.graph, p)
        return self.embed_word(w)

    def embed_word(self, w: Word) -> PathWord:
        g = self.hnn
        gens = w.alphabet.generators
        parts = [path_power(g, self.images[gens[i]], e) for i, e in w.syllables]
        if not parts:
            return g.identity()
        return normal_form(g, concat(g, *parts))

    def relation_holds(self) -> bool:
        f = self.double
        wr = rename(f.w, R2, {"x": "r", "y": "s"})
        pres = pi1_presentation(f.graph).alphabet
        lhs = self.embed_word(rename(f.w, pres))
        rhs = self.embed_word(rename(wr, pres))
        return equal(self.hnn, lhs, rhs)


def hnn_over(w: Word, name: str = "C") -> GraphOfGroups:
    """``<F(x,y), t | t^-1 w t = w>`` as a one-vertex graph of groups."""
    return require_valid(
        GraphOfGroups(name, (Vertex("F", FreeVertexGroup(F2)),), (Edge("t", 0, w, 0, w),))
    )


def centralizer_embedding(f: CDoubleFixture) -> CentralizerEmbedding:
    g = hnn_over(f.w)
    t = loop_of_generator(g, "t")
    tinv = inverse(g, t)
    x = loop_of_generator(g, "x")
    y = loop_of_generator(g, "y")
    images = {
        "x": x,
        "y": y,
        "r": normal_form(g, concat(g, tinv, x, t)),
        "s": normal_form(g, concat(g, tinv, y, t)),
    }
    emb = CentralizerEmbedding(f, g, images)
    if not emb.relation_holds():
        raise GogError("centralizer embedding breaks the double relation")
    return emb


def is_syllabic(g: GraphOfGroups, p: PathWord) -> bool:
    """Stable letters of the normal form alternate ``t^-1, t, t^-1, t, ...``."""
    nf = normal_form(g, p)
    signs = [s for _, s in nf.letters]
    return len(signs) % 2 == 0 and all(s == (-1 if i % 2 == 0 else 1) for i, s in enumerate(signs))


@dataclass
class CDoubleReport:
    members: dict[str, int]
    pairs: int
    failures: list[str]
    syllabic_checked: int
    syllabic_ok: bool
    t_conjugate_ok: bool

    @property
    def verified(self) -> bool:
        return not self.failures and self.syllabic_ok and self.t_conjugate_ok

    def as_dict(self) -> dict:
        return {
            "family_members": self.members,
            "mirror_pairs": self.pairs,
            "image_pairs_checked": sum(self.members.values()) * self.pairs,
            "non_conjugate_images": self.failures,
            "syllabic_checked": self.syllabic_checked,
            "syllabic_ok": self.syllabic_ok,
            "mirror_pairs_conjugate_by_t": self.t_conjugate_ok,
        }


def verify_c_double(f: CDoubleFixture, count: int = 100, pairs: int = 20, seed: int = 0) -> CDoubleReport:
    """Mirror images under a family of maps, plus the centralizer embedding checks."""
    rng = random.Random(seed)
    family = cdouble_hom_family(f, count, seed=rng.randrange(2**32))
    mps = random_mirror_pairs(f, pairs, rng)
    members: dict[str, int] = {}
    failures = []
    for m in family:
        members[m.kind] = members.get(m.kind, 0) + 1
        for mp in mps:
            if not mirror_images_conjugate(f, m.hom, mp):
                failures.append(f"{m.kind} ({m.note}): {mp.left} vs {mp.right}")
    emb = centralizer_embedding(f)
    h = emb.hnn
    t = loop_of_generator(h, "t")
    samples = [loop for mp in mps for loop in mp.loops(f)]
    pres = pi1_presentation(f.graph).alphabet
    for _ in range(pairs):
        samples.append(from_word(f.graph, random_word(pres, rng.randint(1, 10), rng)))
    syllabic = all(is_syllabic(h, emb(p)) for p in samples)
    t_conj = True
    for mp in mps:
        L, R = mp.loops(f)
        if not equal(h, concat(h, t, emb(R), inverse(h, t)), emb(L)):
            t_conj = False
    return CDoubleReport(members, len(mps), failures, len(samples), syllabic, t_conj)


# -- the tower over the Magnus pair --------------------------------------------


@dataclass
class Fig3Tower:
    magnus: MagnusPairFixture
    graph: GraphOfGroups
    rho_star: GogHom

    def include(self, p: PathWord) -> PathWord:
        """Image of a loop of the Magnus group in the tower."""
        return from_word(self.graph, rename(to_word(self.magnus.graph, p), pi1_presentation(self.graph).alphabet))


def fig3_tower(f: Optional[MagnusPairFixture] = None) -> Fig3Tower:
    """Adjoin ``F3`` along ``u = rho(u)`` and ``s v s^-1 = rho(v)``."""
    f = f or magnus_pair_gog()
    if f.rho is None:
        raise GogError("the tower over the Magnus pair needs a frozen strict map")
    g0 = f.graph
    ru, rv = f.rho.images["u"], f.rho.images["v"]
    n = len(g0.vertices)
    vertices = g0.vertices + (Vertex("F3", FreeVertexGroup(F3)),)
    edges = g0.edges + (
        Edge("g_u", g0.vertex_index("U"), (1,), n, ru, tree=True),
        Edge("s", n, rv, g0.vertex_index("V"), (1,)),
    )
    g = require_valid(GraphOfGroups("L", vertices, edges, base=g0.base))
    images = dict(f.rho.images)
    for name in F3.generators:
        images[name] = F3.gen(name)
    images["s"] = F3.identity()
    rs = GogHom(g, F3, images)
    bad = rs.failing_relations()
    if bad:
        raise GogError(f"rho* breaks relation {bad[0]}")
    return Fig3Tower(f, g, rs)
