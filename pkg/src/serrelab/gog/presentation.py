"""Spanning-tree presentations, maps to free groups, strictness, and twists."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from ..homs import FreeHom, analyze, apply, non_abelian_image
from ..stallings import fold, rank_and_index
from ..words import Alphabet, Word, invert, product
from .graph import (
    GogError,
    GraphOfGroups,
    PathWord,
    concat,
    normal_form,
    reduce_path,
)


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relations: tuple[Word, ...]
    stable_letters: tuple[str, ...]


def _syl_word(alphabet: Alphabet, syl) -> Word:
    return Word(alphabet, tuple((alphabet.index(n), e) for n, e in syl))


@lru_cache(maxsize=256)
def pi1_presentation(g: GraphOfGroups) -> Presentation:
    """Vertex generators plus one stable letter per non-tree edge.

    Tree edges give ``alpha omega^-1``; a non-tree edge ``t`` gives
    ``t^-1 alpha t omega^-1``.  Free abelian vertex groups contribute their
    commutator relations.
    """
    names: list[str] = []
    for v in g.vertices:
        names.extend(v.group.generators())
    stable = tuple(e.name for e in g.edges if not e.tree)
    names.extend(stable)
    A = Alphabet(f"pi1({g.name})", tuple(names))
    rels: list[Word] = []
    for v in g.vertices:
        for r in v.group.relations():
            rels.append(_syl_word(A, r))
    for e in g.edges:
        if e.src_attach is None:
            continue
        a = _syl_word(A, g.vertex_group(e.src).to_syllables(e.src_attach))
        w = _syl_word(A, g.vertex_group(e.dst).to_syllables(e.dst_attach))
        if e.tree:
            rels.append(a * invert(w))
        else:
            t = A.gen(e.name)
            rels.append(product([invert(t), a, t, invert(w)]))
    return Presentation(A, tuple(rels), stable)


def generator_owner(g: GraphOfGroups, name: str) -> tuple[str, int]:
    """``("vertex", v)`` or ``("edge", i)``."""
    for i, v in enumerate(g.vertices):
        if name in v.group.generators():
            return "vertex", i
    for i, e in enumerate(g.edges):
        if e.name == name and not e.tree:
            return "edge", i
    raise KeyError(f"{name!r} is not a generator of pi1({g.name})")


def loop_of_generator(g: GraphOfGroups, name: str) -> PathWord:
    kind, i = generator_owner(g, name)
    if kind == "vertex":
        return g.vertex_loop(i, g.vertex_group(i).gen(name))
    return g.edge_loop(i)


def from_word(g: GraphOfGroups, w: Word) -> PathWord:
    """Loop at the base represented by a word in the presentation generators."""
    pres = pi1_presentation(g)
    if w.alphabet.generators != pres.alphabet.generators:
        from ..words import rename

        w = rename(w, pres.alphabet)
    if not w.syllables:
        return g.identity()
    parts = []
    for gi, e in w.syllables:
        name = pres.alphabet.generators[gi]
        kind, i = generator_owner(g, name)
        if kind == "vertex":
            grp = g.vertex_group(i)
            parts.append(g.vertex_loop(i, grp.power(grp.gen(name), e)))
        else:
            from .graph import path_power

            parts.append(path_power(g, g.edge_loop(i), e))
    return normal_form(g, concat(g, *parts))


def to_word(g: GraphOfGroups, p: PathWord) -> Word:
    """Word in the presentation generators for a loop at the base (tree letters vanish)."""
    if p.start != g.base or p.end(g) != g.base:
        raise GogError("to_word needs a loop at the base vertex")
    A = pi1_presentation(g).alphabet
    syl: list[tuple[int, int]] = []
    vs = p.vertices(g)
    for i, (v, x) in enumerate(zip(vs, p.elems)):
        for n, e in g.vertex_group(v).to_syllables(x):
            syl.append((A.index(n), e))
        if i < len(p.letters):
            l = p.letters[i]
            edge = g.edges[l[0]]
            if not edge.tree:
                syl.append((A.index(edge.name), l[1]))
    return Word(A, syl)


# -- maps from pi1 to a free group -----------------------------------------


@dataclass(frozen=True)
class GogHom:
    """A homomorphism ``pi1(g) -> F(target)`` given on presentation generators."""

    graph: GraphOfGroups
    target: Alphabet
    images: Mapping[str, Word]

    def as_free_hom(self) -> FreeHom:
        pres = pi1_presentation(self.graph)
        return FreeHom.from_mapping(pres.alphabet, self.target, self.images)

    def __call__(self, p: PathWord) -> Word:
        return apply(self.as_free_hom(), to_word(self.graph, p))

    def failing_relations(self) -> list[Word]:
        h = self.as_free_hom()
        return [r for r in pi1_presentation(self.graph).relations if not apply(h, r).is_identity()]

    def image_of_vertex_element(self, v: int, x) -> Word:
        grp = self.graph.vertex_group(v)
        syl = grp.to_syllables(x)
        if not syl:
            return self.target.identity()
        return product([self.images[n] ** e for n, e in syl])

    def __hash__(self):
        return hash((self.graph, self.target, tuple(sorted((k, v) for k, v in self.images.items()))))


@dataclass
class StrictnessReport:
    relations_ok: bool
    edge_groups_injective: bool
    abelian_envelopes_injective: bool
    free_envelopes_injective: bool
    qh_images_non_abelian: bool
    surjective: bool
    details: list[str] = field(default_factory=list)

    @property
    def strict(self) -> bool:
        return (
            self.relations_ok
            and self.edge_groups_injective
            and self.abelian_envelopes_injective
            and self.free_envelopes_injective
            and self.qh_images_non_abelian
        )

    def as_dict(self) -> dict:
        return {
            "relations_ok": self.relations_ok,
            "edge_groups_injective": self.edge_groups_injective,
            "abelian_envelopes_injective": self.abelian_envelopes_injective,
            "free_envelopes_injective": self.free_envelopes_injective,
            "qh_images_non_abelian": self.qh_images_non_abelian,
            "surjective": self.surjective,
            "strict": self.strict,
        }


class RelationError(GogError):
    pass


def check_strict(g: GraphOfGroups, hom: GogHom, qh_vertices: Sequence[str] = ()) -> StrictnessReport:
    """Check the strictness conditions for a map to a free group.

    Edge groups are infinite cyclic, so injectivity there means a nontrivial
    image.  A free abelian vertex group maps into a free group faithfully
    only when the image rank equals its own rank.  For non-QH free vertices the
    envelope is taken to be the vertex group itself and injectivity is
    decided by the Hopfian rank test.
    """
    bad = hom.failing_relations()
    if bad:
        raise RelationError(f"images do not satisfy relation {bad[0]}")
    details: list[str] = []
    qh = {g.vertex_index(n) for n in qh_vertices}

    edge_ok = True
    for e in g.edges:
        if e.src_attach is None:
            continue
        img = hom.image_of_vertex_element(e.src, e.src_attach)
        if img.is_identity():
            edge_ok = False
            details.append(f"edge {e.name}: edge group killed")

    ab_ok = True
    free_ok = True
    qh_ok = True
    for i, v in enumerate(g.vertices):
        grp = v.group
        imgs = [hom.images[n] for n in grp.generators()]
        if grp.kind == "abelian":
            atts = [
                e.dst_attach if e.dst == i else e.src_attach
                for e in g.edges
                if e.src_attach is not None and i in (e.src, e.dst)
            ]
            want = _int_rank(atts)
            rank, _ = rank_and_index(fold([hom.image_of_vertex_element(i, a) for a in atts], hom.target))
            if rank != want:
                ab_ok = False
                details.append(f"vertex {v.name}: image of A_D has rank {rank}, expected {want}")
        elif i in qh:
            if not non_abelian_image(imgs):
                qh_ok = False
                details.append(f"vertex {v.name}: QH image is abelian")
        elif grp.kind == "free":
            _envelope_is_vertex(g, i)
            an = analyze(FreeHom(grp.alphabet, hom.target, tuple(imgs)))
            if not an.injective:
                free_ok = False
                details.append(f"vertex {v.name}: not injective (image rank {an.image_rank})")
        else:
            raise NotImplementedError(f"envelope of vertex {v.name} ({grp.kind})")

    _, index = rank_and_index(fold(list(hom.images.values()), hom.target))
    return StrictnessReport(True, edge_ok, ab_ok, free_ok, qh_ok, index == 1, details)


def _int_rank(vectors) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _envelope_is_vertex(g: GraphOfGroups, v: int) -> None:
    """Refuse envelopes that are visibly bigger than the vertex group.

    The envelope of a non-QH vertex ``R`` adds the centralizers of its
    incident edge groups.  That adds nothing new when every incident edge
    runs to another vertex (or to an abelian vertex whose incident edge
    groups generate a cyclic subgroup).  A loop edge at ``R`` puts its stable
    letter in the centralizer, and this case is not handled.
    """
    for e in g.edges:
        if e.src_attach is None or v not in (e.src, e.dst):
            continue
        if e.src == e.dst:
            raise NotImplementedError(f"envelope at {g.vertices[v].name}: loop edge {e.name}")
        other = e.dst if e.src == v else e.src
        grp = g.vertex_group(other)
        if grp.kind == "abelian":
            atts = {
                f.dst_attach if f.dst == other else f.src_attach
                for f in g.edges
                if f.src_attach is not None and other in (f.src, f.dst)
            }
            if len(atts) > 1 or grp.rank() < 1:
                raise NotImplementedError(
                    f"envelope at {g.vertices[v].name}: abelian neighbour {g.vertices[other].name} has A_D of rank > 1"
                )


# -- automorphisms of the fundamental groupoid -------------------------------


def map_path(
    g: GraphOfGroups,
    p: PathWord,
    vertex_maps: Mapping[int, Callable] = {},
    pre: Mapping[tuple[int, int], object] = {},
    post: Mapping[tuple[int, int], object] = {},
) -> PathWord:
    """Apply a groupoid morphism given by vertex maps and letter decorations.

    ``vertex_maps[v]`` transforms elements at ``v``; a letter ``l`` becomes
    ``pre[l] . l . post[l]`` with ``pre[l]`` at the initial vertex and
    ``post[l]`` at the terminal vertex.
    """
    vs = p.vertices(g)
    parts: list[PathWord] = []
    for i, (v, x) in enumerate(zip(vs, p.elems)):
        f = vertex_maps.get(v)
        parts.append(g.vertex_element(v, f(x) if f else x))
        if i < len(p.letters):
            l = p.letters[i]
            u, w = g.initial(l), g.terminal(l)
            a = pre.get(l)
            b = post.get(l)
            elems = (
                a if a is not None else g.vertex_group(u).identity(),
                b if b is not None else g.vertex_group(w).identity(),
            )
            parts.append(PathWord(u, elems, (l,)))
    return reduce_path(g, concat(g, *parts))


def twist(g: GraphOfGroups, p: PathWord, exponents: Mapping[str, int]) -> PathWord:
    """Dehn twists along edges: ``e -> alpha^N e`` for each named edge."""
    pre = {}
    for name, n in exponents.items():
        i = g.edge_index(name)
        e = g.edges[i]
        if e.src_attach is None or n == 0:
            continue
        grp = g.vertex_group(e.src)
        pre[(i, 1)] = grp.power(e.src_attach, n)
    post = {}
    for (i, s), a in list(pre.items()):
        post[(i, -1)] = g.vertex_group(g.edges[i].src).inv(a)
    return map_path(g, p, pre={k: v for k, v in pre.items()}, post=post)


def vertex_automorphism(
    g: GraphOfGroups,
    p: PathWord,
    vertex: str,
    images: Mapping[str, Word],
    edge_conjugators: Mapping[str, Word],
) -> PathWord:
    """Extend an automorphism of a free vertex group across the graph.

    The automorphism must send each attaching element ``c`` at the vertex to
    ``g_e c g_e^-1`` where ``g_e = edge_conjugators[e]`` (default trivial).
    Letters leaving the vertex become ``g_e l`` and letters arriving become
    ``l g_e^-1``.
    """
    v = g.vertex_index(vertex)
    grp = g.vertex_group(v)
    hom = FreeHom.from_mapping(grp.alphabet, grp.alphabet, images)
    for i, e in enumerate(g.edges):
        for end, att in (("src", e.src_attach), ("dst", e.dst_attach)):
            if getattr(e, end) != v or att is None:
                continue
            ce = edge_conjugators.get(e.name, grp.identity())
            if apply(hom, att) != ce * att * invert(ce):
                raise GogError(f"vertex automorphism does not conjugate the attachment of {e.name}")
    pre, post = {}, {}
    for i, e in enumerate(g.edges):
        ce = edge_conjugators.get(e.name)
        if ce is None or ce.is_identity():
            continue
        if e.src == v:
            pre[(i, 1)] = ce
            post[(i, -1)] = invert(ce)
        if e.dst == v:
            pre[(i, -1)] = ce
            post[(i, 1)] = invert(ce)
    return map_path(g, p, vertex_maps={v: lambda x: apply(hom, x)}, pre=pre, post=post)
