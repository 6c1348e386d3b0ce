"""Towers of abelian and quadratic extensions over a free group, their
retractions onto the base, and separation / discrimination experiments.

Level ``i`` is realized as a two-vertex graph of groups whose first vertex is
the whole level ``i-1`` group (nested), so the ``i``-th level decomposition
is available directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .gog import (
    AbelianVertexGroup,
    ConjugacySolver,
    Edge,
    FreeVertexGroup,
    GraphOfGroups,
    GraphVertexGroup,
    PathWord,
    Vertex,
    format_path,
    is_trivial,
    pi1_presentation,
    require_valid,
    to_word,
)
from .homs import FreeHom, apply, compose, non_abelian_image
from .words import (
    Alphabet,
    Word,
    are_conjugate,
    commutator,
    invert,
    is_indivisible,
    product,
    random_word,
    rename,
    verify_genus_expression,
)

DEFAULT_N_MAX = 16


class TowerError(ValueError):
    pass


class InputError(ValueError):
    """The experiment input violates its precondition (carries a certificate)."""

    def __init__(self, message: str, certificate: Optional[str] = None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class AbelianExt:
    """Adjoin ``Z^rank`` commuting with ``attach`` (``None``: free product with ``Z^rank``)."""

    attach: Optional[Word]
    rank: int = 1
    names: tuple[str, ...] = ()


@dataclass(frozen=True)
class QuadraticExt:
    """Glue a surface of the given genus along ``boundaries`` (words in the level below).

    ``images`` gives the retraction images ``(X_i, Y_i)`` of the handle
    generators.  Boundary ``j < b`` is the free generator ``d_j``; the last
    boundary is ``prod [x_i, y_i] d_1 ... d_{b-1}``.
    """

    genus: int
    boundaries: tuple[Word, ...]
    images: tuple[tuple[Word, Word], ...]
    names: tuple[str, ...] = ()


ExtensionLevel = Union[AbelianExt, QuadraticExt]


@dataclass
class Level:
    ext: ExtensionLevel
    graph: GraphOfGroups
    new_generators: tuple[str, ...]
    internal: tuple[str, ...]


@dataclass
class Tower:
    base: Alphabet
    levels: list[Level]
    user_alphabets: list[Alphabet]
    centralizer_condition_assumed: bool = True
    _solver: Optional[ConjugacySolver] = field(default=None, repr=False)

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def is_ice(self) -> bool:
        return all(isinstance(l.ext, AbelianExt) for l in self.levels)

    @property
    def user_alphabet(self) -> Alphabet:
        return self.user_alphabets[-1]

    def graph(self, i: Optional[int] = None) -> GraphOfGroups:
        i = self.height if i is None else i
        if i == 0:
            raise TowerError("level 0 is the free base")
        return self.levels[i - 1].graph

    def presentation_alphabet(self, i: Optional[int] = None) -> Alphabet:
        i = self.height if i is None else i
        if i == 0:
            return self.base
        return pi1_presentation(self.graph(i)).alphabet

    def solver(self) -> ConjugacySolver:
        if self._solver is None:
            self._solver = ConjugacySolver(self.graph())
        return self._solver

    def element(self, w: Word, level: Optional[int] = None):
        """Element of level ``level`` (default top) for a word in the user generators."""
        i = self.height if level is None else level
        A = self.presentation_alphabet(i)
        ww = rename(w, A)
        if i == 0:
            return ww
        from .gog import from_word

        return from_word(self.graph(i), ww)

    def to_user_word(self, p) -> Word:
        """Word in the presentation of the top level (internal generators may occur)."""
        if self.height == 0:
            return p
        return to_word(self.graph(), p)

    def format(self, p) -> str:
        return str(self.to_user_word(p))


def generator_names(ext: ExtensionLevel, i: int) -> tuple[str, ...]:
    """Names of the abelian or surface generators added at level ``i``."""
    if isinstance(ext, AbelianExt):
        names = ext.names or tuple(f"t{i}" if ext.rank == 1 else f"t{i}_{j}" for j in range(1, ext.rank + 1))
        if len(names) != ext.rank:
            raise TowerError(f"level {i}: {ext.rank} generator names expected")
        return tuple(names)
    b = len(ext.boundaries)
    names = ext.names or tuple(
        n for k in range(1, ext.genus + 1) for n in (f"x{i}_{k}", f"y{i}_{k}")
    ) + tuple(f"d{i}_{j}" for j in range(1, b))
    if len(names) != 2 * ext.genus + b - 1:
        raise TowerError(f"level {i}: {2 * ext.genus + b - 1} surface generator names expected")
    return tuple(names)


def user_names(ext: ExtensionLevel, i: int) -> tuple[str, ...]:
    """Generators level ``i`` adds to the user alphabet (stable letters included)."""
    names = generator_names(ext, i)
    if isinstance(ext, QuadraticExt):
        names += tuple(f"s{i}_{j}" for j in range(1, len(ext.boundaries)))
    return names


def user_alphabet_name(tower_name: str, i: int) -> str:
    return f"{tower_name}_user{i}"


def _level_group(t_levels: list[Level], base: Alphabet):
    if not t_levels:
        return FreeVertexGroup(base)
    return GraphVertexGroup(t_levels[-1].graph)


def _element_in(levels: list[Level], base: Alphabet, w: Word):
    """Element of the current top group for a word over the current user alphabet."""
    if not levels:
        return rename(w, base)
    from .gog import from_word

    g = levels[-1].graph
    return from_word(g, rename(w, pi1_presentation(g).alphabet))


def build_tower(base: Alphabet, exts: Sequence[ExtensionLevel], name: str = "T") -> Tower:
    levels: list[Level] = []
    user = [base]
    for i, ext in enumerate(exts, start=1):
        below = _level_group(levels, base)
        U = user[-1]
        if isinstance(ext, AbelianExt):
            names = generator_names(ext, i)
            if ext.attach is None:
                A = AbelianVertexGroup(ext.rank, names)
                edge = Edge(f"c{i}", 0, None, 1, None, tree=True)
                internal: tuple[str, ...] = ()
            else:
                a = _element_in(levels, base, ext.attach)
                if below.is_identity(a):
                    raise TowerError(f"level {i}: attaching element is trivial")
                un = f"_u{i}"
                A = AbelianVertexGroup(ext.rank + 1, (un,) + names)
                edge = Edge(f"c{i}", 0, a, 1, (1,) + (0,) * ext.rank, tree=True)
                internal = (un,)
            g = GraphOfGroups(f"{name}{i}", (Vertex(f"G{i - 1}", below), Vertex(f"A{i}", A)), (edge,))
            new = names
        else:
            if ext.genus < 0 or not ext.boundaries:
                raise TowerError(f"level {i}: quadratic level needs genus >= 0 and a boundary")
            b = len(ext.boundaries)
            if 2 - 2 * ext.genus - b > -1:
                raise TowerError(f"level {i}: surface has Euler characteristic > -1")
            if len(ext.images) != ext.genus:
                raise TowerError(f"level {i}: one image pair per handle expected")
            hn = generator_names(ext, i)
            S = Alphabet(f"S{i}", hn)
            sg = S.gens()
            handles = [(sg[2 * k], sg[2 * k + 1]) for k in range(ext.genus)]
            ds = sg[2 * ext.genus :]
            last = product([commutator(x, y) for x, y in handles] + list(ds), S)
            hs = [_element_in(levels, base, h) for h in ext.boundaries]
            edges = []
            stable = []
            for j, d in enumerate(ds, start=1):
                en = f"s{i}_{j}"
                edges.append(Edge(en, 1, d, 0, hs[j - 1]))
                stable.append(en)
            edges.append(Edge(f"c{i}", 1, last, 0, hs[-1], tree=True))
            g = GraphOfGroups(
                f"{name}{i}", (Vertex(f"G{i - 1}", below), Vertex(f"S{i}", FreeVertexGroup(S))), tuple(edges)
            )
            new = hn + tuple(stable)
            internal = ()
        require_valid(g)
        lvl = Level(ext, g, new, internal)
        levels.append(lvl)
        if isinstance(ext, QuadraticExt):
            _check_quadratic(levels, base, i)
        user.append(Alphabet(user_alphabet_name(name, i), U.generators + new))
    return Tower(base, levels, user)


def _check_quadratic(levels: list[Level], base: Alphabet, i: int) -> None:
    lvl = levels[i - 1]
    ext = lvl.ext
    hom = _level_hom(levels, base, i)
    bad = _failing_relations(levels, base, i, hom)
    if bad:
        raise TowerError(f"level {i}: retraction images do not respect the boundary gluing ({bad})")
    pairs_imgs = [x for pair in ext.images for x in pair]
    if i == 1:
        if len(ext.boundaries) == 1 and not verify_genus_expression(
            rename(ext.boundaries[0], base), [(rename(x, base), rename(y, base)) for x, y in ext.images]
        ):
            raise TowerError(f"level {i}: boundary is not the product of the image commutators")
        if not non_abelian_image([rename(x, base) for x in pairs_imgs] + [rename(h, base) for h in ext.boundaries]):
            raise TowerError(f"level {i}: surface image is abelian")


def _level_hom(levels: list[Level], base: Alphabet, i: int, exponents: Mapping[str, int] | int = 1) -> FreeHom:
    """Presentation-level map from level ``i`` onto level ``i-1``."""
    lvl = levels[i - 1]
    g = lvl.graph
    P = pi1_presentation(g).alphabet
    below = base if i == 1 else pi1_presentation(levels[i - 2].graph).alphabet
    images: dict[str, Word] = {n: below.gen(n) for n in below.generators}
    ext = lvl.ext
    if isinstance(ext, AbelianExt):
        if ext.attach is None:
            for n in lvl.new_generators:
                images[n] = below.identity()
        else:
            a = rename(ext.attach, below)
            for n in lvl.internal:
                images[n] = a
            for n in lvl.new_generators:
                k = exponents if isinstance(exponents, int) else exponents.get(n, 1)
                images[n] = a ** k
    else:
        b = len(ext.boundaries)
        hn = lvl.new_generators
        for k, (x, y) in enumerate(ext.images):
            images[hn[2 * k]] = rename(x, below)
            images[hn[2 * k + 1]] = rename(y, below)
        for j in range(1, b):
            images[hn[2 * ext.genus + j - 1]] = rename(ext.boundaries[j - 1], below)
            images[f"s{i}_{j}"] = below.identity()
        retract = FreeHom.from_mapping(P, below, images)
        n = exponents - 1 if isinstance(exponents, int) else exponents.get(f"S{i}", 0)
        if n:
            return compose(retract, surface_twist(lvl, i, P, n))
        return retract
    return FreeHom.from_mapping(P, below, images)


def surface_twist(lvl: Level, i: int, P: Alphabet, n: int) -> FreeHom:
    """Automorphism of level ``i`` twisting the surface ``n`` times, fixing the level below.

    Each handle gets ``x -> x y^n`` followed by ``y -> y x^n`` (both fix
    ``[x, y]``); consecutive free boundaries ``d_j, d_{j+1}`` are conjugated
    by ``(d_j d_{j+1})^n``, the stable letters absorbing the conjugator.
    """
    ext = lvl.ext
    hn = generator_names(ext, i)
    img = {g: P.gen(g) for g in P.generators}
    for k in range(ext.genus):
        xn, yn = hn[2 * k], hn[2 * k + 1]
        x, y = P.gen(xn), P.gen(yn)
        x2 = x * y ** n
        img[xn] = x2
        img[yn] = y * x2 ** n
    ds = hn[2 * ext.genus :]
    for j in range(len(ds) - 1):
        d1, d2 = P.gen(ds[j]), P.gen(ds[j + 1])
        c = (img[ds[j]] * img[ds[j + 1]]) ** n
        for m, d in ((j, d1), (j + 1, d2)):
            img[ds[m]] = c * img[ds[m]] * invert(c)
            st = f"s{i}_{m + 1}"
            img[st] = c * img[st]
    return FreeHom.from_mapping(P, P, img)


def _failing_relations(levels, base, i, hom: FreeHom) -> list[str]:
    """Relations of level ``i`` whose image is nontrivial in level ``i-1``."""
    g = levels[i - 1].graph
    out = []
    for r in pi1_presentation(g).relations:
        img = apply(hom, r)
        if i == 1:
            ok = img.is_identity()
        else:
            from .gog import from_word

            ok = is_trivial(levels[i - 2].graph, from_word(levels[i - 2].graph, img))
        if not ok:
            out.append(str(r))
    return out


def level_retraction(t: Tower, i: int, exponents: Mapping[str, int] | int = 1) -> FreeHom:
    """Retraction of level ``i`` onto level ``i-1`` on presentation generators (verified)."""
    if not 1 <= i <= t.height:
        raise TowerError(f"level index {i} out of range 1..{t.height}")
    hom = _level_hom(t.levels, t.base, i, exponents)
    bad = _failing_relations(t.levels, t.base, i, hom)
    if bad:
        raise TowerError(f"level {i} map does not respect relation {bad[0]}")
    return hom


@dataclass
class Retraction:
    """Composite retraction of the top level onto the free base."""

    tower: Tower
    hom: FreeHom
    exponents: Mapping[str, int] | int

    def __call__(self, p) -> Word:
        return apply(self.hom, self.tower.to_user_word(p))


def _verify_retraction(t: Tower, hom: FreeHom) -> None:
    for n in t.base.generators:
        if apply(hom, hom.domain.gen(n)) != t.base.gen(n):
            raise TowerError(f"composite map moves base generator {n}")
    for r in pi1_presentation(t.graph()).relations:
        if not apply(hom, r).is_identity():
            raise TowerError(f"composite map breaks relation {r}")


def retraction(t: Tower, exponents: Mapping[str, int] | int = 1) -> Retraction:
    if t.height == 0:
        from .homs import identity

        return Retraction(t, identity(t.base), exponents)
    hom = _level_hom(t.levels, t.base, 1, exponents)
    for i in range(2, t.height + 1):
        hom = compose(hom, _level_hom(t.levels, t.base, i, exponents))
    _verify_retraction(t, hom)
    return Retraction(t, hom, exponents)


def ice_retraction(t: Tower, exponents: Mapping[str, int] | int = 1) -> Retraction:
    """Stable letters ``t_j -> w_j^N`` at every level, composed down to the base.

    ``exponents`` is either the diagonal value ``N`` or a per-generator map
    (missing generators default to 1).
    """
    if not t.is_ice:
        raise TowerError("ice_retraction needs a tower of abelian extensions only")
    return retraction(t, exponents)


# -- experiments ------------------------------------------------------------


@dataclass
class ScanStep:
    n: int
    collapsed: list[tuple[int, int]]
    divisible: list[int]


@dataclass
class SeparationReport:
    elements: list[str]
    steps: list[ScanStep]
    minimal_n: Optional[int]
    n_max: int
    indivisible_checked: list[int]
    indivisibility_ok: bool
    replay_ok: Optional[bool] = None

    @property
    def exhausted(self) -> bool:
        return self.minimal_n is None

    def as_dict(self) -> dict:
        return {
            "elements": self.elements,
            "n_scanned": len(self.steps),
            "minimal_n": self.minimal_n,
            "collapsed_pairs": {str(s.n): [list(p) for p in s.collapsed] for s in self.steps},
            "indivisibility": {
                "checked": self.indivisible_checked,
                "ok": self.indivisibility_ok,
                "failures": {str(s.n): s.divisible for s in self.steps if s.divisible},
            },
            "replay_ok": self.replay_ok,
        }


def check_pairwise_non_conjugate(t: Tower, S: Sequence) -> None:
    s = t.solver()
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            res = s.decide(S[i], S[j])
            if res.conjugate:
                raise InputError(
                    f"elements {i} and {j} are conjugate in the tower",
                    format_path(t.graph(), res.conjugator),
                )


def centralizer_is_cyclic(g: GraphOfGroups, p, solver: Optional[ConjugacySolver] = None) -> bool:
    """Sufficient test used to admit flagged elements.

    Hyperbolic elements count as having cyclic centralizer (attaching words
    generate malnormal subgroups of the free factors).  An elliptic element
    whose orbit reaches an abelian vertex of rank at least two does not;
    elements of a nested vertex are examined one level down.
    """
    s = solver if solver is not None else ConjugacySolver(g)
    cls = s.classify(p)
    if not hasattr(cls, "vertex"):
        return True
    for w, y, _ in s.orbit(cls.vertex, cls.element):
        grp = g.vertex_group(w)
        if isinstance(grp, AbelianVertexGroup) and grp.n >= 2:
            return False
    grp = g.vertex_group(cls.vertex)
    if isinstance(grp, GraphVertexGroup):
        inner = grp.graph
        return centralizer_is_cyclic(inner, cls.element)
    return True


def _collapsed(images: Sequence[Word]) -> list[tuple[int, int]]:
    out = []
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if are_conjugate(images[i], images[j]) is not None:
                out.append((i, j))
    return out


def separation_experiment(
    t: Tower,
    S: Sequence,
    n_max: int = DEFAULT_N_MAX,
    indivisible: Sequence[int] = (),
    exponents_override: Optional[Mapping[str, int]] = None,
    precheck: bool = True,
    scan_all: bool = False,
) -> SeparationReport:
    """Scan ``N = 1..n_max`` for a retraction making ``S`` pairwise non-conjugate.

    ``indivisible`` lists indices of elements flagged indivisible; each must
    have cyclic centralizer and an indivisible image at ``N = 1`` (which
    certifies indivisibility in the tower) and is then checked at every
    scanned ``N``.
    """
    if t.height and precheck:
        check_pairwise_non_conjugate(t, S)
    for k in indivisible:
        if t.height and not centralizer_is_cyclic(t.graph(), S[k], t.solver()):
            raise InputError(f"element {k} is flagged indivisible but its centralizer is not cyclic")
    steps: list[ScanStep] = []
    minimal = None
    ind_ok = True
    for n in range(1, n_max + 1):
        ex = dict(exponents_override or {})
        r = retraction(t, _diagonal(t, n, ex))
        images = [r(p) for p in S]
        div = [k for k in indivisible if not is_indivisible(images[k])]
        if n == 1 and div:
            raise InputError(f"elements {div} have divisible images at N = 1; indivisibility not certified")
        if div:
            ind_ok = False
        col = _collapsed(images) if minimal is None else []
        steps.append(ScanStep(n, col, div))
        if minimal is None and not col:
            minimal = n
            if not scan_all:
                break
    replay = None
    if minimal is not None:
        r = retraction(t, _diagonal(t, minimal, dict(exponents_override or {})))
        replay = not _collapsed([r(p) for p in S])
    return SeparationReport(
        [t.format(p) if t.height else str(p) for p in S],
        steps,
        minimal,
        n_max,
        list(indivisible),
        ind_ok,
        replay,
    )


def _diagonal(t: Tower, n: int, override: Mapping[str, int]):
    if not override:
        return n
    ex = {g: n for lvl in t.levels for g in lvl.new_generators}
    ex.update(override)
    return ex


@dataclass
class DiscriminationReport:
    elements: list[str]
    minimal_n: Optional[int]
    n_max: int
    killed: dict[int, list[int]]

    def as_dict(self) -> dict:
        return {
            "elements": self.elements,
            "minimal_n": self.minimal_n,
            "n_scanned": len(self.killed) + (1 if self.minimal_n else 0),
            "killed": {str(k): v for k, v in self.killed.items()},
        }


def discrimination_experiment(t: Tower, P: Sequence, n_max: int = DEFAULT_N_MAX) -> DiscriminationReport:
    """Least ``N`` whose retraction keeps every element of ``P`` nontrivial."""
    G = t.graph() if t.height else None
    for k, p in enumerate(P):
        trivial = p.is_identity() if G is None else is_trivial(G, p)
        if trivial:
            raise InputError(f"element {k} is the identity")
    killed: dict[int, list[int]] = {}
    for n in range(1, n_max + 1):
        r = retraction(t, n)
        dead = [k for k, p in enumerate(P) if r(p).is_identity()]
        if not dead:
            return DiscriminationReport([t.format(p) for p in P], n, n_max, killed)
        killed[n] = dead
    return DiscriminationReport([t.format(p) for p in P], None, n_max, killed)


# -- random sampling in towers ---------------------------------------------------


def random_element(t: Tower, length: int, rng: random.Random):
    """Random reduced word in the user generators, as a tower element."""
    return t.element(random_word(t.user_alphabet, length, rng))


def random_non_conjugate_pairs(
    t: Tower, count: int, rng: random.Random, max_length: int = 6, nontrivial: bool = True
) -> list[tuple]:
    s = t.solver()
    G = t.graph()
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 200 * count:
            raise RuntimeError("could not sample enough non-conjugate pairs")
        p = random_element(t, rng.randint(1, max_length), rng)
        q = random_element(t, rng.randint(1, max_length), rng)
        if nontrivial and (is_trivial(G, p) or is_trivial(G, q)):
            continue
        if s.decide(p, q).conjugate:
            continue
        out.append((p, q))
    return out


# -- sampling the tower over the Magnus pair ----------------------------------


@dataclass
class Prop51Pair:
    left: str
    right: str
    minimal_n: Optional[int]


@dataclass
class Prop51Report:
    pairs: list[Prop51Pair]
    rejected: int
    uv_separated_at: Optional[int]
    n_max: int
    seed: int

    @property
    def all_separated(self) -> bool:
        return all(p.minimal_n is not None for p in self.pairs)

    def as_dict(self) -> dict:
        return {
            "pairs": [{"left": p.left, "right": p.right, "minimal_n": p.minimal_n} for p in self.pairs],
            "rejected_samples": self.rejected,
            "all_separated": self.all_separated,
            "u_v_separated_at": self.uv_separated_at,
            "n_max": self.n_max,
            "seed": self.seed,
        }


def fig3_family(tower, n: int):
    """``r_N = rho* . Phi_N`` on loops of the Magnus group.

    ``Phi_N`` twists every edge off the tree path from the base to ``F3``
    ``N`` times and applies surface twists along ``ab``, ``bc`` and ``pq``,
    ``qr``, each to the power ``N``.  Every factor fixes ``F3`` pointwise, so
    ``r_N`` is a retraction onto ``F3``.
    """
    from .gog import twist, vertex_automorphism

    g = tower.graph
    keep = {"e_d", "g_u"}
    edge_ex = {e.name: n for e in g.edges if e.name not in keep and e.src_attach is not None}
    SUa = g.vertex_group(g.vertex_index("Su")).alphabet
    SVa = g.vertex_group(g.vertex_index("Sv")).alphabet
    a, b, c = SUa.gens()
    p, q, r = SVa.gens()

    def surface_twists(path: PathWord) -> PathWord:
        ab = (a * b) ** n
        bc = (b * c) ** n
        pq = (p * q) ** n
        qr = (q * r) ** n
        conj = lambda x, w: w * x * invert(w)
        path = vertex_automorphism(
            g, path, "Su", {"a": conj(a, ab), "b": conj(b, ab), "c": c}, {"e_a": ab, "e_b": ab}
        )
        path = vertex_automorphism(
            g, path, "Su", {"a": a, "b": conj(b, bc), "c": conj(c, bc)}, {"e_b": bc, "e_c": bc}
        )
        path = vertex_automorphism(
            g, path, "Sv", {"p": conj(p, pq), "q": conj(q, pq), "r": r}, {"f_p": pq, "f_q": pq}
        )
        path = vertex_automorphism(
            g, path, "Sv", {"p": p, "q": conj(q, qr), "r": conj(r, qr)}, {"f_q": qr, "f_r": qr}
        )
        return path

    def r_n(path: PathWord) -> Word:
        return tower.rho_star(surface_twists(twist(g, path, edge_ex)))

    return r_n


def prop51_sampling(
    tower, pair_count: int = 20, seed: int = 0, n_max: int = DEFAULT_N_MAX, max_length: int = 6
) -> Prop51Report:
    """Sample non-conjugate pairs of the Magnus group off the classes of ``u``
    and ``v`` and find ``N`` with ``r_N`` separating them."""
    from .gog import from_word

    f = tower.magnus
    G = f.graph
    s = ConjugacySolver(G)
    rng = random.Random(seed)
    P = pi1_presentation(G).alphabet
    fam = {n: fig3_family(tower, n) for n in range(1, n_max + 1)}

    def include(p):
        return tower.include(p)

    def near_uv(p) -> bool:
        """Conjugate into <u> or <v> (any power, either sign)?"""
        for gen in (f.u, f.v):
            if s.conj_to_power(p, gen) is not None:
                return True
        return False

    pairs: list[Prop51Pair] = []
    rejected = 0
    while len(pairs) < pair_count:
        p = from_word(G, random_word(P, rng.randint(1, max_length), rng))
        q = from_word(G, random_word(P, rng.randint(1, max_length), rng))
        if is_trivial(G, p) or is_trivial(G, q) or near_uv(p) or near_uv(q):
            rejected += 1
            continue
        if s.decide(p, q).conjugate:
            rejected += 1
            continue
        lp, lq = include(p), include(q)
        found = None
        for n in range(1, n_max + 1):
            if are_conjugate(fam[n](lp), fam[n](lq)) is None:
                found = n
                break
        pairs.append(Prop51Pair(str(to_word(G, p)), str(to_word(G, q)), found))
    lu, lv = include(f.u), include(f.v)
    uv = None
    for n in range(1, n_max + 1):
        if are_conjugate(fam[n](lu), fam[n](lv)) is None:
            uv = n
            break
    return Prop51Report(pairs, rejected, uv, n_max, seed)
