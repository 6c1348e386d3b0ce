"""Vertex groups: free, free abelian, and nested fundamental groups.

Every vertex group exposes the same small interface so that reduction and
conjugacy in a graph of groups never look inside an element.  Conventions
used throughout:

* ``power_exponent(g, a)`` returns ``k`` with ``g == a^k`` or ``None``.
* ``coset_rep(g, a)`` returns ``(r, m)`` with ``g == r a^m`` and ``r``
  depending only on the coset ``g<a>``.
* ``conj_to_power(h, a)`` returns ``(k, x)`` with ``x^-1 h x == a^k``.
* ``conjugate(h1, h2)`` returns ``x`` with ``x^-1 h1 x == h2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Optional, Sequence

from ..words import (
    Alphabet,
    Word,
    are_conjugate,
    cyclic_reduction,
    invert,
    power,
    primitive_root,
)

Syllables = list[tuple[str, int]]


class FreeVertexGroup:
    """Free group on a named alphabet; elements are :class:`Word`."""

    kind = "free"

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self._coset_memo: dict[tuple[Word, Word], tuple[Word, int]] = {}

    def __eq__(self, other):
        return isinstance(other, FreeVertexGroup) and other.alphabet == self.alphabet

    def __hash__(self):
        return hash(("free", self.alphabet))

    def __repr__(self):
        return f"Free({', '.join(self.alphabet.generators)})"

    def rank(self) -> int:
        return len(self.alphabet)

    def identity(self) -> Word:
        return self.alphabet.identity()

    def is_element(self, g) -> bool:
        return isinstance(g, Word) and g.alphabet == self.alphabet

    def mul(self, a: Word, b: Word) -> Word:
        return a * b

    def inv(self, a: Word) -> Word:
        return invert(a)

    def power(self, a: Word, k: int) -> Word:
        return power(a, k)

    def is_identity(self, a: Word) -> bool:
        return a.is_identity()

    def length(self, a: Word) -> int:
        return len(a)

    def cyc_length(self, a: Word) -> int:
        return len(cyclic_reduction(a)[1])

    def key(self, a: Word):
        return a.key()

    def class_key(self, a: Word) -> Hashable:
        from ..words import cyclic_canonical

        return cyclic_canonical(a)[0].letters

    def power_exponent(self, g: Word, a: Word) -> Optional[int]:
        if g.is_identity():
            return 0
        r, m = primitive_root(a)
        rg, j = primitive_root(g)
        if rg == r:
            e = j
        elif rg == invert(r):
            e = -j
        else:
            return None
        if e % m:
            return None
        return e // m

    def coset_rep(self, g: Word, a: Word) -> tuple[Word, int]:
        hit = self._coset_memo.get((g, a))
        if hit is None:
            if len(self._coset_memo) > 200_000:
                self._coset_memo.clear()
            hit = self._coset_memo[g, a] = self._coset_rep(g, a)
        return hit

    def _coset_rep(self, g: Word, a: Word) -> tuple[Word, int]:
        # With a = c core c^-1 and u = g c, |g a^-m| is V-shaped in m with its
        # minimum where the suffix of u stops matching the periodic core, so
        # only the exponents next to that point (and 0) can win.
        c, core = cyclic_reduction(a)
        u = (g * c).letters()
        n = len(core.letters())
        cands = {0}
        for sign, per in ((1, core.letters()), (-1, invert(core).letters())):
            s = 0
            while s < len(u) and u[-1 - s] == per[-1 - (s % n)]:
                s += 1
            q = s // n
            cands.update((sign * q, sign * (q + 1)))
        best = None
        for m in cands:
            r = g * power(a, -m)
            k = (r.key(), abs(m), -m)
            if best is None or k < best[0]:
                best = (k, r, m)
        return best[1], best[2]

    def conj_to_power(self, h: Word, a: Word) -> Optional[tuple[int, Word]]:
        if h.is_identity():
            return 0, self.identity()
        r, m = primitive_root(a)
        rh, j = primitive_root(h)
        cert = are_conjugate(rh, r, allow_inverse=True)
        if cert is None:
            return None
        e = j * cert.sign
        if e % m:
            return None
        # cert: Z r^sign Z^-1 = rh, so Z a^k Z^-1 = h with x = Z
        return e // m, cert.conjugator

    def conjugate(self, h1: Word, h2: Word) -> Optional[Word]:
        cert = are_conjugate(h2, h1)
        if cert is None:
            return None
        return invert(cert.conjugator)

    def generators(self) -> tuple[str, ...]:
        return self.alphabet.generators

    def gen(self, name: str) -> Word:
        return self.alphabet.gen(name)

    def to_syllables(self, a: Word) -> Syllables:
        gens = self.alphabet.generators
        return [(gens[g], e) for g, e in a.syllables]

    def relations(self) -> list[Syllables]:
        return []

    def format(self, a: Word) -> str:
        return str(a)


class AbelianVertexGroup:
    """Free abelian group ``Z^rank``; elements are integer tuples."""

    kind = "abelian"

    def __init__(self, rank: int, names: Optional[Sequence[str]] = None):
        if rank < 1:
            raise ValueError("abelian vertex group needs rank >= 1")
        self.n = rank
        self.names = tuple(names) if names is not None else None
        if self.names is not None and len(self.names) != rank:
            raise ValueError("abelian vertex group: one name per coordinate")

    def __eq__(self, other):
        return isinstance(other, AbelianVertexGroup) and (other.n, other.names) == (self.n, self.names)

    def __hash__(self):
        return hash(("abelian", self.n, self.names))

    def __repr__(self):
        return f"Abelian({self.n})"

    def rank(self) -> int:
        return self.n

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.n

    def is_element(self, g) -> bool:
        return isinstance(g, tuple) and len(g) == self.n and all(isinstance(x, int) for x in g)

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def power(self, a, k: int):
        return tuple(k * x for x in a)

    def is_identity(self, a) -> bool:
        return not any(a)

    def length(self, a) -> int:
        return sum(abs(x) for x in a)

    def cyc_length(self, a) -> int:
        return self.length(a)

    def key(self, a):
        return (self.length(a), a)

    def class_key(self, a) -> Hashable:
        return a

    def power_exponent(self, g, a) -> Optional[int]:
        i = next(i for i, x in enumerate(a) if x)
        if g[i] % a[i]:
            return None
        k = g[i] // a[i]
        return k if self.power(a, k) == g else None

    def coset_rep(self, g, a):
        i = next(i for i, x in enumerate(a) if x)
        m = _floor_div_abs(g[i], a[i])
        return self.mul(g, self.power(a, -m)), m

    def conj_to_power(self, h, a):
        k = self.power_exponent(h, a)
        return None if k is None else (k, self.identity())

    def conjugate(self, h1, h2):
        return self.identity() if h1 == h2 else None

    def generators(self) -> tuple[str, ...]:
        if self.names is None:
            raise ValueError("abelian vertex group has no generator names")
        return self.names

    def gen(self, name: str):
        i = self.generators().index(name)
        return tuple(1 if j == i else 0 for j in range(self.n))

    def to_syllables(self, a) -> Syllables:
        names = self.generators()
        return [(names[i], x) for i, x in enumerate(a) if x]

    def relations(self) -> list[Syllables]:
        names = self.generators()
        out = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                out.append([(names[i], 1), (names[j], 1), (names[i], -1), (names[j], -1)])
        return out

    def format(self, a) -> str:
        return "(" + ",".join(str(x) for x in a) + ")"


def _floor_div_abs(x: int, a: int) -> int:
    """``m`` with ``x - m*a`` in ``[0, |a|)``."""
    m = x // a
    if x - m * a < 0:
        m += 1 if a < 0 else -1
    return m


@dataclass(eq=False)
class GraphVertexGroup:
    """The fundamental group of another graph of groups, used as a vertex group.

    Elements are canonical :class:`~serrelab.gog.graph.PathWord` loops at the
    inner base vertex.
    """

    graph: Any
    _cache: dict = field(default_factory=dict, repr=False)

    kind = "graph"

    def __eq__(self, other):
        return isinstance(other, GraphVertexGroup) and other.graph == self.graph

    def __hash__(self):
        return hash(("graph", self.graph))

    def __repr__(self):
        return f"Pi1({self.graph.name})"

    def _solver(self):
        s = self._cache.get("solver")
        if s is None:
            from .conjugacy import ConjugacySolver

            s = self._cache["solver"] = ConjugacySolver(self.graph)
        return s

    def rank(self) -> int:
        raise NotImplementedError("rank of a graph vertex group")

    def identity(self):
        return self.graph.identity()

    def is_element(self, g) -> bool:
        from .graph import PathWord

        return isinstance(g, PathWord) and g.start == self.graph.base and g.end(self.graph) == self.graph.base

    def mul(self, a, b):
        from .graph import normal_form, concat

        return normal_form(self.graph, concat(self.graph, a, b))

    def inv(self, a):
        from .graph import normal_form, inverse

        return normal_form(self.graph, inverse(self.graph, a))

    def power(self, a, k: int):
        from .graph import normal_form, path_power

        return normal_form(self.graph, path_power(self.graph, a, k))

    def is_identity(self, a) -> bool:
        return not a.letters and self.graph.vertex_group(a.start).is_identity(a.elems[0])

    def length(self, a) -> int:
        from .graph import nf_length

        return nf_length(self.graph, a)

    def cyc_length(self, a) -> int:
        from .graph import cyclic_reduce

        _, core = cyclic_reduce(self.graph, a)
        if core.letters:
            return len(core.letters)
        return self.graph.vertex_group(core.start).cyc_length(core.elems[0])

    def key(self, a):
        from .graph import path_key

        return path_key(self.graph, a)

    def class_key(self, a) -> Hashable:
        return None

    def power_exponent(self, g, a) -> Optional[int]:
        from .graph import cyclic_reduce, reduce_path, concat, inverse, equal, path_power

        G = self.graph
        if self.is_identity(g):
            return 0
        ca, core = cyclic_reduce(G, a)
        gp = reduce_path(G, concat(G, inverse(G, ca), g, ca))
        if not core.letters:
            if gp.letters:
                return None
            return G.vertex_group(core.start).power_exponent(gp.elems[0], core.elems[0])
        n = len(core.letters)
        L = len(gp.letters)
        if L == 0 or L % n:
            return None
        for k in (L // n, -(L // n)):
            if equal(G, gp, path_power(G, core, k)):
                return k
        return None

    def coset_rep(self, g, a):
        pass

        bound = (self.length(g) + self.length(a)) // max(self.cyc_length(a), 1) + 2
        best = None
        for m in range(-bound, bound + 1):
            r = self.mul(g, self.power(a, -m))
            k = (self.key(r), abs(m), -m)
            if best is None or k < best[0]:
                best = (k, r, m)
        return best[1], best[2]

    def conj_to_power(self, h, a):
        return self._solver().conj_to_power(h, a)

    def conjugate(self, h1, h2):
        res = self._solver().decide(h2, h1)
        if not res.conjugate:
            return None
        return self.inv(res.conjugator)

    def generators(self) -> tuple[str, ...]:
        from .presentation import pi1_presentation

        return pi1_presentation(self.graph).alphabet.generators

    def gen(self, name: str):
        from .presentation import loop_of_generator

        return loop_of_generator(self.graph, name)

    def to_syllables(self, a) -> Syllables:
        from .presentation import to_word

        w = to_word(self.graph, a)
        gens = w.alphabet.generators
        return [(gens[g], e) for g, e in w.syllables]

    def relations(self) -> list[Syllables]:
        from .presentation import pi1_presentation

        pres = pi1_presentation(self.graph)
        gens = pres.alphabet.generators
        return [[(gens[g], e) for g, e in r.syllables] for r in pres.relations]

    def format(self, a) -> str:
        from .graph import format_path

        return "{" + format_path(self.graph, a) + "}"
