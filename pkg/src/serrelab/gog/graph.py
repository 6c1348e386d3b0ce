"""Graphs of groups with cyclic edge groups and paths in their fundamental groupoid.

An edge ``e`` from ``src`` to ``dst`` carries attaching elements ``alpha`` in
the source vertex group and ``omega`` in the target, with the relation
``e^-1 alpha e = omega`` (equivalently ``alpha^k e = e omega^k`` as paths).
Both attaching elements may be ``None``, which stands for a trivial edge
group (a free-product edge).

Group elements are loops at the base vertex in the fundamental groupoid.
Tree edges are kept as explicit letters; they only disappear when a loop is
converted to a word in the spanning-tree presentation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional, Sequence

Letter = tuple[int, int]


class GogError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    name: str
    group: Any


@dataclass(frozen=True)
class Edge:
    name: str
    src: int
    src_attach: Any
    dst: int
    dst_attach: Any
    tree: bool = False


@dataclass(frozen=True)
class GraphOfGroups:
    name: str
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    base: int = 0
    acylindrical_assumed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    def vertex_group(self, v: int):
        return self.vertices[v].group

    def vertex_index(self, name: str) -> int:
        for i, v in enumerate(self.vertices):
            if v.name == name:
                return i
        raise KeyError(f"no vertex {name!r} in {self.name}")

    def edge_index(self, name: str) -> int:
        for i, e in enumerate(self.edges):
            if e.name == name:
                return i
        raise KeyError(f"no edge {name!r} in {self.name}")

    def initial(self, l: Letter) -> int:
        e = self.edges[l[0]]
        return e.src if l[1] > 0 else e.dst

    def terminal(self, l: Letter) -> int:
        e = self.edges[l[0]]
        return e.dst if l[1] > 0 else e.src

    def initial_attach(self, l: Letter):
        e = self.edges[l[0]]
        return e.src_attach if l[1] > 0 else e.dst_attach

    def terminal_attach(self, l: Letter):
        e = self.edges[l[0]]
        return e.dst_attach if l[1] > 0 else e.src_attach

    def identity(self) -> "PathWord":
        return PathWord(self.base, (self.vertex_group(self.base).identity(),), ())

    @cached_property
    def tree_paths(self) -> tuple[tuple[Letter, ...], ...]:
        """Letter sequence along tree edges from the base to each vertex."""
        paths: list[Optional[tuple[Letter, ...]]] = [None] * len(self.vertices)
        paths[self.base] = ()
        q = deque([self.base])
        while q:
            v = q.popleft()
            for i, e in enumerate(self.edges):
                if not e.tree:
                    continue
                for l in ((i, 1), (i, -1)):
                    if self.initial(l) == v and paths[self.terminal(l)] is None:
                        paths[self.terminal(l)] = paths[v] + (l,)
                        q.append(self.terminal(l))
        if any(p is None for p in paths):
            raise GogError(f"{self.name}: tree edges do not span the graph")
        return tuple(paths)  # type: ignore[arg-type]

    def tree_path(self, v: int) -> "PathWord":
        return self.path_from_letters(self.base, self.tree_paths[v])

    def path_from_letters(self, start: int, letters: Sequence[Letter]) -> "PathWord":
        elems = [self.vertex_group(start).identity()]
        for l in letters:
            elems.append(self.vertex_group(self.terminal(l)).identity())
        return PathWord(start, tuple(elems), tuple(letters))

    def vertex_element(self, v: int, g) -> "PathWord":
        """The single-vertex path carrying ``g`` at ``v``."""
        return PathWord(v, (g,), ())

    def vertex_loop(self, v: int, g) -> "PathWord":
        """``T_v g T_v^-1`` as a loop at the base."""
        t = self.tree_path(v)
        return reduce_path(self, concat(self, t, self.vertex_element(v, g), inverse(self, t)))

    def edge_loop(self, i: int) -> "PathWord":
        """``T_src e T_dst^-1``: the loop of the stable letter of edge ``i``."""
        e = self.edges[i]
        path = concat(
            self,
            self.tree_path(e.src),
            self.path_from_letters(e.src, [(i, 1)]),
            inverse(self, self.tree_path(e.dst)),
        )
        return reduce_path(self, path)


@dataclass(frozen=True)
class PathWord:
    """``elems[0] letters[0] elems[1] ... letters[n-1] elems[n]`` starting at ``start``."""

    start: int
    elems: tuple
    letters: tuple[Letter, ...] = ()

    def end(self, g: GraphOfGroups) -> int:
        return g.terminal(self.letters[-1]) if self.letters else self.start

    def vertices(self, g: GraphOfGroups) -> list[int]:
        out = [self.start]
        for l in self.letters:
            out.append(g.terminal(l))
        return out


def check_path(g: GraphOfGroups, p: PathWord) -> None:
    if len(p.elems) != len(p.letters) + 1:
        raise GogError("malformed path: element/letter count mismatch")
    v = p.start
    if not g.vertex_group(v).is_element(p.elems[0]):
        raise GogError(f"malformed path: element 0 not in {g.vertices[v].name}")
    for i, l in enumerate(p.letters):
        if not 0 <= l[0] < len(g.edges) or l[1] not in (1, -1):
            raise GogError(f"malformed path: bad letter {l}")
        if g.initial(l) != v:
            raise GogError(f"malformed path: letter {i} does not leave {g.vertices[v].name}")
        v = g.terminal(l)
        if not g.vertex_group(v).is_element(p.elems[i + 1]):
            raise GogError(f"malformed path: element {i + 1} not in {g.vertices[v].name}")


def concat(g: GraphOfGroups, *paths: PathWord) -> PathWord:
    elems: list = list(paths[0].elems)
    letters: list = list(paths[0].letters)
    end = paths[0].end(g)
    for p in paths[1:]:
        if p.start != end:
            raise GogError(
                f"cannot concatenate: path ends at {g.vertices[end].name}, next starts at {g.vertices[p.start].name}"
            )
        elems[-1] = g.vertex_group(end).mul(elems[-1], p.elems[0])
        elems.extend(p.elems[1:])
        letters.extend(p.letters)
        end = p.end(g)
    return PathWord(paths[0].start, tuple(elems), tuple(letters))


def inverse(g: GraphOfGroups, p: PathWord) -> PathWord:
    vs = p.vertices(g)
    elems = tuple(g.vertex_group(v).inv(x) for v, x in zip(reversed(vs), reversed(p.elems)))
    letters = tuple((i, -s) for i, s in reversed(p.letters))
    return PathWord(p.end(g), elems, letters)


def path_power(g: GraphOfGroups, p: PathWord, k: int) -> PathWord:
    if k == 0:
        return PathWord(p.start, (g.vertex_group(p.start).identity(),), ())
    if k < 0:
        return path_power(g, inverse(g, p), -k)
    out = p
    base = p
    k -= 1
    while k:
        if k & 1:
            out = concat(g, out, base)
        base = concat(g, base, base)
        k >>= 1
    return reduce_path(g, out)


def reduce_path(g: GraphOfGroups, p: PathWord) -> PathWord:
    """Britton reduction: remove every pinch ``l c l^-1`` with ``c`` in the attached subgroup."""
    elems: list = [p.elems[0]]
    letters: list[Letter] = []
    for idx, l in enumerate(p.letters):
        nxt = p.elems[idx + 1]
        if letters and letters[-1] == (l[0], -l[1]):
            prev = letters[-1]
            v = g.terminal(prev)
            grp = g.vertex_group(v)
            att = g.terminal_attach(prev)
            c = elems[-1]
            if att is None:
                k = 0 if grp.is_identity(c) else None
            else:
                k = grp.power_exponent(c, att)
            if k is not None:
                letters.pop()
                elems.pop()
                u = g.initial(prev)
                ugrp = g.vertex_group(u)
                iatt = g.initial_attach(prev)
                mid = ugrp.identity() if k == 0 else ugrp.power(iatt, k)
                elems[-1] = ugrp.mul(ugrp.mul(elems[-1], mid), nxt)
                continue
        letters.append(l)
        elems.append(nxt)
    return PathWord(p.start, tuple(elems), tuple(letters))


def normal_form(g: GraphOfGroups, p: PathWord) -> PathWord:
    """Britton-reduced path with canonical coset representatives.

    Edge-group factors are pushed to the right, so two paths represent the
    same groupoid element iff their normal forms are identical.
    """
    r = reduce_path(g, p)
    if not r.letters:
        return r
    elems = list(r.elems)
    for i, l in enumerate(r.letters):
        v = g.initial(l)
        grp = g.vertex_group(v)
        att = g.initial_attach(l)
        if att is None:
            continue
        rep, m = grp.coset_rep(elems[i], att)
        elems[i] = rep
        if m:
            w = g.terminal(l)
            wgrp = g.vertex_group(w)
            elems[i + 1] = wgrp.mul(wgrp.power(g.terminal_attach(l), m), elems[i + 1])
    return PathWord(r.start, tuple(elems), r.letters)


def is_trivial(g: GraphOfGroups, p: PathWord) -> bool:
    r = reduce_path(g, p)
    return not r.letters and g.vertex_group(r.start).is_identity(r.elems[0])


def equal(g: GraphOfGroups, p: PathWord, q: PathWord) -> bool:
    if p.start != q.start or p.end(g) != q.end(g):
        return False
    return is_trivial(g, concat(g, p, inverse(g, q)))


def multiply(g: GraphOfGroups, *paths: PathWord) -> PathWord:
    return normal_form(g, concat(g, *paths))


def conjugate_by(g: GraphOfGroups, p: PathWord, z: PathWord) -> PathWord:
    """``z p z^-1`` in normal form."""
    return normal_form(g, concat(g, z, p, inverse(g, z)))


def cyclic_reduce(g: GraphOfGroups, p: PathWord) -> tuple[PathWord, PathWord]:
    """Return ``(c, core)`` with ``c core c^-1 == p`` and ``core`` cyclically reduced.

    ``core`` is a loop at some vertex ``v`` and ``c`` a path from ``p.start``
    to ``v``.  A core with letters has trivial last element and no pinch across
    the wrap-around; a core without letters is a single vertex element.
    """
    if p.start != p.end(g):
        raise GogError("cyclic reduction needs a loop")
    cur = reduce_path(g, p)
    conj = g.path_from_letters(p.start, ())
    while cur.letters:
        v = cur.start
        grp = g.vertex_group(v)
        last = cur.elems[-1]
        if not grp.is_identity(last):
            # rotate the trailing element to the front: cur = last^-1 (last cur_0 ...) last
            rot = PathWord(v, (grp.mul(last, cur.elems[0]),) + cur.elems[1:-1] + (grp.identity(),), cur.letters)
            conj = concat(g, conj, g.vertex_element(v, grp.inv(last)))
            cur = rot
        first, lastl = cur.letters[0], cur.letters[-1]
        if len(cur.letters) >= 2 and lastl == (first[0], -first[1]):
            h = cur.elems[0]
            att = g.terminal_attach(lastl)
            if att is None:
                k = 0 if grp.is_identity(h) else None
            else:
                k = grp.power_exponent(h, att)
            if k is not None:
                # conjugate by (h l1): new loop g1 l2 ... l_{n-1} (g_{n-1} h')
                step = PathWord(v, (h, g.vertex_group(g.terminal(first)).identity()), (first,))
                conj = concat(g, conj, step)
                w = g.terminal(first)
                wgrp = g.vertex_group(w)
                hp = wgrp.identity() if k == 0 else wgrp.power(g.initial_attach(lastl), k)
                # l_n h l_1 = l_n att^k l_n^-1 pinches to (initial attach of l_n)^k at w
                inner = PathWord(w, cur.elems[1:-1], cur.letters[1:-1])
                inner = PathWord(w, inner.elems[:-1] + (wgrp.mul(inner.elems[-1], hp),), inner.letters)
                cur = reduce_path(g, inner)
                continue
        break
    return reduce_path(g, conj), cur


def nf_length(g: GraphOfGroups, p: PathWord) -> int:
    """Sum of vertex-element lengths plus the number of non-tree letters."""
    vs = p.vertices(g)
    total = sum(g.vertex_group(v).length(x) for v, x in zip(vs, p.elems))
    return total + sum(1 for l in p.letters if not g.edges[l[0]].tree)


def path_key(g: GraphOfGroups, p: PathWord):
    vs = p.vertices(g)
    return (
        nf_length(g, p),
        p.start,
        p.letters,
        tuple(g.vertex_group(v).key(x) for v, x in zip(vs, p.elems)),
    )


def format_path(g: GraphOfGroups, p: PathWord) -> str:
    vs = p.vertices(g)
    parts = []
    for i, (v, x) in enumerate(zip(vs, p.elems)):
        grp = g.vertex_group(v)
        if not grp.is_identity(x):
            parts.append(f"{g.vertices[v].name}:{grp.format(x)}")
        if i < len(p.letters):
            l = p.letters[i]
            name = g.edges[l[0]].name
            parts.append(name if l[1] > 0 else f"{name}^-1")
    return " ".join(parts) if parts else f"1@{g.vertices[p.start].name}"


@dataclass
class Diagnostics:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(g: GraphOfGroups) -> Diagnostics:
    d = Diagnostics()
    nv = len(g.vertices)
    if nv == 0:
        d.errors.append(f"{g.name}: no vertices")
        return d
    if not 0 <= g.base < nv:
        d.errors.append(f"{g.name}: base vertex out of range")
    names = [v.name for v in g.vertices]
    if len(set(names)) != len(names):
        d.errors.append(f"{g.name}: duplicate vertex names")
    enames = [e.name for e in g.edges]
    if len(set(enames)) != len(enames):
        d.errors.append(f"{g.name}: duplicate edge names")
    for e in g.edges:
        if not (0 <= e.src < nv and 0 <= e.dst < nv):
            d.errors.append(f"edge {e.name}: endpoint out of range")
            continue
        if (e.src_attach is None) != (e.dst_attach is None):
            d.errors.append(f"edge {e.name}: only one end has an attaching element")
            continue
        if e.src_attach is None:
            d.warnings.append(f"edge {e.name}: trivial edge group")
            continue
        for end, v, a in (("source", e.src, e.src_attach), ("target", e.dst, e.dst_attach)):
            grp = g.vertex_group(v)
            if not grp.is_element(a):
                d.errors.append(f"edge {e.name}: {end} attaching element is not in {g.vertices[v].name}")
            elif grp.is_identity(a):
                d.errors.append(f"edge {e.name}: trivial attaching element at {g.vertices[v].name}")
    # connectivity and spanning tree
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree_count = 0
    for e in g.edges:
        if not (0 <= e.src < nv and 0 <= e.dst < nv):
            continue
        if e.tree:
            tree_count += 1
            a, b = find(e.src), find(e.dst)
            if a == b:
                d.errors.append(f"edge {e.name}: tree edges contain a cycle")
            parent[a] = b
    if len({find(v) for v in range(nv)}) > 1:
        full = list(range(nv))

        def f2(x):
            while full[x] != x:
                x = full[x]
            return x

        for e in g.edges:
            if 0 <= e.src < nv and 0 <= e.dst < nv:
                full[f2(e.src)] = f2(e.dst)
        if len({f2(v) for v in range(nv)}) > 1:
            d.errors.append(f"{g.name}: underlying graph is disconnected")
        else:
            d.errors.append(f"{g.name}: tree edges do not span the graph")
    # generator name clashes in the presentation
    seen: dict[str, str] = {}
    for v in g.vertices:
        try:
            gens = v.group.generators()
        except (ValueError, NotImplementedError):
            continue
        for n in gens:
            if n in seen:
                d.errors.append(f"generator {n!r} appears in {seen[n]} and {v.name}")
            seen[n] = v.name
    for e in g.edges:
        if not e.tree:
            if e.name in seen:
                d.errors.append(f"stable letter {e.name!r} clashes with a generator of {seen[e.name]}")
            seen[e.name] = f"edge {e.name}"
    if not g.acylindrical_assumed:
        d.warnings.append(f"{g.name}: acylindricity not asserted")
    return d


def require_valid(g: GraphOfGroups) -> GraphOfGroups:
    d = validate(g)
    if not d.ok:
        raise GogError("; ".join(d.errors))
    return g
