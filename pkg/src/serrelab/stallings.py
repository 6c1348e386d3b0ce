"""Stallings subgroup graphs for finitely generated subgroups of free groups."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .words import Alphabet, Word, AlphabetMismatch, invert, product


@dataclass(frozen=True)
class SubgroupGraph:
    """A folded core graph.

    ``table[v][l]`` is the endpoint of the edge leaving ``v`` with letter
    ``l`` (letter coding as in :mod:`serrelab.words`), or ``-1``.  Vertices
    are numbered in BFS order from the base, which is always vertex 0, so two
    graphs of the same subgroup compare equal.
    """

    alphabet: Alphabet
    table: tuple[tuple[int, ...], ...]

    base: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.table)

    @property
    def n_edges(self) -> int:
        return sum(1 for row in self.table for l in range(0, len(row), 2) if row[l] >= 0)

    def edges(self) -> list[tuple[int, int, int]]:
        """Positive edges ``(src, generator index, dst)``."""
        return [
            (v, l // 2, row[l])
            for v, row in enumerate(self.table)
            for l in range(0, len(row), 2)
            if row[l] >= 0
        ]

    def read(self, letters: Sequence[int], start: int = 0) -> int:
        v = start
        for l in letters:
            v = self.table[v][l]
            if v < 0:
                return -1
        return v

    def path_to(self) -> list[tuple[int, ...]]:
        """Shortest (then letter-least) letter path from the base to every vertex."""
        paths: list[Optional[tuple[int, ...]]] = [None] * self.n_vertices
        paths[self.base] = ()
        q = deque([self.base])
        while q:
            v = q.popleft()
            for l, t in enumerate(self.table[v]):
                if t >= 0 and paths[t] is None:
                    paths[t] = paths[v] + (l,)
                    q.append(t)
        return paths  # type: ignore[return-value]


class _Folder:
    def __init__(self, n_letters: int):
        self.parent: list[int] = []
        self.adj: list[dict[int, int]] = []
        self.queue: list[tuple[int, int]] = []

    def new(self) -> int:
        self.parent.append(len(self.parent))
        self.adj.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def _half(self, v: int, l: int, w: int) -> None:
        t = self.adj[v].get(l)
        if t is None:
            self.adj[v][l] = w
        elif self.find(t) != w:
            self.queue.append((self.find(t), w))

    def add(self, v: int, l: int, w: int) -> None:
        v, w = self.find(v), self.find(w)
        self._half(v, l, w)
        self._half(w, l ^ 1, v)
        self.drain()

    def drain(self) -> None:
        while self.queue:
            a, b = self.queue.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if len(self.adj[a]) < len(self.adj[b]):
                a, b = b, a
            self.parent[b] = a
            moved, self.adj[b] = self.adj[b], {}
            for l, t in moved.items():
                self._half(a, l, self.find(t))


def fold(generators: Sequence[Word], alphabet: Optional[Alphabet] = None) -> SubgroupGraph:
    """Folded core graph of the subgroup generated by ``generators``."""
    if alphabet is None:
        if not generators:
            raise ValueError("fold of an empty list needs an alphabet")
        alphabet = generators[0].alphabet
    for g in generators:
        if g.alphabet != alphabet:
            raise AlphabetMismatch(f"{g.alphabet.name} vs {alphabet.name}")
    n_letters = 2 * len(alphabet)
    f = _Folder(n_letters)
    base = f.new()
    for g in generators:
        letters = g.letters()
        if not letters:
            continue
        v = base
        for i, l in enumerate(letters):
            w = base if i == len(letters) - 1 else f.new()
            f.add(v, l, w)
            v = w

    # clean adjacency on representatives
    reps = sorted({f.find(v) for v in range(len(f.parent))})
    adj = {r: {l: f.find(t) for l, t in f.adj[r].items()} for r in reps}
    root = f.find(base)

    # prune to the core (hairs hanging off non-base vertices)
    stack = [v for v in adj if v != root and len(adj[v]) <= 1]
    while stack:
        v = stack.pop()
        if v not in adj or v == root or len(adj[v]) > 1:
            continue
        for l, t in adj.pop(v).items():
            if t in adj:
                adj[t].pop(l ^ 1, None)
                if t != root and len(adj[t]) <= 1:
                    stack.append(t)

    order = {root: 0}
    q = deque([root])
    while q:
        v = q.popleft()
        for l in sorted(adj[v]):
            t = adj[v][l]
            if t not in order:
                order[t] = len(order)
                q.append(t)
    table = [[-1] * n_letters for _ in order]
    for v, i in order.items():
        for l, t in adj[v].items():
            table[i][l] = order[t]
    return SubgroupGraph(alphabet, tuple(tuple(r) for r in table))


def contains(g: SubgroupGraph, w: Word) -> bool:
    if w.alphabet != g.alphabet:
        raise AlphabetMismatch(f"{w.alphabet.name} vs {g.alphabet.name}")
    return g.read(w.letters()) == g.base


def rank_and_index(g: SubgroupGraph) -> tuple[int, float]:
    """``(rank, index)``; the index is ``math.inf`` unless the core is a finite cover."""
    rank = g.n_edges - g.n_vertices + 1
    full = all(t >= 0 for row in g.table for t in row)
    index = g.n_vertices if full and len(g.alphabet) > 0 else math.inf
    return rank, index


def basis(g: SubgroupGraph) -> list[Word]:
    """Free basis read off a BFS spanning tree."""
    paths = g.path_to()
    tree = set()
    for v, p in enumerate(paths):
        if p:
            u = g.read(p[:-1])
            tree.add((u, p[-1]))
            tree.add((v, p[-1] ^ 1))
    out = []
    for v, s, t in g.edges():
        if (v, 2 * s) in tree:
            continue
        letters = paths[v] + (2 * s,) + tuple(l ^ 1 for l in reversed(paths[t]))
        out.append(g.alphabet.from_letters(letters))
    return out


class MalnormalityResult(NamedTuple):
    malnormal: bool
    witness: Optional[Word] = None
    conjugator: Optional[Word] = None

    def verify(self, g: SubgroupGraph) -> bool:
        """For a negative result: witness, conjugate of witness in H, conjugator outside H."""
        if self.malnormal:
            return True
        w, x = self.witness, self.conjugator
        return (
            w is not None
            and x is not None
            and not w.is_identity()
            and contains(g, w)
            and contains(g, product([x, w, invert(x)]))
            and not contains(g, x)
        )


def is_malnormal(g: SubgroupGraph) -> MalnormalityResult:
    """Decide malnormality through the fiber product of the core with itself.

    ``H`` is malnormal iff every component of the pullback apart from the
    one containing ``(base, base)`` is a tree.  A cycle ``omega`` at ``(p, q)``
    off that component gives ``alpha omega alpha^-1`` in ``H`` together with
    ``x = beta alpha^-1`` conjugating it back into ``H``.
    """
    n = g.n_vertices
    n_letters = 2 * len(g.alphabet)
    if g.n_edges == 0:
        return MalnormalityResult(True)
    seen: dict[tuple[int, int], tuple[tuple[int, int], int]] = {}
    paths = g.path_to()
    diag = None
    for start in [(g.base, g.base)] + [(p, q) for p in range(n) for q in range(n)]:
        if start in seen:
            continue
        seen[start] = (start, -1)
        parent_edge: dict[tuple[int, int], tuple[tuple[int, int], int]] = {start: (start, -1)}
        q = deque([start])
        members = [start]
        while q:
            v = q.popleft()
            for l in range(n_letters):
                a, b = g.table[v[0]][l], g.table[v[1]][l]
                if a < 0 or b < 0:
                    continue
                t = (a, b)
                if t not in parent_edge:
                    parent_edge[t] = (v, l)
                    seen[t] = (start, l)
                    members.append(t)
                    q.append(t)
        cycle = None
        for v in members:
            for l in range(0, n_letters, 2):
                a, b = g.table[v[0]][l], g.table[v[1]][l]
                if a < 0 or b < 0:
                    continue
                t = (a, b)
                if parent_edge[t] == (v, l) or parent_edge[v] == (t, l ^ 1):
                    continue
                cycle = (v, l, t)
                break
            if cycle:
                break
        if diag is None:
            diag = start
            continue
        if cycle is None:
            continue
        v, l, t = cycle

        def tree_path(x):
            out = []
            while x != start:
                px, lx = parent_edge[x]
                out.append(lx)
                x = px
            return out[::-1]

        omega = tree_path(v) + [l] + [m ^ 1 for m in reversed(tree_path(t))]
        alpha = paths[start[0]]
        beta = paths[start[1]]
        A = g.alphabet
        aw = A.from_letters(alpha)
        bw = A.from_letters(beta)
        ow = A.from_letters(omega)
        if ow.is_identity():
            continue
        res = MalnormalityResult(False, product([aw, ow, invert(aw)]), product([bw, invert(aw)]))
        return res
    return MalnormalityResult(True)


def to_dot(g: SubgroupGraph) -> str:
    lines = ["digraph core {", f"  {g.base} [shape=doublecircle];"]
    for v, s, t in g.edges():
        lines.append(f'  {v} -> {t} [label="{g.alphabet.generators[s]}"];')
    lines.append("}")
    return "\n".join(lines)
