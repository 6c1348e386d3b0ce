"""Brute-force reference implementations used to cross-check the engine.

Everything here works on plain tuples of letter codes (``2g`` for a
generator, ``2g+1`` for its inverse) with its own free reduction, so the
oracles share no code with the algorithms they check.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from typing import Iterable, Sequence


def reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c in letters:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def inv(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(c ^ 1 for c in reversed(w))


def mul(*ws: Sequence[int]) -> tuple[int, ...]:
    return reduce(itertools.chain.from_iterable(ws))


def ball(n_gens: int, radius: int) -> list[tuple[int, ...]]:
    """All reduced words of length at most ``radius``."""
    out = [()]
    layer = [()]
    for _ in range(radius):
        nxt = []
        for w in layer:
            for c in range(2 * n_gens):
                if w and w[-1] == c ^ 1:
                    continue
                nxt.append(w + (c,))
        out.extend(nxt)
        layer = nxt
    return out


def conjugator_bound(a: Sequence[int], b: Sequence[int]) -> int:
    """A conjugator of minimal length has length at most (|a| + |b|) / 2."""
    return (len(a) + len(b) + 1) // 2


def free_conjugate(a: Sequence[int], b: Sequence[int], n_gens: int) -> bool:
    """Is there ``z`` with ``z b z^-1 = a``?  Meet in the middle over the bound."""
    a, b = reduce(a), reduce(b)
    L = conjugator_bound(a, b)
    h = (L + 1) // 2
    zs = ball(n_gens, h)
    right = {mul(z, b, inv(z)) for z in zs}
    return any(mul(inv(z), a, z) in right for z in zs)


def _half(u: tuple[int, ...]) -> tuple[int, ...]:
    return u[: (len(u) + 1) // 2]


def _nielsen_violation(U):
    """First replacement that shortens ``U`` or lowers its half-word order, or None."""
    sym = [(i, s) for i in range(len(U)) for s in (1, -1)]

    def val(i, s):
        return U[i] if s == 1 else inv(U[i])

    for i, si in sym:
        for j, sj in sym:
            if i == j:
                continue
            x, v = val(i, si), val(j, sj)
            xv = mul(x, v)
            if len(xv) < len(x):
                return i, xv if si == 1 else inv(xv)
    # N2: v cancels exactly half into each neighbour
    for j, sj in sym:
        v = val(j, sj)
        if len(v) % 2:
            continue
        h = len(v) // 2
        v1, v2 = v[:h], v[h:]
        for i, si in sym:
            if i == j:
                continue
            x = val(i, si)
            if x[len(x) - h :] != inv(v1):
                continue
            for k, sk in sym:
                if k == j:
                    continue
                y = val(k, sk)
                if y[:h] != inv(v2):
                    continue
                if inv(v2) < v1:
                    xv = mul(x, v)
                    return i, xv if si == 1 else inv(xv)
                vy = mul(v, y)
                return k, vy if sk == 1 else inv(vy)
    return None


def nielsen_reduce(gens: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """A Nielsen-reduced generating set of the same subgroup.

    Moves strictly decrease total length or, at equal length, the sorted
    half-words of the generators and their inverses, so the loop terminates.
    """
    U = [reduce(g) for g in gens]
    while True:
        U = [u for u in U if u]
        seen, uniq = set(), []
        for u in U:
            if u not in seen and inv(u) not in seen:
                seen.add(u)
                uniq.append(u)
        U = uniq
        step = _nielsen_violation(U)
        if step is None:
            return U
        i, new = step
        U[i] = new


def subgroup_elements(gens: Sequence[Sequence[int]], radius: int) -> set[tuple[int, ...]]:
    """Every element of the subgroup of length at most ``radius``.

    After Nielsen reduction an element of length ``n`` is a product of at
    most ``n`` generators, and each partial product is a prefix of it
    followed by at most half a generator, which bounds the search.
    """
    U = nielsen_reduce(gens)
    if not U:
        return {()}
    sym = U + [inv(u) for u in U]
    n = len(U)
    cap = radius + max(len(u) for u in U)
    seen = {(): None}
    layer = {(): None}
    for _ in range(radius):
        nxt = {}
        for w, last in layer.items():
            for k, s in enumerate(sym):
                if last is not None and k == (last + n) % (2 * n):
                    continue
                p = mul(w, s)
                if len(p) > cap or p in seen:
                    continue
                seen[p] = k
                nxt[p] = k
        layer = nxt
    return {w for w in seen if len(w) <= radius}


def random_permutation_action(n_gens: int, degree: int, rng: random.Random) -> list[list[int]]:
    while True:
        perms = []
        for _ in range(n_gens):
            p = list(range(degree))
            rng.shuffle(p)
            perms.append(p)
        if _transitive(perms, degree):
            return perms


def _transitive(perms, degree) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for p in perms:
            for j in (p[i], p.index(i)):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == degree


def stabilizer_generators(perms: list[list[int]], degree: int) -> list[tuple[int, ...]]:
    """Schreier generators of the stabilizer of point 0 (index = degree)."""
    n = len(perms)
    invs = [[p.index(i) for i in range(degree)] for p in perms]

    def act(i, c):
        g, e = divmod(c, 2)
        return perms[g][i] if e == 0 else invs[g][i]

    rep: dict[int, tuple[int, ...]] = {0: ()}
    queue = [0]
    for i in queue:
        for c in range(2 * n):
            j = act(i, c)
            if j not in rep:
                rep[j] = rep[i] + (c,)
                queue.append(j)
    out = []
    for i in range(degree):
        for g in range(n):
            j = act(i, 2 * g)
            s = mul(rep[i], (2 * g,), inv(rep[j]))
            if s:
                out.append(s)
    return out


# -- graph of groups -------------------------------------------------------------


def elements_up_to(g, max_nf: int, word_length: int):
    """Distinct elements (canonical normal forms) of normal-form length <= ``max_nf``.

    Enumerates reduced words over the presentation generators, so every
    element whose normal form has at most ``word_length`` letters is found.
    """
    from serrelab.gog import from_word, nf_length, normal_form, path_key, pi1_presentation
    from serrelab.words import reduced_words

    A = pi1_presentation(g).alphabet
    out = {}
    for w in reduced_words(A, word_length):
        p = normal_form(g, from_word(g, w))
        if nf_length(g, p) <= max_nf:
            out.setdefault(path_key(g, p), p)
    return list(out.values())


def conjugate_keys(g, p, conjugators) -> set:
    from serrelab.gog import concat, inverse, normal_form, path_key

    return {path_key(g, normal_form(g, concat(g, z, p, inverse(g, z)))) for z in conjugators}


def gog_conjugacy_pairs(g, elements, conjugators) -> set[tuple[int, int]]:
    """Index pairs ``(i, j)``, ``i < j``, conjugate by some ``z1 z2`` with both halves in ``conjugators``."""
    by_key = defaultdict(set)
    for i, p in enumerate(elements):
        for k in conjugate_keys(g, p, conjugators):
            by_key[k].add(i)
    pairs = set()
    for members in by_key.values():
        ms = sorted(members)
        for x in range(len(ms)):
            for y in range(x + 1, len(ms)):
                pairs.add((ms[x], ms[y]))
    return pairs


def relation_lattice(rows: Sequence[Sequence[int]], n: int) -> list[tuple[int, list[int]]]:
    """Integer row echelon form of ``rows`` as ``(pivot column, row)`` pairs."""
    rows = [list(r) for r in rows if any(r)]
    basis = []
    col = 0
    while rows and col < n:
        live = [r for r in rows if r[col]]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            for r in live[1:]:
                q = r[col] // p[col]
                for k in range(n):
                    r[k] -= q * p[k]
            live = [p] + [r for r in live[1:] if r[col]]
        p = live[0]
        if p[col] < 0:
            p[:] = [-x for x in p]
        basis.append((col, p))
        rows = [r for r in rows if r is not p and any(r)]
        col += 1
    return basis


def abelian_class(vector: Sequence[int], lattice) -> tuple[int, ...]:
    """Canonical representative of ``vector`` modulo the lattice."""
    v = list(vector)
    for col, row in lattice:
        q = v[col] // row[col]
        for k in range(len(v)):
            v[k] -= q * row[k]
    return tuple(v)
