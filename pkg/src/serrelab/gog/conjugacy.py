"""Conjugacy decisions in fundamental groups of graphs of groups.

Elliptic elements are compared by exploring their orbit: the set of
(vertex, conjugacy class) states reachable by passing through edge groups.
Hyperbolic elements are compared through cyclic rotations of their
cyclically reduced forms, corrected by an element of one edge group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Optional

from .graph import (
    GogError,
    GraphOfGroups,
    PathWord,
    check_path,
    concat,
    cyclic_reduce,
    equal,
    inverse,
    is_trivial,
    nf_length,
    normal_form,
    path_power,
)

DEFAULT_ORBIT_CAP = 5000


@dataclass(frozen=True)
class Elliptic:
    vertex: int
    element: Any

    kind = "elliptic"


@dataclass(frozen=True)
class Hyperbolic:
    letters: tuple[tuple[int, int], ...]
    core: PathWord

    kind = "hyperbolic"


@dataclass
class GogConjugacyResult:
    conjugate: bool
    conjugator: Optional[PathWord]
    left: Any
    right: Any
    note: str = ""

    def verify(self, g: GraphOfGroups, p: PathWord, q: PathWord) -> bool:
        """Check ``Z q Z^-1 == p`` for the stored conjugator ``Z``."""
        if not self.conjugate:
            return True
        z = self.conjugator
        return z is not None and equal(g, concat(g, z, q, inverse(g, z)), p)


class OrbitCapExceeded(RuntimeError):
    pass


@dataclass
class _Core:
    conj: PathWord
    core: PathWord
    cls: Any


class ConjugacySolver:
    """Conjugacy queries on one graph, with per-solver caches."""

    def __init__(self, g: GraphOfGroups, orbit_cap: int = DEFAULT_ORBIT_CAP):
        self.g = g
        self.orbit_cap = orbit_cap
        self._cores: dict = {}
        self._orbits: dict = {}

    # -- classification -------------------------------------------------

    def core(self, p: PathWord) -> _Core:
        hit = self._cores.get(p)
        if hit is not None:
            return hit
        g = self.g
        c, core = cyclic_reduce(g, p)
        if core.letters:
            cls = Hyperbolic(core.letters, core)
        else:
            cls = Elliptic(core.start, core.elems[0])
        res = _Core(c, core, cls)
        self._cores[p] = res
        return res

    def classify(self, p: PathWord):
        return self.core(p).cls

    # -- elliptic orbits --------------------------------------------------

    def _state_key(self, v: int, x):
        k = self.g.vertex_group(v).class_key(x)
        return None if k is None else (v, k)

    def orbit(self, v: int, x) -> list[tuple[int, Any, PathWord]]:
        """All states ``(w, y, Y)`` with ``Y^-1 x Y == y``, ``Y`` a path from ``v`` to ``w``.

        One representative per (vertex, conjugacy class) pair.
        """
        g = self.g
        key0 = self._state_key(v, x)
        memo_key = (v, key0) if key0 is not None else None
        if memo_key is not None and memo_key in self._orbits:
            x0, states = self._orbits[memo_key]
            if x0 == x:
                return states
            # stored paths start from another representative of the class
            X = g.vertex_group(v).conjugate(x, x0)
            pre = g.vertex_element(v, X)
            return [(w, y, concat(g, pre, Y)) for w, y, Y in states]
        start = (v, x, g.path_from_letters(v, ()))
        states = [start]
        seen_keys = set()
        if key0 is not None:
            seen_keys.add(key0)
        q = deque([start])
        while q:
            w, y, Y = q.popleft()
            grp = g.vertex_group(w)
            if grp.is_identity(y):
                continue
            for i, e in enumerate(g.edges):
                for l in ((i, 1), (i, -1)):
                    if g.initial(l) != w:
                        continue
                    a = g.initial_attach(l)
                    if a is None:
                        continue
                    hit = grp.conj_to_power(y, a)
                    if hit is None:
                        continue
                    k, xw = hit
                    u = g.terminal(l)
                    ugrp = g.vertex_group(u)
                    y2 = ugrp.power(g.terminal_attach(l), k)
                    if not self._fresh(states, seen_keys, u, y2):
                        continue
                    Y2 = concat(g, Y, g.vertex_element(w, xw), g.path_from_letters(w, [l]))
                    st = (u, y2, Y2)
                    states.append(st)
                    q.append(st)
                    if len(states) > self.orbit_cap:
                        raise OrbitCapExceeded(f"orbit exceeded {self.orbit_cap} states")
        if memo_key is not None:
            self._orbits[memo_key] = (x, states)
        return states

    def _fresh(self, states, seen_keys, u, y2) -> bool:
        key = self._state_key(u, y2)
        if key is not None:
            if key in seen_keys:
                return False
            seen_keys.add(key)
            return True
        grp = self.g.vertex_group(u)
        for w, y, _ in states:
            if w == u and grp.conjugate(y, y2) is not None:
                return False
        return True

    def orbit_signature(self, p: PathWord) -> Optional[frozenset]:
        """Conjugacy invariant of an elliptic element (None if keys are unavailable)."""
        c = self.core(p)
        if not isinstance(c.cls, Elliptic):
            return None
        keys = []
        for w, y, _ in self.orbit(c.cls.vertex, c.cls.element):
            k = self._state_key(w, y)
            if k is None:
                return None
            keys.append(k)
        return frozenset(keys)

    # -- main decision ---------------------------------------------------

    def decide(self, p: PathWord, q: PathWord) -> GogConjugacyResult:
        """Is ``p`` conjugate to ``q``?  The certificate ``Z`` satisfies ``Z q Z^-1 = p``."""
        g = self.g
        cp, cq = self.core(p), self.core(q)
        if isinstance(cp.cls, Elliptic) != isinstance(cq.cls, Elliptic):
            return GogConjugacyResult(False, None, cp.cls, cq.cls, "elliptic vs hyperbolic")
        if isinstance(cp.cls, Elliptic):
            z = self._elliptic(cp, cq)
        else:
            z = self._hyperbolic(cp, cq)
        if z is None:
            return GogConjugacyResult(False, None, cp.cls, cq.cls)
        z = normal_form(g, z)
        return GogConjugacyResult(True, z, cp.cls, cq.cls)

    def _elliptic(self, cp: _Core, cq: _Core) -> Optional[PathWord]:
        g = self.g
        vp, xp = cp.cls.vertex, cp.cls.element
        vq, xq = cq.cls.vertex, cq.cls.element
        gp = g.vertex_group(vp)
        if gp.is_identity(xp) or g.vertex_group(vq).is_identity(xq):
            if gp.is_identity(xp) and g.vertex_group(vq).is_identity(xq):
                return concat(g, cp.conj, inverse(g, cq.conj))
            return None
        for w, y, Y in self.orbit(vq, xq):
            if w != vp:
                continue
            x0 = gp.conjugate(y, xp)
            if x0 is None:
                continue
            # y = Y^-1 core_q Y and x0^-1 y x0 = core_p
            inner = concat(g, Y, g.vertex_element(vp, x0))
            return concat(g, cp.conj, inverse(g, inner), inverse(g, cq.conj))
        return None

    def _rotations(self, core: PathWord):
        """Yield ``(j, R_j, P_j)`` with ``R_j == P_j^-1 core P_j``."""
        g = self.g
        n = len(core.letters)
        P = g.path_from_letters(core.start, ())
        for j in range(n):
            if j:
                step = PathWord(
                    g.initial(core.letters[j - 1]),
                    (core.elems[j - 1], g.vertex_group(g.terminal(core.letters[j - 1])).identity()),
                    (core.letters[j - 1],),
                )
                P = concat(g, P, step)
            elems = core.elems[j:-1] + core.elems[:j] + (g.vertex_group(g.terminal(core.letters[j - 1] if j else core.letters[-1])).identity(),)
            letters = core.letters[j:] + core.letters[:j]
            start = g.initial(letters[0])
            yield j, PathWord(start, elems, letters), P

    def _hyperbolic(self, cp: _Core, cq: _Core) -> Optional[PathWord]:
        g = self.g
        P0, Q0 = cp.core, cq.core
        n = len(P0.letters)
        if n != len(Q0.letters):
            return None
        total = nf_length(g, P0) + nf_length(g, Q0)
        qletters = Q0.letters
        for j, R, Pj in self._rotations(P0):
            if R.letters != qletters:
                continue
            v = R.start
            grp = g.vertex_group(v)
            att = g.terminal_attach(R.letters[-1])
            if att is None:
                cands = [grp.identity()]
            else:
                bound = total // max(grp.cyc_length(att), 1) + 2
                cands = [grp.power(att, m) for m in _zigzag(bound)]
            for c in cands:
                cpath = g.vertex_element(v, c)
                test = concat(g, cpath, R, inverse(g, cpath), inverse(g, Q0))
                if is_trivial(g, test):
                    # Q0 = c R c^-1 = c Pj^-1 P0 Pj c^-1, so Z = Pj c^-1 satisfies Z Q0 Z^-1 = P0
                    z = concat(g, Pj, g.vertex_element(v, grp.inv(c)))
                    return concat(g, cp.conj, z, inverse(g, cq.conj))
        return None

    def conj_to_power(self, h: PathWord, a: PathWord):
        """``(k, x)`` with ``x^-1 h x == a^k`` (loops at the base), or None."""
        g = self.g
        if is_trivial(g, h):
            return 0, g.identity()
        ch, ca = self.core(h), self.core(a)
        if isinstance(ca.cls, Hyperbolic):
            if not isinstance(ch.cls, Hyperbolic):
                return None
            n, L = len(ca.core.letters), len(ch.core.letters)
            if L % n:
                return None
            for k in (L // n, -(L // n)):
                res = self.decide(path_power(g, a, k), h)
                if res.conjugate:
                    # Z h Z^-1 = a^k, so x = Z^-1
                    return k, normal_form(g, inverse(g, res.conjugator))
            return None
        if not isinstance(ch.cls, Elliptic):
            return None
        va, xa = ca.cls.vertex, ca.cls.element
        ga = g.vertex_group(va)
        for w, y, Y in self.orbit(ch.cls.vertex, ch.cls.element):
            if w != va:
                continue
            hit = ga.conj_to_power(y, xa)
            if hit is None:
                continue
            k, x0 = hit
            x = concat(g, ch.conj, Y, g.vertex_element(va, x0), inverse(g, ca.conj))
            return k, normal_form(g, x)
        return None


def _zigzag(bound: int):
    yield 0
    for m in range(1, bound + 1):
        yield m
        yield -m


def classify(g: GraphOfGroups, p: PathWord):
    check_path(g, p)
    return ConjugacySolver(g).classify(p)


def are_conjugate_elements(
    g: GraphOfGroups, p: PathWord, q: PathWord, solver: Optional[ConjugacySolver] = None
) -> GogConjugacyResult:
    for x in (p, q):
        check_path(g, x)
        if x.start != g.base or x.end(g) != g.base:
            raise GogError("conjugacy inputs must be loops at the base vertex")
    s = solver if solver is not None else ConjugacySolver(g)
    return s.decide(p, q)
