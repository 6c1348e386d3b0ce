"""Freely reduced words over finite alphabets.

Words are stored run-length encoded as ``(generator index, exponent)``
syllables so that large exponents (for example ``t -> w^N`` retractions)
stay cheap.  Letters, where a flat view is needed, are integers
``2*i`` for the generator ``i`` and ``2*i + 1`` for its inverse, which
gives the fixed order ``a < a^-1 < b < b^-1 < ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    name: str
    generators: tuple[str, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if any(not g for g in gens):
            raise ValueError(f"alphabet {self.name!r}: empty generator name")
        if len(set(gens)) != len(gens):
            raise ValueError(f"alphabet {self.name!r}: duplicate generator names")

    def __len__(self) -> int:
        return len(self.generators)

    def index(self, gen: str) -> int:
        try:
            return self.generators.index(gen)
        except ValueError:
            raise KeyError(f"{gen!r} is not a generator of {self.name}") from None

    def gen(self, name: str, exponent: int = 1) -> "Word":
        return Word(self, ((self.index(name), exponent),))

    def gens(self) -> tuple["Word", ...]:
        return tuple(Word(self, ((i, 1),)) for i in range(len(self.generators)))

    def identity(self) -> "Word":
        return Word(self, ())

    def word(self, *pairs) -> "Word":
        """Build a word from ``(name, exponent)`` pairs or bare names."""
        syl = []
        for p in pairs:
            if isinstance(p, str):
                syl.append((self.index(p), 1))
            else:
                syl.append((self.index(p[0]), p[1]))
        return Word(self, tuple(syl))

    def from_letters(self, letters: Iterable[int]) -> "Word":
        return Word(self, _letters_to_syllables(letters))


def _reduce_syllables(syllables: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in syllables:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


def _letters_to_syllables(letters: Iterable[int]) -> tuple[tuple[int, int], ...]:
    return _reduce_syllables((l >> 1, -1 if l & 1 else 1) for l in letters)


class Word:
    """An element of the free group on ``alphabet``, always freely reduced."""

    __slots__ = ("alphabet", "syllables", "_hash")

    def __init__(self, alphabet: Alphabet, syllables: Iterable[tuple[int, int]] = ()):
        syl = _reduce_syllables(syllables)
        n = len(alphabet.generators)
        for g, _ in syl:
            if not 0 <= g < n:
                raise ValueError(f"generator index {g} out of range for {alphabet.name}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "syllables", syl)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def _trusted(cls, alphabet: Alphabet, syllables: tuple[tuple[int, int], ...]) -> "Word":
        # Skips reduction and range checks; callers pass reduced syllables.
        w = object.__new__(cls)
        object.__setattr__(w, "alphabet", alphabet)
        object.__setattr__(w, "syllables", syllables)
        object.__setattr__(w, "_hash", None)
        return w

    def __reduce__(self):
        return (Word, (self.alphabet, self.syllables))

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.syllables == other.syllables and self.alphabet == other.alphabet

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.alphabet.generators, self.syllables))
            object.__setattr__(self, "_hash", h)
        return h

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __repr__(self) -> str:
        return f"Word({self.alphabet.name}: {self})"

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        gens = self.alphabet.generators
        return " ".join(gens[g] if e == 1 else f"{gens[g]}^{e}" for g, e in self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        return power(self, n)

    def is_identity(self) -> bool:
        return not self.syllables

    def letters(self) -> tuple[int, ...]:
        return _flat(self.syllables)

    def key(self) -> tuple:
        """Shortlex sort key."""
        return (len(self), self.letters())


@lru_cache(maxsize=65536)
def _flat(syllables: tuple[tuple[int, int], ...]) -> tuple[int, ...]:
    out: list[int] = []
    for g, e in syllables:
        out.extend([2 * g + (e < 0)] * abs(e))
    return tuple(out)


def _check(a: Word, b: Word) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"{a.alphabet.name} vs {b.alphabet.name}")


def multiply(a: Word, b: Word) -> Word:
    _check(a, b)
    if not a.syllables:
        return b
    if not b.syllables:
        return a
    sa, sb = a.syllables, b.syllables
    i = 0
    n = min(len(sa), len(sb))
    while i < n and sa[-1 - i][0] == sb[i][0] and sa[-1 - i][1] == -sb[i][1]:
        i += 1
    head, tail = sa[: len(sa) - i], sb[i:]
    if head and tail and head[-1][0] == tail[0][0]:
        g, e = head[-1][0], head[-1][1] + tail[0][1]
        return Word._trusted(a.alphabet, head[:-1] + ((g, e),) + tail[1:])
    return Word._trusted(a.alphabet, head + tail)


def product(words: Sequence[Word], alphabet: Optional[Alphabet] = None) -> Word:
    if not words:
        if alphabet is None:
            raise ValueError("empty product needs an alphabet")
        return alphabet.identity()
    syl: list[tuple[int, int]] = []
    for w in words:
        _check(words[0], w)
        syl.extend(w.syllables)
    return Word(words[0].alphabet, syl)


def invert(a: Word) -> Word:
    return Word._trusted(a.alphabet, tuple((g, -e) for g, e in reversed(a.syllables)))


def power(a: Word, n: int) -> Word:
    if n == 0 or not a.syllables:
        return a.alphabet.identity()
    if n < 0:
        return power(invert(a), -n)
    if len(a.syllables) == 1:
        g, e = a.syllables[0]
        return Word(a.alphabet, ((g, e * n),))
    c, core = _cyclic_split(a.syllables)
    if len(core) == 1:
        g, e = core[0]
        mid: tuple = ((g, e * n),)
    else:
        mid = core * n
    return Word(a.alphabet, c + mid + tuple((g, -e) for g, e in reversed(c)))


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a b a^-1 b^-1``."""
    return product([a, b, invert(a), invert(b)])


def conjugate(a: Word, by: Word) -> Word:
    """``by * a * by^-1``."""
    return product([by, a, invert(by)])


def _cyclic_split(syl: tuple[tuple[int, int], ...]):
    """Split reduced syllables as ``c . core . c^-1`` with ``core`` cyclically reduced."""
    if not syl:
        return (), ()
    s = [list(x) for x in syl]
    conj: list[tuple[int, int]] = []
    i, j = 0, len(s) - 1
    while i < j and s[i][0] == s[j][0]:
        p, q = s[i][1], s[j][1]
        if (p > 0) == (q > 0):
            break
        m = min(abs(p), abs(q))
        step = m if p > 0 else -m
        conj.append((s[i][0], step))
        s[i][1] -= step
        s[j][1] += step
        if s[i][1] == 0:
            i += 1
        if s[j][1] == 0:
            j -= 1
    core = tuple((g, e) for g, e in s[i : j + 1] if e != 0)
    return _reduce_syllables(conj), core


@lru_cache(maxsize=65536)
def cyclic_reduction(a: Word) -> tuple[Word, Word]:
    """Return ``(c, core)`` with ``a = c core c^-1`` and ``core`` cyclically reduced."""
    c, core = _cyclic_split(a.syllables)
    return Word(a.alphabet, c), Word(a.alphabet, core)


def cyclic_length(a: Word) -> int:
    return len(cyclic_reduction(a)[1])


def least_rotation(s: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    n = len(s)
    if n == 0:
        return 0
    ss = list(s) + list(s)
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = ss[j]
        i = f[j - k - 1]
        while i != -1 and sj != ss[k + i + 1]:
            if sj < ss[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != ss[k + i + 1]:
            if sj < ss[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


@dataclass(frozen=True)
class CyclicWord:
    alphabet: Alphabet
    letters: tuple[int, ...]

    def word(self) -> Word:
        return self.alphabet.from_letters(self.letters)

    def __len__(self) -> int:
        return len(self.letters)


class ConjugacyCertificate(NamedTuple):
    """``conjugator * right^sign * conjugator^-1 == left``."""

    conjugator: Word
    sign: int

    def verify(self, left: Word, right: Word) -> bool:
        r = right if self.sign == 1 else invert(right)
        return conjugate(r, self.conjugator) == left


@lru_cache(maxsize=65536)
def _canonical(alphabet: Alphabet, syllables: tuple) -> tuple[CyclicWord, Word]:
    c, core = _cyclic_split(syllables)
    letters = _flat(core)
    k = least_rotation(letters)
    canon = letters[k:] + letters[:k]
    conj = Word(alphabet, c + _letters_to_syllables(letters[:k]))
    return CyclicWord(alphabet, canon), conj


def cyclic_canonical(a: Word) -> tuple[CyclicWord, Word]:
    """Canonical conjugacy representative and ``conj`` with ``conj * canon * conj^-1 == a``."""
    return _canonical(a.alphabet, a.syllables)


@lru_cache(maxsize=65536)
def primitive_root(a: Word) -> tuple[Word, int]:
    """Return ``(root, k)`` with ``root^k == a`` and ``k`` maximal (``k == 0`` iff ``a == 1``)."""
    if not a.syllables:
        return a, 0
    c, core = _cyclic_split(a.syllables)
    letters = _flat(core)
    n = len(letters)
    period = _smallest_period(letters)
    k = n // period
    root_core = _letters_to_syllables(letters[:period])
    inv_c = tuple((g, -e) for g, e in reversed(c))
    return Word(a.alphabet, c + root_core + inv_c), k


def _smallest_period(s: Sequence[int]) -> int:
    # prefix function; the word is a proper power iff n is a multiple of n - pi[-1]
    n = len(s)
    pi = [0] * n
    for i in range(1, n):
        j = pi[i - 1]
        while j and s[i] != s[j]:
            j = pi[j - 1]
        if s[i] == s[j]:
            j += 1
        pi[i] = j
    p = n - pi[-1]
    return p if n % p == 0 else n


def is_indivisible(a: Word) -> bool:
    return primitive_root(a)[1] == 1


def _best_conjugator(c_left: Word, c_right: Word, canon: CyclicWord) -> Word:
    # conjugators are c_left * root^j * c_right^-1; pick the shortlex-least
    root = primitive_root(canon.word())[0]
    base = multiply(c_left, invert(c_right))
    rl = max(len(root), 1)
    bound = (len(c_left) + len(c_right)) // rl + 2
    best = None
    for j in range(-bound, bound + 1):
        cand = product([c_left, power(root, j), invert(c_right)])
        if best is None or cand.key() < best.key():
            best = cand
    return best if best is not None else base


def are_conjugate(a: Word, b: Word, allow_inverse: bool = False) -> Optional[ConjugacyCertificate]:
    """Decide whether ``a`` is conjugate to ``b`` (or ``b^-1`` if ``allow_inverse``)."""
    _check(a, b)
    ka, ca = cyclic_canonical(a)
    for sign in ((1, -1) if allow_inverse else (1,)):
        bb = b if sign == 1 else invert(b)
        kb, cb = cyclic_canonical(bb)
        if ka.letters == kb.letters:
            return ConjugacyCertificate(_best_conjugator(ca, cb, ka), sign)
    return None


def exponent_vector(a: Word) -> tuple[int, ...]:
    v = [0] * len(a.alphabet.generators)
    for g, e in a.syllables:
        v[g] += e
    return tuple(v)


def in_commutator_subgroup(a: Word) -> bool:
    return not any(exponent_vector(a))


def verify_genus_expression(h: Word, pairs: Sequence[tuple[Word, Word]]) -> bool:
    """True iff ``h`` equals the product of the commutators ``[x_i, y_i]``."""
    prod = h.alphabet.identity()
    for x, y in pairs:
        prod = multiply(prod, commutator(x, y))
    return prod == h


def rename(a: Word, target: Alphabet, mapping: Optional[dict[str, str]] = None) -> Word:
    """Transport ``a`` to ``target`` by generator name (optionally through ``mapping``)."""
    src = a.alphabet.generators
    idx = {}
    for g, _ in a.syllables:
        if g not in idx:
            name = src[g] if mapping is None else mapping.get(src[g], src[g])
            idx[g] = target.index(name)
    return Word(target, tuple((idx[g], e) for g, e in a.syllables))


def reduced_words(alphabet: Alphabet, max_length: int) -> list[Word]:
    """All reduced words of length ``<= max_length`` in shortlex order."""
    n = 2 * len(alphabet.generators)
    out = [()]
    layer = [()]
    for _ in range(max_length):
        nxt = []
        for w in layer:
            for l in range(n):
                if w and (w[-1] ^ 1) == l:
                    continue
                nxt.append(w + (l,))
        out.extend(nxt)
        layer = nxt
    return [alphabet.from_letters(w) for w in out]


def random_word(alphabet: Alphabet, length: int, rng) -> Word:
    """Random reduced word of exactly ``length`` letters."""
    n = 2 * len(alphabet.generators)
    letters: list[int] = []
    while len(letters) < length:
        l = rng.randrange(n)
        if letters and (letters[-1] ^ 1) == l:
            continue
        letters.append(l)
    return alphabet.from_letters(letters)
