"""Hypothesis strategies shared across the suite."""

from hypothesis import strategies as st

from serrelab.words import Alphabet, Word

F2 = Alphabet("F2", ("a", "b"))
F3 = Alphabet("F3", ("a", "b", "c"))


def letters(n_gens: int, max_size: int = 12):
    return st.lists(st.integers(0, 2 * n_gens - 1), max_size=max_size)


def words(alphabet: Alphabet = F2, max_size: int = 12):
    return letters(len(alphabet), max_size).map(alphabet.from_letters)


def rle_words(alphabet: Alphabet = F2, max_syllables: int = 6, max_exp: int = 10**6):
    syl = st.tuples(st.integers(0, len(alphabet) - 1), st.integers(-max_exp, max_exp))
    return st.lists(syl, max_size=max_syllables).map(lambda s: Word(alphabet, s))
