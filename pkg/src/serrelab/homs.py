"""Homomorphisms between finitely generated free groups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .stallings import fold, rank_and_index
from .words import Alphabet, AlphabetMismatch, Word, commutator, invert, product


@dataclass(frozen=True)
class FreeHom:
    domain: Alphabet
    codomain: Alphabet
    images: tuple[Word, ...]

    def __post_init__(self):
        imgs = tuple(self.images)
        object.__setattr__(self, "images", imgs)
        if len(imgs) != len(self.domain):
            raise ValueError(
                f"hom needs {len(self.domain)} images, got {len(imgs)}"
            )
        for w in imgs:
            if w.alphabet != self.codomain:
                raise AlphabetMismatch(f"image over {w.alphabet.name}, expected {self.codomain.name}")

    @classmethod
    def from_mapping(cls, domain: Alphabet, codomain: Alphabet, images: Mapping[str, Word]) -> "FreeHom":
        missing = [g for g in domain.generators if g not in images]
        if missing:
            raise ValueError(f"no image for {', '.join(missing)}")
        return cls(domain, codomain, tuple(images[g] for g in domain.generators))

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def image_of(self, gen: str) -> Word:
        return self.images[self.domain.index(gen)]


@dataclass(frozen=True)
class HomAnalysis:
    image_rank: int
    index: float
    surjective: bool
    injective: bool


def apply(h: FreeHom, w: Word) -> Word:
    if w.alphabet != h.domain:
        raise AlphabetMismatch(f"{w.alphabet.name} vs {h.domain.name}")
    if not w.syllables:
        return h.codomain.identity()
    parts = []
    for g, e in w.syllables:
        img = h.images[g]
        parts.append(img ** e)
    return product(parts)


def compose(outer: FreeHom, inner: FreeHom) -> FreeHom:
    """``outer . inner`` (apply ``inner`` first)."""
    if inner.codomain != outer.domain:
        raise AlphabetMismatch(f"{inner.codomain.name} vs {outer.domain.name}")
    return FreeHom(inner.domain, outer.codomain, tuple(apply(outer, w) for w in inner.images))


def identity(alphabet: Alphabet) -> FreeHom:
    return FreeHom(alphabet, alphabet, alphabet.gens())


def analyze(h: FreeHom) -> HomAnalysis:
    """Image rank and index by folding; injectivity by the Hopfian rank test."""
    g = fold(list(h.images), h.codomain)
    rank, index = rank_and_index(g)
    return HomAnalysis(
        image_rank=rank,
        index=index,
        surjective=index == 1,
        injective=rank == len(h.domain),
    )


def non_abelian_image(images: Sequence[Word]) -> bool:
    """True iff some pair of the given words does not commute."""
    ws = [w for w in images if not w.is_identity()]
    for i in range(len(ws)):
        for j in range(i + 1, len(ws)):
            if not commutator(ws[i], ws[j]).is_identity():
                return True
    return False


def random_endomorphism(alphabet: Alphabet, rng, max_length: int = 3, surjective: bool = False) -> FreeHom:
    """Random endomorphism; with ``surjective`` a random product of Nielsen moves."""
    from .words import random_word

    if not surjective:
        imgs = []
        for _ in alphabet.generators:
            imgs.append(random_word(alphabet, rng.randint(1, max_length), rng))
        return FreeHom(alphabet, alphabet, tuple(imgs))
    imgs = list(alphabet.gens())
    n = len(imgs)
    for _ in range(rng.randint(0, max_length)):
        i = rng.randrange(n)
        move = rng.randrange(3)
        if move == 0 and n > 1:
            j = rng.choice([k for k in range(n) if k != i])
            imgs[i] = imgs[i] * (imgs[j] if rng.random() < 0.5 else invert(imgs[j]))
        elif move == 1:
            imgs[i] = invert(imgs[i])
        elif n > 1:
            j = rng.randrange(n)
            imgs[i], imgs[j] = imgs[j], imgs[i]
    return FreeHom(alphabet, alphabet, tuple(imgs))


__all__ = [
    "FreeHom",
    "HomAnalysis",
    "apply",
    "compose",
    "identity",
    "analyze",
    "non_abelian_image",
    "random_endomorphism",
]
