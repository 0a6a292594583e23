"""Free-group words, group-ring arithmetic, and free differential calculus.

Generators of the free group on 2*genus letters are indexed 0..2g-1 in the
order x1, y1, x2, y2, ..., xg, yg.  A word is a freely reduced sequence of
(generator index, exponent sign) pairs; the empty word is the identity.

The derivative implemented here is the *left* free derivative, i.e. the one
with product rule  d(uv) = du + u * dv  and  d(z^-1) = -z^-1 for the matching
generator.  All downstream matrix assemblies that depend on the opposite
(right-module) convention build the required twist explicitly rather than
changing this rule; see evaluate.relator_differential.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping


Letter = tuple[int, int]


def reduce_letters(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    """Freely reduce a letter sequence (cancel adjacent z z^-1 pairs)."""
    out: list[Letter] = []
    for gen, sign in letters:
        if sign not in (1, -1):
            raise ValueError(f"exponent sign must be +-1, got {sign}")
        if out and out[-1][0] == gen and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((gen, sign))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the free group; immutable and hashable."""

    letters: tuple[Letter, ...] = ()

    @staticmethod
    def from_letters(letters: Iterable[Letter]) -> "Word":
        return Word(reduce_letters(letters))

    @staticmethod
    def generator(index: int, sign: int = 1) -> "Word":
        return Word(((index, sign),))

    @staticmethod
    def identity() -> "Word":
        return Word(())

    def __mul__(self, other: "Word") -> "Word":
        return Word(reduce_letters(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(tuple((g, -s) for (g, s) in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def max_generator(self) -> int:
        """Largest generator index used; -1 for the identity word."""
        return max((g for g, _ in self.letters), default=-1)

    def exponent_sum(self, index: int) -> int:
        return sum(s for (g, s) in self.letters if g == index)

    def __str__(self) -> str:
        return word_str(self)

    def __repr__(self) -> str:
        return f"Word({word_str(self)!r})"


def generator_name(index: int) -> str:
    pair, kind = divmod(index, 2)
    return f"{'x' if kind == 0 else 'y'}{pair + 1}"


def generator_index(name: str) -> int:
    m = re.fullmatch(r"([xy])(\d+)", name)
    if m is None:
        raise ValueError(f"bad generator name {name!r}")
    pair = int(m.group(2))
    if pair < 1:
        raise ValueError(f"generator subscript must be >= 1 in {name!r}")
    return 2 * (pair - 1) + (0 if m.group(1) == "x" else 1)


def word_str(w: Word) -> str:
    """Serialize as x1*y1*x1^-1 style; "1" is the identity."""
    if not w.letters:
        return "1"
    parts = []
    for gen, sign in w.letters:
        tok = generator_name(gen)
        parts.append(tok if sign == 1 else tok + "^-1")
    return "*".join(parts)


_TOKEN = re.compile(r"\s*([xy]\d+)\s*(\^\s*-\s*1)?\s*")


def parse_word(text: str) -> Word:
    """Parse the x1*y1^-1 token syntax; whitespace is ignored."""
    text = text.strip()
    if text in ("", "1"):
        return Word.identity()
    letters: list[Letter] = []
    for chunk in text.split("*"):
        m = _TOKEN.fullmatch(chunk)
        if m is None:
            raise ValueError(f"cannot parse word token {chunk!r}")
        letters.append((generator_index(m.group(1)), -1 if m.group(2) else 1))
    return Word.from_letters(letters)


class GroupRingElement:
    """Finite real combination of words, the coefficient ring of Fox calculus.

    Stored as a map word -> coefficient with zero coefficients absent, so
    equality of reduced forms is plain dict equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, float] | None = None):
        clean: dict[Word, float] = {}
        if terms:
            for w, c in terms.items():
                if c != 0.0:
                    clean[w] = clean.get(w, 0.0) + float(c)
                    if clean[w] == 0.0:
                        del clean[w]
        self.terms = clean

    @staticmethod
    def zero() -> "GroupRingElement":
        return GroupRingElement()

    @staticmethod
    def one() -> "GroupRingElement":
        return GroupRingElement({Word.identity(): 1.0})

    @staticmethod
    def of(word: Word, coeff: float = 1.0) -> "GroupRingElement":
        return GroupRingElement({word: coeff})

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0.0) + c
            if out[w] == 0.0:
                del out[w]
        return GroupRingElement(out)

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + other.scale(-1.0)

    def scale(self, s: float) -> "GroupRingElement":
        return GroupRingElement({w: s * c for w, c in self.terms.items()})

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        out: dict[Word, float] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 * w2
                out[w] = out.get(w, 0.0) + c1 * c2
        return GroupRingElement(out)

    def antipode(self) -> "GroupRingElement":
        """Linear extension of w -> w^-1."""
        return GroupRingElement({w.inverse(): c for w, c in self.terms.items()})

    def augmentation(self) -> float:
        return sum(self.terms.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "GroupRingElement(0)"
        bits = [f"{c:+g}*{word_str(w)}" for w, c in sorted(self.terms.items(), key=lambda t: word_str(t[0]))]
        return "GroupRingElement(" + " ".join(bits) + ")"


def fox_derivative(w: Word, index: int, num_generators: int | None = None) -> GroupRingElement:
    """Left free derivative of w with respect to generator `index`.

    Satisfies d(uv) = du + u*dv, d(z)/dz = 1, d(z')/dz = 0 for z' != z and
    d(z^-1)/dz = -z^-1.  Each occurrence of the generator contributes the
    prefix up to (for +1 exponents) or through (for -1 exponents) that letter.
    """
    if index < 0 or (num_generators is not None and index >= num_generators):
        raise IndexError(f"generator index {index} out of range")
    out: dict[Word, float] = {}
    for k, (gen, sign) in enumerate(w.letters):
        if gen != index:
            continue
        if sign == 1:
            p = Word(reduce_letters(w.letters[:k]))
            out[p] = out.get(p, 0.0) + 1.0
        else:
            p = Word(reduce_letters(w.letters[: k + 1]))
            out[p] = out.get(p, 0.0) - 1.0
    return GroupRingElement(out)


@dataclass(frozen=True)
class Relator:
    """The genus-g product of commutators [x1,y1]...[xg,yg]."""

    genus: int
    word: Word

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be positive")
        if self.word != _relator_word(self.genus):
            raise ValueError("word is not the product-of-commutators relator")


def _relator_word(genus: int) -> Word:
    letters: list[Letter] = []
    for i in range(genus):
        x, y = 2 * i, 2 * i + 1
        letters += [(x, 1), (y, 1), (x, -1), (y, -1)]
    return Word(tuple(letters))


def relator(genus: int) -> Relator:
    return Relator(genus, _relator_word(genus))


def relator_fox_jacobian(rel: Relator) -> list[GroupRingElement]:
    """Column of left free derivatives of the relator, one per generator."""
    n = 2 * rel.genus
    return [fox_derivative(rel.word, i, n) for i in range(n)]


def fundamental_identity_defect(w: Word, num_generators: int) -> GroupRingElement:
    """sum_i dw/dz_i * (z_i - 1) - (w - 1); zero for every word."""
    acc = GroupRingElement.zero()
    for i in range(num_generators):
        zi = GroupRingElement.of(Word.generator(i)) - GroupRingElement.one()
        acc = acc + fox_derivative(w, i) * zi
    return acc - (GroupRingElement.of(w) - GroupRingElement.one())
