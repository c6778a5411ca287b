"""Word algebra: longest common prefixes, residuals, distances and delays."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from itertools import product
from typing import Iterator

from app.exceptions import InputError, PrefixError


def check_word(alphabet: tuple[str, ...], word: str) -> str:
    """Reject words containing letters outside ``alphabet``."""
    letters = set(alphabet)
    for position, letter in enumerate(word):
        if letter not in letters:
            raise InputError(
                f"letter {letter!r} at position {position} is not in the alphabet",
                {"word": word, "letter": letter},
            )
    return word


def enumerate_words(alphabet: tuple[str, ...], max_length: int) -> Iterator[str]:
    """All words of length at most ``max_length``, shortest first, then in alphabet order."""
    for length in range(max_length + 1):
        for letters in product(alphabet, repeat=length):
            yield "".join(letters)


def lcp(words: Iterable[str]) -> str:
    """Longest common prefix of a non-empty collection of words."""
    iterator = iter(words)
    try:
        prefix = next(iterator)
    except StopIteration:
        raise ValueError("lcp of an empty set is undefined") from None
    for word in iterator:
        size = 0
        for x, y in zip(prefix, word):
            if x != y:
                break
            size += 1
        prefix = prefix[:size]
        if not prefix:
            break
    return prefix


def lcs(u: str, v: str) -> str:
    """Longest common suffix."""
    size = 0
    for x, y in zip(reversed(u), reversed(v)):
        if x != y:
            break
        size += 1
    return u[len(u) - size :]


def residual(u: str, v: str) -> str:
    """``u⁻¹v``: the word ``w`` such that ``v = u w``."""
    if not v.startswith(u):
        raise PrefixError(u, v)
    return v[len(u) :]


def left_distance(u: str, v: str) -> int:
    return len(u) + len(v) - 2 * len(lcp((u, v)))


def right_distance(u: str, v: str) -> int:
    return len(u) + len(v) - 2 * len(lcs(u, v))


@dataclass(frozen=True, order=True)
class Delay:
    """The reduced difference ``(x, y)`` between two output words: ``x ∧ y = ε``."""

    x: str = ""
    y: str = ""

    def __post_init__(self) -> None:
        if self.x and self.y and self.x[0] == self.y[0]:
            raise ValueError(f"delay ({self.x!r}, {self.y!r}) is not reduced")

    @classmethod
    def of(cls, u: str, v: str) -> "Delay":
        common = len(lcp((u, v)))
        return cls(u[common:], v[common:])

    def extend(self, u: str, v: str) -> "Delay":
        return Delay.of(self.x + u, self.y + v)

    @property
    def is_zero(self) -> bool:
        return not self.x and not self.y

    @property
    def diverged(self) -> bool:
        """Both sides non-empty: no common continuation can reconcile them."""
        return bool(self.x) and bool(self.y)

    def __len__(self) -> int:
        return max(len(self.x), len(self.y))

    def __str__(self) -> str:
        return f"({self.x!r}, {self.y!r})"
