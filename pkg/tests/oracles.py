"""Brute-force reference semantics used to cross-check the constructions."""
from typing import Optional

from app.models.automata import Dfa, Nfa
from app.models.transducer import Nft
from app.services.words import enumerate_words


def nfa_accepts(nfa: Nfa, word: str) -> bool:
    letters = word[::-1] if nfa.orientation == "right" else word

    def walk(state: int, rest: str) -> bool:
        if not rest:
            return state in nfa.finals
        return any(
            walk(q, rest[1:]) for p, a, q in nfa.transitions if p == state and a == rest[0]
        )

    return any(walk(q, letters) for q in nfa.initials)


def dfa_accepts(dfa: Dfa, word: str) -> bool:
    return nfa_accepts(dfa.to_nfa(), word)


def nft_outputs(nft: Nft, word: str) -> set[str]:
    """Outputs of every run, enumerated path by path."""
    found: set[str] = set()

    def walk(state: int, rest: str, produced: str) -> None:
        if not rest:
            if state in nft.final_outputs:
                found.add(produced + nft.final_outputs[state])
            return
        for (p, a, q), out in nft.transitions.items():
            if p == state and a == rest[0]:
                walk(q, rest[1:], produced + out)

    for q, out in nft.initial_outputs.items():
        walk(q, word, out)
    return found


def nft_function(nft: Nft, word: str) -> Optional[str]:
    found = nft_outputs(nft, word)
    assert len(found) <= 1, f"{nft.name} has outputs {found} on {word!r}"
    return next(iter(found), None)


def successful_runs(nft: Nft, word: str) -> int:
    def walk(state: int, rest: str) -> int:
        if not rest:
            return int(state in nft.final_outputs)
        return sum(
            walk(q, rest[1:]) for (p, a, q) in nft.transitions if p == state and a == rest[0]
        )

    return sum(walk(q, word) for q in nft.initial_outputs)


def same_function(first, second, alphabet: tuple[str, ...], max_length: int) -> Optional[str]:
    """First word on which two evaluators disagree, or ``None``."""
    for word in enumerate_words(alphabet, max_length):
        if first(word) != second(word):
            return word
    return None


def distance(x: str, y: str) -> int:
    """``|x| + |y| - 2|lcp(x, y)|``."""
    common = 0
    for a, b in zip(x, y):
        if a != b:
            break
        common += 1
    return len(x) + len(y) - 2 * common


def context_gap(function, alphabet: tuple[str, ...], u: str, v: str, max_length: int) -> Optional[int]:
    """Largest ``‖f(wu), f(wv)‖`` over left contexts ``w``.

    ``None`` when some context puts exactly one of ``wu`` and ``wv`` in the domain.
    """
    gap = 0
    for w in enumerate_words(alphabet, max_length):
        first, second = function(w + u), function(w + v)
        if (first is None) != (second is None):
            return None
        if first is not None:
            gap = max(gap, distance(first, second))
    return gap
