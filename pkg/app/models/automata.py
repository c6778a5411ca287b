"""Finite automata models.

States are interned integers: a state *is* its index into ``states``, which holds
the display names. All constructions iterate states, letters and transitions in
this fixed order, so results are reproducible byte for byte.

A right automaton stores the transition ``q <-σ- p`` as ``(p, σ, q)``: it is read
from its initial states while consuming the input from the last letter to the
first.
"""
from __future__ import annotations

from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from typing import Callable, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Orientation = Literal["left", "right"]


def check_alphabet(symbols: tuple[str, ...]) -> tuple[str, ...]:
    """Validate an alphabet: non-empty, single characters, no duplicates."""
    if not symbols:
        raise ValueError("alphabet must not be empty")
    if len(set(symbols)) != len(symbols):
        raise ValueError(f"alphabet has duplicate letters: {' '.join(symbols)}")
    for letter in symbols:
        if len(letter) != 1:
            raise ValueError(f"letters must be single characters, got {letter!r}")
    return symbols


def check_state_names(names: tuple[str, ...]) -> tuple[str, ...]:
    if len(set(names)) != len(names):
        raise ValueError("state names must be unique")
    return names


class Nfa(BaseModel):
    """Nondeterministic automaton ``(Q, I, F, Δ)`` with a reading orientation."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="A", description="Display name used in dumps")
    alphabet: tuple[str, ...] = Field(..., description="Ordered input letters")
    states: tuple[str, ...] = Field(..., description="State names indexed by state id")
    initials: frozenset[int] = Field(default_factory=frozenset)
    finals: frozenset[int] = Field(default_factory=frozenset)
    transitions: frozenset[tuple[int, str, int]] = Field(default_factory=frozenset)
    orientation: Orientation = "left"

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_alphabet(v)

    @field_validator("states")
    @classmethod
    def validate_states(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_state_names(v)

    @model_validator(mode="after")
    def check_references(self) -> "Nfa":
        n = len(self.states)
        letters = set(self.alphabet)
        for q in self.initials | self.finals:
            if not 0 <= q < n:
                raise ValueError(f"undeclared state id {q}")
        for p, letter, q in self.transitions:
            if not (0 <= p < n and 0 <= q < n):
                raise ValueError(f"transition ({p}, {letter}, {q}) uses an undeclared state")
            if letter not in letters:
                raise ValueError(f"transition uses letter {letter!r} outside the alphabet")
        return self

    @property
    def size(self) -> int:
        return len(self.states)

    def state_id(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(name) from None

    def sorted_transitions(self) -> list[tuple[int, str, int]]:
        order = {letter: i for i, letter in enumerate(self.alphabet)}
        return sorted(self.transitions, key=lambda t: (t[0], order[t[1]], t[2]))

    def successors(self) -> dict[tuple[int, str], list[int]]:
        """Successor lists keyed by ``(state, letter)``, targets in ascending order."""
        table: dict[tuple[int, str], list[int]] = {}
        for p, letter, q in self.sorted_transitions():
            table.setdefault((p, letter), []).append(q)
        return table


class Dfa(BaseModel):
    """Deterministic automaton, possibly partial, possibly without final states.

    Automata without final states stand for one-sided congruences: their states
    are the congruence classes reachable from the class of the empty word.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="A", description="Display name used in dumps")
    alphabet: tuple[str, ...] = Field(..., description="Ordered input letters")
    states: tuple[str, ...] = Field(..., description="State names indexed by state id")
    initial: int = 0
    finals: frozenset[int] = Field(default_factory=frozenset)
    delta: dict[tuple[int, str], int] = Field(default_factory=dict)
    orientation: Orientation = "left"

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_alphabet(v)

    @field_validator("states")
    @classmethod
    def validate_states(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_state_names(v)

    @model_validator(mode="after")
    def check_references(self) -> "Dfa":
        n = len(self.states)
        letters = set(self.alphabet)
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state id {self.initial} is undeclared")
        for q in self.finals:
            if not 0 <= q < n:
                raise ValueError(f"undeclared final state id {q}")
        for (p, letter), q in self.delta.items():
            if not (0 <= p < n and 0 <= q < n):
                raise ValueError(f"transition ({p}, {letter}, {q}) uses an undeclared state")
            if letter not in letters:
                raise ValueError(f"transition uses letter {letter!r} outside the alphabet")
        return self

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def is_complete(self) -> bool:
        return len(self.delta) == len(self.states) * len(self.alphabet)

    def state_id(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(name) from None

    def step(self, state: Optional[int], letter: str) -> Optional[int]:
        if state is None:
            return None
        return self.delta.get((state, letter))

    def to_nfa(self) -> Nfa:
        return Nfa(
            name=self.name,
            alphabet=self.alphabet,
            states=self.states,
            initials=frozenset({self.initial}),
            finals=self.finals,
            transitions=frozenset((p, a, q) for (p, a), q in self.delta.items()),
            orientation=self.orientation,
        )


@dataclass(frozen=True)
class Partition:
    """A partition of a finite carrier into disjoint covering blocks."""

    carrier: frozenset
    blocks: tuple[frozenset, ...]

    def __post_init__(self) -> None:
        seen: set = set()
        for block in self.blocks:
            if not block:
                raise ValueError("partition blocks must be non-empty")
            if seen & block:
                raise ValueError("partition blocks overlap")
            seen |= block
        if seen != set(self.carrier):
            raise ValueError("partition blocks do not cover the carrier")

    @classmethod
    def from_key(cls, items: Iterable[Hashable], key: Callable[[Hashable], Hashable]) -> "Partition":
        """Group items by ``key``; blocks are ordered by first occurrence."""
        groups: dict[Hashable, set] = {}
        carrier = []
        for item in items:
            carrier.append(item)
            groups.setdefault(key(item), set()).add(item)
        return cls(frozenset(carrier), tuple(frozenset(g) for g in groups.values()))

    @classmethod
    def discrete(cls, items: Iterable[Hashable]) -> "Partition":
        items = list(items)
        return cls(frozenset(items), tuple(frozenset({x}) for x in items))

    def block_of(self, item: Hashable) -> frozenset:
        for block in self.blocks:
            if item in block:
                return block
        raise KeyError(item)

    def __len__(self) -> int:
        return len(self.blocks)
