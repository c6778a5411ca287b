"""Real-time transducer models ``(Q, I, F, Δ, i, t)``.

Initial and final states are the keys of the initial and terminal output maps.
Every transition carries exactly one output word.
"""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.automata import Dfa, Nfa, check_alphabet, check_state_names


class Nft(BaseModel):
    """Nondeterministic transducer read from left to right."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="T", description="Display name used in dumps")
    alphabet: tuple[str, ...] = Field(..., description="Ordered input letters")
    states: tuple[str, ...] = Field(..., description="State names indexed by state id")
    initial_outputs: dict[int, str] = Field(
        default_factory=dict, description="Initial output i(q); its keys are the initial states"
    )
    final_outputs: dict[int, str] = Field(
        default_factory=dict, description="Terminal output t(q); its keys are the final states"
    )
    transitions: dict[tuple[int, str, int], str] = Field(
        default_factory=dict, description="Output word of each transition (p, σ, q)"
    )

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_alphabet(v)

    @field_validator("states")
    @classmethod
    def validate_states(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_state_names(v)

    @model_validator(mode="after")
    def check_references(self) -> "Nft":
        n = len(self.states)
        letters = set(self.alphabet)
        for q in list(self.initial_outputs) + list(self.final_outputs):
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

    @property
    def initials(self) -> frozenset[int]:
        return frozenset(self.initial_outputs)

    @property
    def finals(self) -> frozenset[int]:
        return frozenset(self.final_outputs)

    def state_id(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(name) from None

    def sorted_transitions(self) -> list[tuple[tuple[int, str, int], str]]:
        order = {letter: i for i, letter in enumerate(self.alphabet)}
        return sorted(self.transitions.items(), key=lambda item: (item[0][0], order[item[0][1]], item[0][2]))

    def successors(self) -> dict[tuple[int, str], list[tuple[int, str]]]:
        """``(state, letter) -> [(target, output), ...]`` in transition order."""
        table: dict[tuple[int, str], list[tuple[int, str]]] = {}
        for (p, letter, q), out in self.sorted_transitions():
            table.setdefault((p, letter), []).append((q, out))
        return table

    def max_output_length(self) -> int:
        words = [*self.transitions.values(), *self.initial_outputs.values()]
        words += list(self.final_outputs.values())
        return max((len(w) for w in words), default=0)


class Dft(BaseModel):
    """Deterministic (subsequential) transducer."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="T", description="Display name used in dumps")
    alphabet: tuple[str, ...] = Field(..., description="Ordered input letters")
    states: tuple[str, ...] = Field(..., description="State names indexed by state id")
    initial: int = 0
    initial_output: str = ""
    final_outputs: dict[int, str] = Field(default_factory=dict)
    delta: dict[tuple[int, str], tuple[int, str]] = Field(
        default_factory=dict, description="(state, letter) -> (target, output)"
    )

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_alphabet(v)

    @field_validator("states")
    @classmethod
    def validate_states(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return check_state_names(v)

    @model_validator(mode="after")
    def check_references(self) -> "Dft":
        n = len(self.states)
        letters = set(self.alphabet)
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state id {self.initial} is undeclared")
        for q in self.final_outputs:
            if not 0 <= q < n:
                raise ValueError(f"undeclared final state id {q}")
        for (p, letter), (q, _) in self.delta.items():
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

    def to_nft(self) -> Nft:
        return Nft(
            name=self.name,
            alphabet=self.alphabet,
            states=self.states,
            initial_outputs={self.initial: self.initial_output},
            final_outputs=dict(self.final_outputs),
            transitions={(p, a, q): out for (p, a), (q, out) in self.delta.items()},
        )

    def underlying_dfa(self) -> Dfa:
        return Dfa(
            name=self.name,
            alphabet=self.alphabet,
            states=self.states,
            initial=self.initial,
            finals=frozenset(self.final_outputs),
            delta={key: q for key, (q, _) in self.delta.items()},
        )

    def underlying_nfa(self) -> Nfa:
        return self.underlying_dfa().to_nfa()
