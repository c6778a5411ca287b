"""Translations whose closed formulas are given as regular languages.

A formula ``φ<_{j,σ,v}`` holds on the prefix before a position, ``φ>_{j,σ,v}`` on
the suffix after it. ``φ^i_v`` and ``φ^t_v`` hold on the whole input. A component
missing from the maps is the formula that is never satisfied.
"""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.automata import Dfa, check_alphabet

ComponentKey = tuple[int, str, str]


class Translation(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(default="F", description="Display name used in dumps")
    alphabet: tuple[str, ...]
    k: int = Field(..., ge=1, description="Number of formula indices j")
    outputs: tuple[str, ...] = Field(..., description="The finite output set S")
    variety: str = Field(default="all", description="Variety every component belongs to")
    left: dict[ComponentKey, Dfa] = Field(default_factory=dict, description="φ< components")
    right: dict[ComponentKey, Dfa] = Field(default_factory=dict, description="φ> components")
    initial: dict[str, Dfa] = Field(default_factory=dict, description="φ^i components")
    terminal: dict[str, Dfa] = Field(default_factory=dict, description="φ^t components")

    @model_validator(mode="after")
    def check_components(self) -> "Translation":
        check_alphabet(self.alphabet)
        if len(set(self.outputs)) != len(self.outputs):
            raise ValueError("output set has duplicates")
        known = set(self.outputs)
        letters = set(self.alphabet)
        for (j, letter, v) in [*self.left, *self.right]:
            if not 1 <= j <= self.k:
                raise ValueError(f"component index {j} outside 1..{self.k}")
            if letter not in letters:
                raise ValueError(f"component letter {letter!r} outside the alphabet")
            if v not in known:
                raise ValueError(f"component output {v!r} not declared in outputs")
        for v in [*self.initial, *self.terminal]:
            if v not in known:
                raise ValueError(f"component output {v!r} not declared in outputs")
        for dfa in self.components():
            if dfa.alphabet != self.alphabet:
                raise ValueError(f"component {dfa.name} uses a different alphabet")
        return self

    def components(self) -> list[Dfa]:
        return [
            *self.left.values(),
            *self.right.values(),
            *self.initial.values(),
            *self.terminal.values(),
        ]
