"""Bimachine model ``(L, R, ω, λ, ρ)``."""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.automata import Dfa


class Bimachine(BaseModel):
    """A left automaton, a right automaton and a partial output function.

    ``omega`` maps ``(left state, letter, right state)`` to an output word. ``rho``
    is the terminal output on left states and ``lam`` the one on right states; an
    input ``u`` of length ``n`` produces ``lam(r_n) ω(l_0, σ_1, r_{n-1}) ... ρ(l_n)``.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="B", description="Display name used in dumps")
    left: Dfa
    right: Dfa
    omega: dict[tuple[int, str, int], str] = Field(default_factory=dict)
    rho: dict[int, str] = Field(default_factory=dict, description="Terminal output of left states")
    lam: dict[int, str] = Field(default_factory=dict, description="Terminal output of right states")

    @model_validator(mode="after")
    def check_shape(self) -> "Bimachine":
        if self.left.orientation != "left":
            raise ValueError("the left automaton must be left-oriented")
        if self.right.orientation != "right":
            raise ValueError("the right automaton must be right-oriented")
        if self.left.alphabet != self.right.alphabet:
            raise ValueError("left and right automata use different alphabets")
        letters = set(self.alphabet)
        for l, letter, r in self.omega:
            if not (0 <= l < self.left.size and 0 <= r < self.right.size):
                raise ValueError(f"output ({l}, {letter}, {r}) uses an undeclared state")
            if letter not in letters:
                raise ValueError(f"output uses letter {letter!r} outside the alphabet")
        for l in self.rho:
            if not 0 <= l < self.left.size:
                raise ValueError(f"terminal output on undeclared left state {l}")
        for r in self.lam:
            if not 0 <= r < self.right.size:
                raise ValueError(f"terminal output on undeclared right state {r}")
        return self

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.left.alphabet

    @property
    def is_complete(self) -> bool:
        return len(self.omega) == self.left.size * len(self.alphabet) * self.right.size

    def missing_output(self) -> tuple[int, str, int] | None:
        for l in range(self.left.size):
            for letter in self.alphabet:
                for r in range(self.right.size):
                    if (l, letter, r) not in self.omega:
                        return (l, letter, r)
        return None
