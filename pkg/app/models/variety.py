"""Profinite equations and the variety specifications built from them."""
from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Factor(BaseModel):
    """One factor of an equation side: ``base^(ω·omega + power)``.

    ``x`` is ``Factor(base="x")``, ``x^ω`` is ``omega=True, power=0`` and
    ``x^{ω+1}`` is ``omega=True, power=1``. The base is a variable name or a
    parenthesised product of factors.
    """

    model_config = ConfigDict(frozen=True)

    base: Union[str, tuple["Factor", ...]]
    omega: bool = False
    power: int = Field(default=1, ge=0)

    @model_validator(mode="after")
    def check_power(self) -> "Factor":
        if not self.omega and self.power < 1:
            raise ValueError("a plain factor needs a positive power")
        return self

    def variables(self) -> set[str]:
        if isinstance(self.base, str):
            return {self.base}
        found: set[str] = set()
        for factor in self.base:
            found |= factor.variables()
        return found

    def __str__(self) -> str:
        if isinstance(self.base, str):
            body = self.base
        else:
            body = "(" + " ".join(str(f) for f in self.base) + ")"
        if self.omega:
            return f"{body}^w" if self.power == 0 else f"{body}^(w+{self.power})"
        return body if self.power == 1 else f"{body}^{self.power}"


Factor.model_rebuild()


class ProfiniteEquation(BaseModel):
    """``lhs = rhs`` over the declared variables; an empty side is the identity."""

    model_config = ConfigDict(frozen=True)

    lhs: tuple[Factor, ...]
    rhs: tuple[Factor, ...]
    variables: tuple[str, ...]

    @model_validator(mode="after")
    def check_variables(self) -> "ProfiniteEquation":
        used: set[str] = set()
        for factor in (*self.lhs, *self.rhs):
            used |= factor.variables()
        undeclared = used - set(self.variables)
        if undeclared:
            raise ValueError(f"undeclared variables: {', '.join(sorted(undeclared))}")
        return self

    def __str__(self) -> str:
        left = " ".join(str(f) for f in self.lhs) or "1"
        right = " ".join(str(f) for f in self.rhs) or "1"
        return f"{left} = {right}"


class VarietySpec(BaseModel):
    """A monoid variety given by a finite set of profinite equations."""

    model_config = ConfigDict(frozen=True)

    name: str
    equations: tuple[ProfiniteEquation, ...] = ()
    logic: Optional[str] = Field(default=None, description="Logic fragment matching the variety")

    @model_validator(mode="after")
    def check_equations(self) -> "VarietySpec":
        if not self.equations and self.name != "all":
            raise ValueError(f"variety {self.name!r} has no equations")
        return self
