"""Finite monoids, transition and syntactic monoids, and variety membership.

Elements of a transition monoid are boolean relation matrices, stored as one
frozenset of successors per state. The closure starts from the identity and
multiplies on the right by generators breadth-first, which yields a shortest
representative word for every element.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as cartesian
from typing import Optional

from app.config import get_settings
from app.exceptions import InputError, InvariantViolation, UnsupportedVarietyError
from app.models.automata import Dfa, Nfa, Partition
from app.models.variety import Factor, ProfiniteEquation, VarietySpec
from app.services import cache
from app.services.automata import (
    Automaton,
    accessible_states,
    as_nfa,
    coaccessible_states,
    minimize,
    restrict,
    word_name,
)

logger = logging.getLogger(__name__)

Relation = tuple[frozenset[int], ...]


@dataclass(frozen=True, eq=False)
class FiniteMonoid:
    """A finite monoid with a distinguished set of generator images.

    Multiplication comes either from an explicit ``products`` table or from the
    right Cayley graph ``right_action`` (``x·σ`` for each generator letter σ):
    ``x·y`` is then obtained by following the representative word of ``y`` from
    ``x``.
    """

    elements: tuple[Hashable, ...]
    representatives: tuple[str, ...]
    identity: int
    generators: dict[str, int]
    right_action: Optional[tuple[dict[str, int], ...]] = None
    products: Optional[tuple[tuple[int, ...], ...]] = None
    automaton: Optional[Nfa] = None
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.right_action is None and self.products is None:
            raise ValueError("a monoid needs a multiplication table or a Cayley graph")
        self.check_axioms()

    @classmethod
    def from_table(
        cls,
        table: Sequence[Sequence[int]],
        identity: int = 0,
        labels: Optional[Sequence[str]] = None,
        generators: Optional[dict[str, int]] = None,
    ) -> "FiniteMonoid":
        size = len(table)
        labels = tuple(labels) if labels is not None else tuple(f"m{i}" for i in range(size))
        return cls(
            elements=labels,
            representatives=labels,
            identity=identity,
            generators=dict(generators or {}),
            products=tuple(tuple(row) for row in table),
        )

    @property
    def size(self) -> int:
        return len(self.elements)

    def label(self, x: int) -> str:
        return word_name(self.representatives[x])

    def multiply(self, x: int, y: int) -> int:
        if self.products is not None:
            return self.products[x][y]
        key = (x, y)
        found = self._memo.get(key)
        if found is None:
            found = x
            for letter in self.representatives[y]:
                found = self.right_action[found][letter]
            self._memo[key] = found
        return found

    def multiply_all(self, factors: Iterable[int]) -> int:
        result = self.identity
        for x in factors:
            result = self.multiply(result, x)
        return result

    def power(self, x: int, n: int) -> int:
        result = self.identity
        for _ in range(n):
            result = self.multiply(result, x)
        return result

    def element_of(self, word: str) -> int:
        """Image of ``word`` under the generator morphism."""
        try:
            return self.multiply_all(self.generators[letter] for letter in word)
        except KeyError as exc:
            raise InputError(f"letter {exc.args[0]!r} has no generator image") from None

    def cycle(self, x: int) -> tuple[int, int]:
        """Index and period of ``x``: the least ``i, p`` with ``x^(i+p) = x^i``."""
        seen: dict[int, int] = {}
        current, exponent = x, 1
        while current not in seen:
            seen[current] = exponent
            current = self.multiply(current, x)
            exponent += 1
        index = seen[current]
        return index, exponent - index

    def omega(self, x: int) -> int:
        """The idempotent power of ``x``."""
        index, period = self.cycle(x)
        exponent = period * max(1, math.ceil(index / period))
        return self.power(x, exponent)

    @cached_property
    def idempotent_power(self) -> int:
        """Least ``n >= 1`` such that every ``x^n`` is idempotent."""
        cycles = [self.cycle(x) for x in range(self.size)]
        period = math.lcm(*(p for _, p in cycles))
        index = max(i for i, _ in cycles)
        return period * max(1, math.ceil(index / period))

    @cached_property
    def table(self) -> tuple[tuple[int, ...], ...]:
        if self.products is not None:
            return self.products
        return tuple(
            tuple(self.multiply(x, y) for y in range(self.size)) for x in range(self.size)
        )

    def check_axioms(self) -> None:
        n = self.size
        if not 0 <= self.identity < n:
            raise InvariantViolation("monoid identity is not an element")
        for x in range(n):
            if self.multiply(x, self.identity) != x or self.multiply(self.identity, x) != x:
                raise InvariantViolation(f"identity law fails at element {self.label(x)}")
        limit = get_settings().associativity_check_limit
        if n <= limit:
            triples: Iterable[tuple[int, int, int]] = cartesian(range(n), repeat=3)
        else:
            logger.debug(f"Monoid of size {n} above {limit}: checking generator triples only")
            gens = sorted(set(self.generators.values()))
            triples = ((x, g, h) for x in range(n) for g in gens for h in gens)
        for x, y, z in triples:
            if self.multiply(self.multiply(x, y), z) != self.multiply(x, self.multiply(y, z)):
                raise InvariantViolation(
                    "multiplication is not associative",
                    {"triple": ",".join(self.label(e) for e in (x, y, z))},
                )


# ---------------------------------------------------------------------------
# Transition and syntactic monoids
# ---------------------------------------------------------------------------


def _prepared(automaton: Automaton) -> Nfa:
    """Trimmed automaton; automata without final states keep their accessible part."""
    nfa = as_nfa(automaton)
    keep = accessible_states(nfa)
    if nfa.finals:
        keep &= coaccessible_states(nfa)
    return restrict(nfa, keep)


def _compose(first: Relation, then: Relation) -> Relation:
    return tuple(frozenset(t for m in row for t in then[m]) for row in first)


def transition_monoid(automaton: Automaton) -> tuple[FiniteMonoid, tuple[str, ...]]:
    """``Σ*/≡_A`` with one shortest representative per element.

    Product in the monoid follows word concatenation for both orientations.
    """
    nfa = _prepared(automaton)
    key = cache.machine_key(nfa)
    cached = cache.cache_get(key)
    if cached is not None:
        return cached, cached.representatives

    n = nfa.size
    successors = nfa.successors()
    letter_relation = {
        letter: tuple(frozenset(successors.get((q, letter), ())) for q in range(n))
        for letter in nfa.alphabet
    }

    def extend(relation: Relation, letter: str) -> Relation:
        if nfa.orientation == "right":
            return _compose(letter_relation[letter], relation)
        return _compose(relation, letter_relation[letter])

    identity: Relation = tuple(frozenset({q}) for q in range(n))
    elements: list[Relation] = [identity]
    reps = [""]
    index = {identity: 0}
    action: list[dict[str, int]] = []
    queue = deque([0])
    while queue:
        x = queue.popleft()
        row: dict[str, int] = {}
        for letter in nfa.alphabet:
            y = extend(elements[x], letter)
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                reps.append(reps[x] + letter)
                queue.append(index[y])
            row[letter] = index[y]
        action.append(row)

    monoid = FiniteMonoid(
        elements=tuple(elements),
        representatives=tuple(reps),
        identity=0,
        generators={letter: action[0][letter] for letter in nfa.alphabet},
        right_action=tuple(action),
        automaton=nfa,
    )
    logger.debug(f"Transition monoid of {nfa.name}: {monoid.size} elements")
    cache.cache_set(key, monoid)
    return monoid, monoid.representatives


def syntactic_monoid(language: Automaton) -> FiniteMonoid:
    """Transition monoid of the minimal Dfa of the language."""
    return transition_monoid(minimize(language))[0]


def idempotent_power(monoid: FiniteMonoid) -> int:
    return monoid.idempotent_power


def is_counter_free(automaton: Automaton) -> bool:
    """No word ``u`` and state ``q`` with ``q -u^k-> q`` for some ``k`` but not ``q -u-> q``."""
    monoid, _ = transition_monoid(automaton)
    for x in range(monoid.size):
        relation = monoid.elements[x]
        index, period = monoid.cycle(x)
        looping: set[int] = set()
        for k in range(1, index + period):
            power = monoid.elements[monoid.power(x, k)]
            looping |= {q for q, row in enumerate(power) if q in row}
        if any(q not in relation[q] for q in looping):
            return False
    return True


def aperiodicity_witness(monoid: FiniteMonoid) -> Optional[tuple[int, int]]:
    """First element generating a non-trivial group, with that group's order."""
    for x in range(monoid.size):
        _, period = monoid.cycle(x)
        if period > 1:
            return x, period
    return None


# ---------------------------------------------------------------------------
# Equations and varieties
# ---------------------------------------------------------------------------


class _EquationParser:
    """Recursive descent over ``side ('=' side)+``.

    A side is a product of items; an item is a one-letter variable, ``1`` or a
    parenthesised side, optionally raised to ``^w``, ``^ω``, ``^n`` or ``^(w+n)``.
    """

    def __init__(self, text: str):
        self.text = "".join(text.split())
        self.pos = 0

    def error(self, message: str) -> InputError:
        return InputError(f"equation {self.text!r}: {message} at offset {self.pos}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str) -> None:
        if self.peek() != expected:
            raise self.error(f"expected {expected!r}")
        self.pos += 1

    def sides(self) -> list[tuple[Factor, ...]]:
        found = [self.side()]
        while self.peek() == "=":
            self.pos += 1
            found.append(self.side())
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        if len(found) < 2:
            raise self.error("missing '='")
        return found

    def side(self) -> tuple[Factor, ...]:
        factors: list[Factor] = []
        while self.peek() and self.peek() not in "=)":
            item = self.item()
            if item is not None:
                factors.append(item)
        return tuple(factors)

    def item(self) -> Optional[Factor]:
        char = self.peek()
        if char == "(":
            self.pos += 1
            base: str | tuple[Factor, ...] = self.side()
            self.take(")")
        elif char == "1":
            self.pos += 1
            base = ()
        elif char.isalpha() and char not in "wω":
            self.pos += 1
            base = char
        else:
            raise self.error(f"unexpected {char!r}")
        if self.peek() != "^":
            return None if base == () else Factor(base=base)
        self.pos += 1
        omega, power = self.exponent()
        if base == ():
            return None
        return Factor(base=base, omega=omega, power=power)

    def exponent(self) -> tuple[bool, int]:
        if self.peek() in ("(", "{"):
            closing = ")" if self.peek() == "(" else "}"
            self.pos += 1
            omega, power = self.exponent()
            self.take(closing)
            return omega, power
        if self.peek() in ("w", "ω"):
            self.pos += 1
            if self.peek() == "+":
                self.pos += 1
                return True, self.number()
            return True, 0
        return False, self.number()

    def number(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected an exponent")
        return int(self.text[start : self.pos])


def parse_equations(text: str, variables: Optional[Sequence[str]] = None) -> list[ProfiniteEquation]:
    """Parse ``u = v`` or a chain ``u = v = w`` into equations between consecutive sides."""
    sides = _EquationParser(text).sides()
    used: set[str] = set()
    for side in sides:
        for factor in side:
            used |= factor.variables()
    declared = tuple(variables) if variables is not None else tuple(sorted(used))
    try:
        return [
            ProfiniteEquation(lhs=lhs, rhs=rhs, variables=declared)
            for lhs, rhs in zip(sides, sides[1:])
        ]
    except ValueError as exc:
        raise InputError(f"equation {text!r}: {exc}") from None


def _evaluate(monoid: FiniteMonoid, factors: Sequence[Factor], env: dict[str, int]) -> int:
    result = monoid.identity
    for factor in factors:
        if isinstance(factor.base, str):
            base = env[factor.base]
        else:
            base = _evaluate(monoid, factor.base, env)
        value = monoid.omega(base) if factor.omega else monoid.identity
        value = monoid.multiply(value, monoid.power(base, factor.power))
        result = monoid.multiply(result, value)
    return result


def counterexample(monoid: FiniteMonoid, equation: ProfiniteEquation) -> Optional[dict[str, int]]:
    """An assignment of the variables on which both sides differ, if any."""
    names = equation.variables
    for values in cartesian(range(monoid.size), repeat=len(names)):
        env = dict(zip(names, values))
        if _evaluate(monoid, equation.lhs, env) != _evaluate(monoid, equation.rhs, env):
            return env
    return None


def satisfies(monoid: FiniteMonoid, equation: ProfiniteEquation) -> bool:
    return counterexample(monoid, equation) is None


def in_variety(monoid: FiniteMonoid, variety: VarietySpec) -> bool:
    return all(satisfies(monoid, equation) for equation in variety.equations)


def violated_equation(monoid: FiniteMonoid, variety: VarietySpec) -> Optional[tuple[ProfiniteEquation, dict[str, int]]]:
    for equation in variety.equations:
        env = counterexample(monoid, equation)
        if env is not None:
            return equation, env
    return None


def _variety(name: str, equations: Sequence[str], logic: Optional[str]) -> VarietySpec:
    parsed: list[ProfiniteEquation] = []
    for text in equations:
        parsed.extend(parse_equations(text))
    return VarietySpec(name=name, equations=tuple(parsed), logic=logic)


BUILTIN_VARIETIES: dict[str, VarietySpec] = {
    "all": VarietySpec(name="all", equations=(), logic="MSO"),
    "aperiodic": _variety("aperiodic", ["x^w = x^(w+1)"], "FO"),
    "commutative": _variety("commutative", ["xy = yx"], "MSO without order"),
    "idempotent": _variety("idempotent", ["x = x^2"], None),
    "J1": _variety("J1", ["x = x^2", "xy = yx"], "FO1 without order"),
    "J": _variety("J", ["y(xy)^w = (xy)^w = (xy)^w x"], "BΣ1"),
    "DA": _variety("DA", ["(xyz)^w y (xyz)^w = (xyz)^w"], "FO2"),
}

VARIETY_ALIASES = {
    "A": "aperiodic",
    "FO": "aperiodic",
    "Com": "commutative",
    "I": "idempotent",
    "MSO": "all",
}


def get_variety(name: str) -> VarietySpec:
    key = VARIETY_ALIASES.get(name, name)
    try:
        return BUILTIN_VARIETIES[key]
    except KeyError:
        known = ", ".join(BUILTIN_VARIETIES)
        raise UnsupportedVarietyError(
            f"unknown variety {name!r}; known varieties: {known}", {"variety": name}
        ) from None


def is_v_language(language: Automaton, variety: VarietySpec) -> bool:
    return in_variety(syntactic_monoid(language), variety)


# ---------------------------------------------------------------------------
# Congruences on finite carriers
# ---------------------------------------------------------------------------


def refines(finer: Partition, coarser: Partition) -> bool:
    """Every block of ``finer`` lies inside a block of ``coarser``."""
    if finer.carrier != coarser.carrier:
        raise InputError("partitions over different carriers")
    owner = {x: i for i, block in enumerate(coarser.blocks) for x in block}
    return all(len({owner[x] for x in block}) == 1 for block in finer.blocks)


def monoid_congruence_closure(
    monoid: FiniteMonoid, pairs: Iterable[tuple[int, int]]
) -> Partition:
    """Least two-sided congruence identifying every given pair."""
    parent = list(range(monoid.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending = deque(pairs)
    while pending:
        x, y = pending.popleft()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        parent[max(rx, ry)] = min(rx, ry)
        for z in range(monoid.size):
            pending.append((monoid.multiply(x, z), monoid.multiply(y, z)))
            pending.append((monoid.multiply(z, x), monoid.multiply(z, y)))
    return Partition.from_key(range(monoid.size), find)


def quotient_monoid(monoid: FiniteMonoid, congruence: Partition) -> FiniteMonoid:
    blocks = sorted(congruence.blocks, key=min)
    block_of = {x: i for i, block in enumerate(blocks) for x in block}
    heads = [min(block) for block in blocks]
    table = [[block_of[monoid.multiply(x, y)] for y in heads] for x in heads]
    for x in range(monoid.size):
        for y in range(monoid.size):
            if block_of[monoid.multiply(x, y)] != table[block_of[x]][block_of[y]]:
                raise InputError("partition is not a monoid congruence")
    return FiniteMonoid.from_table(
        table,
        identity=block_of[monoid.identity],
        labels=[monoid.label(h) for h in heads],
        generators={a: block_of[g] for a, g in monoid.generators.items()},
    )


def word_classes(monoid: FiniteMonoid, words: Iterable[str]) -> Partition:
    """Partition of ``words`` by their image in ``monoid``."""
    return Partition.from_key(words, monoid.element_of)


def automaton_monoid(automaton: Dfa) -> FiniteMonoid:
    return transition_monoid(automaton)[0]
