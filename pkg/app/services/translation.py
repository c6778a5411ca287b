"""Translations with regular components, and their conversions with bimachines.

Each closed formula of a translation is represented by the automaton of the
language it defines. Prefix formulas ``φ<`` and terminal formulas ``φ^t`` are
read by left automata, suffix formulas ``φ>`` and initial formulas ``φ^i`` by
right automata.
"""
from __future__ import annotations

import logging
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

from app.exceptions import IncompleteBimachineError, InvariantViolation, PreconditionError
from app.models.automata import Dfa, Orientation
from app.models.bimachine import Bimachine
from app.models.translation import Translation
from app.models.variety import VarietySpec
from app.services.automata import (
    accepts,
    canonical_form,
    minimize,
    reorient,
    representatives,
    word_name,
)
from app.services.bimachine import complete_automata, is_v_bimachine
from app.services.monoid import get_variety, in_variety, syntactic_monoid

logger = logging.getLogger(__name__)


def _key(dfa: Dfa) -> tuple:
    return (dfa.size, dfa.initial, dfa.finals, tuple(sorted(dfa.delta.items())))


@dataclass
class JointProduct:
    """Product of complete automata; state ``q`` of ``automaton`` is the tuple ``tuples[q]``."""

    automaton: Dfa
    components: list[Dfa]
    tuples: list[tuple[int, ...]]

    def holds(self, component: Dfa, state: int) -> bool:
        """Whether the component language contains the words of class ``state``."""
        key = _key(component)
        for i, part in enumerate(self.components):
            if _key(part) == key:
                return self.tuples[state][i] in part.finals
        raise InvariantViolation("component missing from its joint product", {"component": component.name})


@dataclass
class TranslationReport:
    left_classes: int
    right_classes: int
    monoid_sizes: dict[str, int] = field(default_factory=dict)


def _oriented(dfa: Dfa, orientation: Orientation) -> Dfa:
    return minimize(reorient(dfa, orientation))


def joint_product(
    components: Sequence[Dfa], alphabet: tuple[str, ...], orientation: Orientation, name: str
) -> JointProduct:
    """Accessible product of the distinct minimal components.

    States are numbered breadth-first in alphabet order, which is the numbering
    ``canonical_form`` gives, so ``tuples`` lines up with the canonical automaton.
    """
    parts: list[Dfa] = []
    for dfa in components:
        if all(_key(dfa) != _key(part) for part in parts):
            parts.append(dfa)
    start = tuple(dfa.initial for dfa in parts)
    index = {start: 0}
    tuples = [start]
    delta: dict[tuple[int, str], int] = {}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for letter in alphabet:
            target = tuple(dfa.delta[(q, letter)] for dfa, q in zip(parts, current))
            if target not in index:
                index[target] = len(tuples)
                tuples.append(target)
                queue.append(target)
            delta[(index[current], letter)] = index[target]
    automaton = Dfa(
        name=name,
        alphabet=alphabet,
        states=tuple(f"c{i}" for i in range(len(tuples))),
        initial=0,
        delta=delta,
        orientation=orientation,
    )
    return JointProduct(automaton=canonical_form(automaton), components=parts, tuples=tuples)


def _tables(translation: Translation):
    """Bimachine tables induced by the translation, each entry a set of candidate outputs.

    Returns ``(L, R, omega, lam, rho)``; the checks and the conversion share it.
    """
    left = {key: _oriented(dfa, "left") for key, dfa in translation.left.items()}
    right = {key: _oriented(dfa, "right") for key, dfa in translation.right.items()}
    initial = {v: _oriented(dfa, "right") for v, dfa in translation.initial.items()}
    terminal = {v: _oriented(dfa, "left") for v, dfa in translation.terminal.items()}
    lefts = joint_product(
        [*left.values(), *terminal.values()], translation.alphabet, "left", f"L({translation.name})"
    )
    rights = joint_product(
        [*right.values(), *initial.values()], translation.alphabet, "right", f"R({translation.name})"
    )
    omega: dict[tuple[int, str, int], set[str]] = {}
    for l in range(lefts.automaton.size):
        for r in range(rights.automaton.size):
            for letter in translation.alphabet:
                omega[(l, letter, r)] = {
                    v
                    for (j, a, v), prefix in left.items()
                    if a == letter
                    and (suffix := right.get((j, a, v))) is not None
                    and lefts.holds(prefix, l)
                    and rights.holds(suffix, r)
                }
    lam = {
        r: {v for v, dfa in initial.items() if rights.holds(dfa, r)}
        for r in range(rights.automaton.size)
    }
    rho = {
        l: {v for v, dfa in terminal.items() if lefts.holds(dfa, l)}
        for l in range(lefts.automaton.size)
    }
    return lefts.automaton, rights.automaton, omega, lam, rho


def check_translation(translation: Translation) -> TranslationReport:
    """Check component varieties, exhaustiveness and functionality.

    Raises ``InvariantViolation`` with witness words when a position admits no
    output or two outputs, or when two initial (terminal) formulas overlap.
    """
    variety = get_variety(translation.variety)
    sizes: dict[str, int] = {}
    named = {
        **{f"phi<{j},{a},{word_name(v)}": d for (j, a, v), d in translation.left.items()},
        **{f"phi>{j},{a},{word_name(v)}": d for (j, a, v), d in translation.right.items()},
        **{f"phi-i,{word_name(v)}": d for v, d in translation.initial.items()},
        **{f"phi-t,{word_name(v)}": d for v, d in translation.terminal.items()},
    }
    for label, dfa in named.items():
        monoid = syntactic_monoid(dfa)
        sizes[label] = monoid.size
        if not in_variety(monoid, variety):
            raise InvariantViolation(
                f"component {label} is not a {variety.name}-language", {"component": label}
            )

    left, right, omega, lam, rho = _tables(translation)
    left_reps, right_reps = representatives(left), representatives(right)
    for (l, letter, r), values in omega.items():
        if len(values) != 1:
            problem = "no output" if not values else "several outputs"
            raise InvariantViolation(
                f"translation gives {problem} at a position",
                {
                    "prefix": word_name(left_reps[l]),
                    "letter": letter,
                    "suffix": word_name(right_reps[r]),
                    "outputs": ",".join(sorted(word_name(v) for v in values)),
                },
            )
    for r, values in lam.items():
        if len(values) > 1:
            raise InvariantViolation(
                "initial formulas overlap", {"word": word_name(right_reps[r])}
            )
    for l, values in rho.items():
        if len(values) > 1:
            raise InvariantViolation(
                "terminal formulas overlap", {"word": word_name(left_reps[l])}
            )
    logger.debug(
        f"Translation {translation.name}: {left.size} left and {right.size} right classes"
    )
    return TranslationReport(left_classes=left.size, right_classes=right.size, monoid_sizes=sizes)


def eval_translation(translation: Translation, word: str) -> Optional[str]:
    """Output of the unique decomposition ``w_0 w_1 ... w_n w_{n+1}``, or ``None``."""

    def unique(values: set[str], where: str) -> Optional[str]:
        if len(values) > 1:
            raise InvariantViolation(
                "translation is not functional", {"at": where, "outputs": ",".join(sorted(values))}
            )
        return next(iter(values), None)

    pieces = [
        unique({v for v, dfa in translation.initial.items() if accepts(dfa, word)}, "initial")
    ]
    for i, letter in enumerate(word):
        prefix, suffix = word[:i], word[i + 1 :]
        values = {
            v
            for (j, a, v), before in translation.left.items()
            if a == letter
            and (after := translation.right.get((j, a, v))) is not None
            and accepts(before, prefix)
            and accepts(after, suffix)
        }
        pieces.append(unique(values, f"position {i + 1}"))
    pieces.append(
        unique({v for v, dfa in translation.terminal.items() if accepts(dfa, word)}, "terminal")
    )
    if any(piece is None for piece in pieces):
        return None
    return "".join(pieces)


def translation_to_bimachine(translation: Translation) -> Bimachine:
    """Complete bimachine whose automata are the joint products of the components."""
    check_translation(translation)
    left, right, omega, lam, rho = _tables(translation)
    bimachine = Bimachine(
        name=translation.name,
        left=left,
        right=right,
        omega={key: next(iter(values)) for key, values in omega.items()},
        lam={r: next(iter(values)) for r, values in lam.items() if values},
        rho={l: next(iter(values)) for l, values in rho.items() if values},
    )
    logger.info(
        f"Translation {translation.name} as a bimachine: |L|={left.size}, |R|={right.size}"
    )
    return bimachine


def bimachine_to_translation(bimachine: Bimachine, variety: Optional[VarietySpec] = None) -> Translation:
    """Translation with ``k = |L|·|R|`` whose components are state languages.

    Index ``j`` of the pair ``(l, r)`` carries ``φ<`` = words leading ``L`` to
    ``l`` and ``φ>`` = words leading ``R`` to ``r``, for the letter and output
    ``ω(l, σ, r)``.
    """
    variety = variety or get_variety("all")
    machine = complete_automata(bimachine)
    missing = machine.missing_output()
    if missing is not None:
        l, letter, r = missing
        raise IncompleteBimachineError(
            f"{machine.left.states[l]},{letter},{machine.right.states[r]}"
        )
    if not is_v_bimachine(machine, variety):
        raise PreconditionError(
            f"bimachine is not a {variety.name}-bimachine", {"variety": variety.name}
        )
    left, right = machine.left, machine.right

    def state_language(dfa: Dfa, finals: set[int], name: str) -> Dfa:
        return dfa.model_copy(update={"finals": frozenset(finals), "name": name})

    outputs = sorted(
        {*machine.omega.values(), *machine.lam.values(), *machine.rho.values()},
        key=lambda w: (len(w), w),
    )
    components_left: dict[tuple[int, str, str], Dfa] = {}
    components_right: dict[tuple[int, str, str], Dfa] = {}
    for l in range(left.size):
        for r in range(right.size):
            j = l * right.size + r + 1
            for letter in left.alphabet:
                v = machine.omega[(l, letter, r)]
                components_left[(j, letter, v)] = state_language(left, {l}, f"L{l}")
                components_right[(j, letter, v)] = state_language(right, {r}, f"R{r}")
    translation = Translation(
        name=bimachine.name,
        alphabet=bimachine.alphabet,
        k=left.size * right.size,
        outputs=tuple(outputs),
        variety=variety.name,
        left=components_left,
        right=components_right,
        initial={
            v: state_language(right, {r for r, w in machine.lam.items() if w == v}, f"I{n}")
            for n, v in enumerate(outputs)
            if v in machine.lam.values()
        },
        terminal={
            v: state_language(left, {l for l, w in machine.rho.items() if w == v}, f"T{n}")
            for n, v in enumerate(outputs)
            if v in machine.rho.values()
        },
    )
    logger.info(f"Bimachine {bimachine.name} as a translation with k={translation.k}")
    return translation
