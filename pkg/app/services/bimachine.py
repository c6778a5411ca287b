"""Bimachines: evaluation, completion, conversions with transducers, variety checks."""
from __future__ import annotations

import logging
from collections import deque
from typing import Optional

from app.exceptions import AmbiguousTransducerError, InvariantViolation, RefinementError
from app.models.automata import Dfa, Nfa
from app.models.bimachine import Bimachine
from app.models.transducer import Nft
from app.models.variety import VarietySpec
from app.services.automata import complete, minimize, mirror_dfa, refinement_map, word_name
from app.services.monoid import in_variety, transition_monoid
from app.services.transducer import (
    Transducer,
    is_unambiguous_nft,
    trim_nft,
    underlying_automaton,
)
from app.services.words import check_word

logger = logging.getLogger(__name__)


def eval_bimachine(bimachine: Bimachine, word: str) -> Optional[str]:
    """``λ(r_n) ω(l_0, σ_1, r_{n-1}) ... ω(l_{n-1}, σ_n, r_0) ρ(l_n)``, or ``None``."""
    check_word(bimachine.alphabet, word)
    left, right = bimachine.left, bimachine.right
    lefts = [left.initial]
    for letter in word:
        lefts.append(left.step(lefts[-1], letter))
    rights = [right.initial]
    for letter in reversed(word):
        rights.append(right.step(rights[-1], letter))
    if lefts[-1] is None or rights[-1] is None:
        return None
    n = len(word)
    pieces = [bimachine.lam.get(rights[n])]
    for i, letter in enumerate(word, start=1):
        pieces.append(bimachine.omega.get((lefts[i - 1], letter, rights[n - i])))
    pieces.append(bimachine.rho.get(lefts[n]))
    if any(piece is None for piece in pieces):
        return None
    return "".join(pieces)


def bimachine_to_nft(bimachine: Bimachine) -> Nft:
    """Product transducer on ``L × R``.

    A state ``(l, r)`` guesses that the remaining suffix leads ``R`` to ``r``;
    reading σ moves to ``(δ_L(l, σ), r')`` for every ``r'`` with ``δ_R(r', σ) = r``.
    """
    left, right = bimachine.left, bimachine.right
    n_right = right.size

    def pair(l: int, r: int) -> int:
        return l * n_right + r

    transitions: dict[tuple[int, str, int], str] = {}
    for (l, letter, r2), out in bimachine.omega.items():
        l2 = left.step(l, letter)
        r1 = right.step(r2, letter)
        if l2 is not None and r1 is not None:
            transitions[(pair(l, r1), letter, pair(l2, r2))] = out
    product = Nft(
        name=bimachine.name,
        alphabet=bimachine.alphabet,
        states=tuple(
            f"({left.states[l]},{right.states[r]})"
            for l in range(left.size)
            for r in range(n_right)
        ),
        initial_outputs={pair(left.initial, r): w for r, w in bimachine.lam.items()},
        final_outputs={pair(l, right.initial): w for l, w in bimachine.rho.items()},
        transitions=transitions,
    )
    logger.debug(f"Bimachine {bimachine.name} as a transducer: {product.size} states before trimming")
    return trim_nft(product)


def bimachine_domain(bimachine: Bimachine) -> Nfa:
    """Automaton of the inputs on which the bimachine is defined."""
    return underlying_automaton(bimachine_to_nft(bimachine))


def _unique(values: set[str], what: str, where: str) -> Optional[str]:
    if len(values) > 1:
        raise InvariantViolation(
            f"{what} is not unique", {"at": where, "values": ",".join(repr(v) for v in sorted(values))}
        )
    return next(iter(values), None)


def nft_to_bimachine(transducer: Transducer) -> Bimachine:
    """Bimachine over the transition monoid ``M(T)`` of an unambiguous transducer.

    The left automaton is ``M(T)`` under right multiplication by generators, the
    right automaton the same elements under left multiplication. ``ω(l, σ, r)``
    is the output of the unique transition ``p -σ-> q`` with ``p`` reachable from
    an initial state by ``l`` and a final state reachable from ``q`` by ``r``.
    """
    if not is_unambiguous_nft(transducer):
        raise AmbiguousTransducerError(f"transducer {transducer.name} is ambiguous; run disambiguate first")
    nft = trim_nft(transducer)
    monoid, reps = transition_monoid(underlying_automaton(nft))
    size = monoid.size
    labels = tuple(word_name(w) for w in reps)
    left = Dfa(
        name=f"L({nft.name})",
        alphabet=nft.alphabet,
        states=labels,
        initial=monoid.identity,
        delta={(m, a): monoid.multiply(m, g) for m in range(size) for a, g in monoid.generators.items()},
    )
    right = Dfa(
        name=f"R({nft.name})",
        alphabet=nft.alphabet,
        states=labels,
        initial=monoid.identity,
        delta={(m, a): monoid.multiply(g, m) for m in range(size) for a, g in monoid.generators.items()},
        orientation="right",
    )
    finals = nft.finals
    reached = [
        frozenset(q for p in nft.initials for q in monoid.elements[m][p]) for m in range(size)
    ]
    live = [
        frozenset(q for q, row in enumerate(monoid.elements[m]) if row & finals)
        for m in range(size)
    ]
    successors = nft.successors()
    omega: dict[tuple[int, str, int], str] = {}
    for l in range(size):
        for letter in nft.alphabet:
            steps = [(q, out) for p in reached[l] for q, out in successors.get((p, letter), ())]
            for r in range(size):
                value = _unique(
                    {out for q, out in steps if q in live[r]}, "ω", f"{labels[l]},{letter},{labels[r]}"
                )
                if value is not None:
                    omega[(l, letter, r)] = value
    lam: dict[int, str] = {}
    for r in range(size):
        value = _unique({nft.initial_outputs[p] for p in nft.initials if p in live[r]}, "λ", labels[r])
        if value is not None:
            lam[r] = value
    rho: dict[int, str] = {}
    for l in range(size):
        value = _unique({nft.final_outputs[q] for q in reached[l] if q in finals}, "ρ", labels[l])
        if value is not None:
            rho[l] = value
    logger.info(f"Converted {nft.name} to a bimachine over a monoid of {size} elements")
    return Bimachine(name=nft.name, left=left, right=right, omega=omega, rho=rho, lam=lam)


def complete_automata(bimachine: Bimachine) -> Bimachine:
    """Add sink states so both automata are total; ω is ε on sink triples."""
    if bimachine.left.is_complete and bimachine.right.is_complete:
        return bimachine
    left, right = complete(bimachine.left), complete(bimachine.right)
    omega = dict(bimachine.omega)
    for l in range(left.size):
        for letter in left.alphabet:
            for r in range(right.size):
                if l >= bimachine.left.size or r >= bimachine.right.size:
                    omega[(l, letter, r)] = ""
    return bimachine.model_copy(update={"left": left, "right": right, "omega": omega})


def complete_bimachine(bimachine: Bimachine) -> Bimachine:
    """An equivalent bimachine whose output function is total.

    The left automaton becomes ``L × A`` with ``A`` the minimal automaton of the
    domain; missing outputs default to ε and ρ is kept only on pairs whose
    domain component accepts.
    """
    if bimachine.is_complete and bimachine.left.is_complete and bimachine.right.is_complete:
        return bimachine
    domain = minimize(bimachine_domain(bimachine))
    base = complete_automata(bimachine)
    left = base.left
    start = (left.initial, domain.initial)
    index = {start: 0}
    order = [start]
    queue = deque([start])
    delta: dict[tuple[int, str], int] = {}
    while queue:
        l, a = queue.popleft()
        for letter in left.alphabet:
            target = (left.delta[(l, letter)], domain.delta[(a, letter)])
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            delta[(index[(l, a)], letter)] = index[target]
    product = Dfa(
        name=left.name,
        alphabet=left.alphabet,
        states=tuple(f"({left.states[l]},{domain.states[a]})" for l, a in order),
        initial=0,
        delta=delta,
    )
    omega = {
        (i, letter, r): base.omega.get((l, letter, r), "")
        for i, (l, _) in enumerate(order)
        for letter in left.alphabet
        for r in range(base.right.size)
    }
    rho = {
        i: base.rho[l]
        for i, (l, a) in enumerate(order)
        if a in domain.finals and l in base.rho
    }
    logger.debug(f"Completed bimachine {bimachine.name}: left automaton has {product.size} states")
    return Bimachine(
        name=bimachine.name, left=product, right=base.right, omega=omega, rho=rho, lam=dict(base.lam)
    )


def rebase_finer(bimachine: Bimachine, left: Dfa, right: Dfa) -> Bimachine:
    """The same function over finer automata ``left`` and ``right``."""
    to_left = refinement_map(left, bimachine.left)
    to_right = refinement_map(right, bimachine.right)
    if to_left is None or to_right is None:
        side = "left" if to_left is None else "right"
        raise RefinementError(
            f"the {side} automaton does not refine the bimachine's {side} automaton",
            {"side": side},
        )
    omega: dict[tuple[int, str, int], str] = {}
    for l in range(left.size):
        for letter in left.alphabet:
            for r in range(right.size):
                out = bimachine.omega.get((to_left.get(l), letter, to_right.get(r)))
                if out is not None:
                    omega[(l, letter, r)] = out
    return Bimachine(
        name=bimachine.name,
        left=left,
        right=right,
        omega=omega,
        rho={l: bimachine.rho[m] for l in range(left.size) if (m := to_left.get(l)) in bimachine.rho},
        lam={r: bimachine.lam[m] for r in range(right.size) if (m := to_right.get(r)) in bimachine.lam},
    )


def mirror_bimachine(bimachine: Bimachine) -> Bimachine:
    """Bimachine of ``u ↦ reverse(f(reverse(u)))``: the two sides trade places."""
    return Bimachine(
        name=f"{bimachine.name}~",
        left=mirror_dfa(bimachine.right),
        right=mirror_dfa(bimachine.left),
        omega={(r, a, l): out[::-1] for (l, a, r), out in bimachine.omega.items()},
        rho={r: w[::-1] for r, w in bimachine.lam.items()},
        lam={l: w[::-1] for l, w in bimachine.rho.items()},
    )


def is_v_bimachine(bimachine: Bimachine, variety: VarietySpec) -> bool:
    """Both automata have their transition monoid in ``variety``."""
    return all(
        in_variety(transition_monoid(side)[0], variety) for side in (bimachine.left, bimachine.right)
    )
