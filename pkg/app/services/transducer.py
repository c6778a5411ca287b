"""Functional transducers: evaluation, functionality, minimization, determinization.

All transducers are real-time: every transition reads exactly one letter. An
``Nft`` may be nondeterministic but the operations below assume, and check when
it matters, that it defines a function.
"""
from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable, Sequence
from typing import Optional, Union

from app.exceptions import (
    EmptyDomainError,
    InvariantViolation,
    NotFunctionalError,
    NotSequentialisableError,
)
from app.models.automata import Nfa
from app.models.transducer import Dft, Nft
from app.models.variety import VarietySpec
from app.services.automata import (
    Automaton,
    accessible_states,
    as_nfa,
    coaccessible_states,
    is_unambiguous,
    refine_partition,
    reorient,
    word_name,
)
from app.services.monoid import FiniteMonoid, in_variety, transition_monoid
from app.services.words import Delay, check_word, lcp, residual

logger = logging.getLogger(__name__)

Transducer = Union[Nft, Dft]


def as_nft(transducer: Transducer) -> Nft:
    return transducer.to_nft() if isinstance(transducer, Dft) else transducer


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


def underlying_automaton(transducer: Transducer) -> Nfa:
    """Projection of the transitions on their input letters, same I and F."""
    nft = as_nft(transducer)
    return Nfa(
        name=nft.name,
        alphabet=nft.alphabet,
        states=nft.states,
        initials=nft.initials,
        finals=nft.finals,
        transitions=frozenset(nft.transitions),
    )


def restrict_nft(nft: Nft, keep: Iterable[int]) -> Nft:
    kept = sorted(set(keep))
    new_id = {q: i for i, q in enumerate(kept)}
    return Nft(
        name=nft.name,
        alphabet=nft.alphabet,
        states=tuple(nft.states[q] for q in kept),
        initial_outputs={new_id[q]: w for q, w in nft.initial_outputs.items() if q in new_id},
        final_outputs={new_id[q]: w for q, w in nft.final_outputs.items() if q in new_id},
        transitions={
            (new_id[p], a, new_id[q]): out
            for (p, a, q), out in nft.transitions.items()
            if p in new_id and q in new_id
        },
    )


def trim_nft(transducer: Transducer) -> Nft:
    nft = as_nft(transducer)
    automaton = underlying_automaton(nft)
    return restrict_nft(nft, accessible_states(automaton) & coaccessible_states(automaton))


def mirror_nft(transducer: Transducer) -> Nft:
    """Transducer of ``u ↦ reverse(f(reverse(u)))``."""
    nft = as_nft(transducer)
    return Nft(
        name=f"{nft.name}~",
        alphabet=nft.alphabet,
        states=nft.states,
        initial_outputs={q: w[::-1] for q, w in nft.final_outputs.items()},
        final_outputs={q: w[::-1] for q, w in nft.initial_outputs.items()},
        transitions={(q, a, p): out[::-1] for (p, a, q), out in nft.transitions.items()},
    )


def automaton_to_nft(
    automaton: Automaton, copy_input: bool = True, name: Optional[str] = None
) -> Nft:
    """Lift an automaton to a transducer copying its input, or erasing it."""
    source = name or automaton.name
    if automaton.orientation == "right":
        automaton = reorient(automaton, "left")
    automaton = as_nfa(automaton)
    return Nft(
        name=source,
        alphabet=automaton.alphabet,
        states=automaton.states,
        initial_outputs={q: "" for q in automaton.initials},
        final_outputs={q: "" for q in automaton.finals},
        transitions={(p, a, q): (a if copy_input else "") for p, a, q in automaton.transitions},
    )


# ---------------------------------------------------------------------------
# Evaluation and functionality
# ---------------------------------------------------------------------------


def outputs(transducer: Transducer, word: str) -> set[str]:
    """Outputs of all successful runs on ``word``."""
    nft = as_nft(transducer)
    check_word(nft.alphabet, word)
    successors = nft.successors()
    current: dict[int, set[str]] = {q: {w} for q, w in nft.initial_outputs.items()}
    for letter in word:
        following: dict[int, set[str]] = {}
        for p, produced in current.items():
            for q, out in successors.get((p, letter), ()):
                following.setdefault(q, set()).update(w + out for w in produced)
        current = following
        if not current:
            return set()
    return {w + nft.final_outputs[q] for q, produced in current.items() if q in nft.final_outputs for w in produced}


def evaluate(transducer: Transducer, word: str) -> Optional[str]:
    """The image of ``word``, or ``None`` outside the domain."""
    if isinstance(transducer, Dft):
        check_word(transducer.alphabet, word)
        state, produced = transducer.initial, transducer.initial_output
        for letter in word:
            step = transducer.delta.get((state, letter))
            if step is None:
                return None
            state, out = step
            produced += out
        if state not in transducer.final_outputs:
            return None
        return produced + transducer.final_outputs[state]
    found = outputs(transducer, word)
    if len(found) > 1:
        raise NotFunctionalError(word, sorted(found))
    return next(iter(found), None)


def _completion(
    nft: Nft, start: tuple[int, int], successors: dict[tuple[int, str], list[tuple[int, str]]]
) -> Optional[str]:
    """Shortest word leading both components of ``start`` to final states."""
    seen = {start: ""}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        if p in nft.final_outputs and q in nft.final_outputs:
            return seen[(p, q)]
        for letter in nft.alphabet:
            for p2, _ in successors.get((p, letter), ()):
                for q2, _ in successors.get((q, letter), ()):
                    if (p2, q2) not in seen:
                        seen[(p2, q2)] = seen[(p, q)] + letter
                        queue.append((p2, q2))
    return None


def is_functional(transducer: Transducer) -> tuple[bool, Optional[str]]:
    """Decide functionality with the squared product and delay tracking.

    Each live pair of states admits a single delay in a functional transducer; a
    second delay, a delay whose sides start with different letters, or a
    non-zero delay at a final pair falsifies functionality. Returns the verdict
    and, when false, an input with two distinct outputs.
    """
    nft = trim_nft(transducer)
    successors = nft.successors()
    delays: dict[tuple[int, int], tuple[Delay, str]] = {}
    queue: deque[tuple[int, int]] = deque()
    candidates: list[str] = []

    def visit(pair: tuple[int, int], delay: Delay, word: str) -> None:
        known = delays.get(pair)
        suffix = _completion(nft, pair, successors)
        if suffix is None:
            return
        if known is None:
            delays[pair] = (delay, word)
            if delay.diverged:
                candidates.append(word + suffix)
            else:
                queue.append(pair)
        elif known[0] != delay:
            candidates.extend([known[1] + suffix, word + suffix])

    for p in sorted(nft.initial_outputs):
        for q in sorted(nft.initial_outputs):
            visit((p, q), Delay.of(nft.initial_outputs[p], nft.initial_outputs[q]), "")
    while queue and not candidates:
        p, q = queue.popleft()
        delay, word = delays[(p, q)]
        if p in nft.final_outputs and q in nft.final_outputs:
            if not delay.extend(nft.final_outputs[p], nft.final_outputs[q]).is_zero:
                candidates.append(word)
                break
        for letter in nft.alphabet:
            for p2, out1 in successors.get((p, letter), ()):
                for q2, out2 in successors.get((q, letter), ()):
                    visit((p2, q2), delay.extend(out1, out2), word + letter)
    if not candidates:
        return True, None
    for word in candidates:
        if len(outputs(nft, word)) > 1:
            logger.debug(f"{nft.name} is not functional, witness {word!r}")
            return False, word
    raise InvariantViolation(
        "functionality test found a conflict without a witness", {"candidates": ",".join(candidates)}
    )


def require_functional(transducer: Transducer) -> None:
    functional, witness = is_functional(transducer)
    if not functional:
        raise NotFunctionalError(witness or "", sorted(outputs(transducer, witness or "")))


def is_unambiguous_nft(transducer: Transducer) -> bool:
    return is_unambiguous(underlying_automaton(transducer))


# ---------------------------------------------------------------------------
# Minimization of deterministic transducers
# ---------------------------------------------------------------------------


def _canonical_dft(dft: Dft, name: Optional[str] = None) -> Dft:
    """Accessible part numbered breadth-first, states named by shortest input."""
    reps = {dft.initial: ""}
    queue = deque([dft.initial])
    while queue:
        p = queue.popleft()
        for letter in dft.alphabet:
            step = dft.delta.get((p, letter))
            if step is not None and step[0] not in reps:
                reps[step[0]] = reps[p] + letter
                queue.append(step[0])
    new_id = {q: i for i, q in enumerate(reps)}
    return Dft(
        name=name or dft.name,
        alphabet=dft.alphabet,
        states=tuple(word_name(reps[q]) for q in reps),
        initial=0,
        initial_output=dft.initial_output,
        final_outputs={new_id[q]: w for q, w in dft.final_outputs.items() if q in new_id},
        delta={
            (new_id[p], a): (new_id[q], out)
            for (p, a), (q, out) in dft.delta.items()
            if p in new_id
        },
    )


def state_prefixes(dft: Dft) -> dict[int, str]:
    """``s_q``: longest common prefix of every output produced from state ``q``.

    Greatest fixpoint of ``s_q = ∧({t(q)} ∪ {out(q,σ)·s_δ(q,σ)})``; values only
    shrink once defined and are bounded by any single accepted output.
    """
    prefix: dict[int, Optional[str]] = {q: None for q in range(dft.size)}
    changed = True
    while changed:
        changed = False
        for q in range(dft.size):
            candidates = [dft.final_outputs[q]] if q in dft.final_outputs else []
            for letter in dft.alphabet:
                step = dft.delta.get((q, letter))
                if step is not None and prefix[step[0]] is not None:
                    candidates.append(step[1] + prefix[step[0]])
            if candidates:
                value = lcp(candidates)
                if value != prefix[q]:
                    prefix[q] = value
                    changed = True
    return {q: w for q, w in prefix.items() if w is not None}


def minimize_dft(transducer: Dft) -> Dft:
    """The canonical minimal transducer of a subsequential function.

    Outputs are pushed towards the initial state (each state emits as early as
    possible), then states with the same pushed behaviour are merged.
    """
    automaton = transducer.underlying_nfa()
    keep = accessible_states(automaton) & coaccessible_states(automaton)
    if transducer.initial not in keep:
        raise EmptyDomainError(transducer.name)
    kept = sorted(keep)
    new_id = {q: i for i, q in enumerate(kept)}
    dft = Dft(
        name=transducer.name,
        alphabet=transducer.alphabet,
        states=tuple(transducer.states[q] for q in kept),
        initial=new_id[transducer.initial],
        initial_output=transducer.initial_output,
        final_outputs={new_id[q]: w for q, w in transducer.final_outputs.items() if q in keep},
        delta={
            (new_id[p], a): (new_id[q], out)
            for (p, a), (q, out) in transducer.delta.items()
            if p in keep and q in keep
        },
    )
    prefix = state_prefixes(dft)
    pushed_delta = {
        (p, a): (q, residual(prefix[p], out + prefix[q])) for (p, a), (q, out) in dft.delta.items()
    }
    pushed_final = {q: residual(prefix[q], w) for q, w in dft.final_outputs.items()}
    states = list(range(dft.size))
    block = refine_partition(
        states,
        label=lambda q: pushed_final.get(q),
        edges=lambda q: [
            pushed_delta.get((q, a), (None, None))[::-1] for a in dft.alphabet
        ],
    )
    count = len(set(block.values()))
    merged = Dft(
        name=dft.name,
        alphabet=dft.alphabet,
        states=tuple(f"b{i}" for i in range(count)),
        initial=block[dft.initial],
        initial_output=dft.initial_output + prefix[dft.initial],
        final_outputs={block[q]: w for q, w in pushed_final.items()},
        delta={(block[p], a): (block[q], out) for (p, a), (q, out) in pushed_delta.items()},
    )
    logger.debug(f"Minimized transducer {transducer.name}: {transducer.size} -> {count} states")
    return _canonical_dft(merged)


# ---------------------------------------------------------------------------
# Determinization
# ---------------------------------------------------------------------------

SubsetState = tuple[tuple[int, str], ...]


def determinize_nft(transducer: Transducer) -> Dft:
    """Subset construction with delays.

    A state is a sorted set of pairs ``(q, w)``: ``w`` is the output owed by the
    run ending in ``q`` beyond what has been emitted. Delays longer than
    ``C·(|Q|²+1)`` (``C`` the longest output of the transducer) prove that the
    function is not subsequential.
    """
    require_functional(transducer)
    nft = trim_nft(transducer)
    if not nft.initial_outputs:
        raise EmptyDomainError(nft.name)
    bound = max(1, nft.max_output_length()) * (nft.size**2 + 1)
    successors = nft.successors()

    def name_of(subset: SubsetState) -> str:
        return "{" + ",".join(f"{nft.states[q]}:{word_name(w)}" for q, w in subset) + "}"

    initial_output = lcp(nft.initial_outputs.values())
    start: SubsetState = tuple(
        sorted((q, residual(initial_output, w)) for q, w in nft.initial_outputs.items())
    )
    index = {start: 0}
    order = [start]
    delta: dict[tuple[int, str], tuple[int, str]] = {}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        for letter in nft.alphabet:
            reached = [
                (q2, w + out) for q, w in subset for q2, out in successors.get((q, letter), ())
            ]
            if not reached:
                continue
            emitted = lcp(w for _, w in reached)
            target: SubsetState = tuple(sorted({(q, residual(emitted, w)) for q, w in reached}))
            for q, w in target:
                if len(w) > bound:
                    raise NotSequentialisableError(name_of(target), w, bound)
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            delta[(index[subset], letter)] = (index[target], emitted)

    final_outputs: dict[int, str] = {}
    for i, subset in enumerate(order):
        values = {w + nft.final_outputs[q] for q, w in subset if q in nft.final_outputs}
        if len(values) > 1:
            raise InvariantViolation(
                "subset state has two terminal outputs", {"state": name_of(subset)}
            )
        if values:
            final_outputs[i] = values.pop()
    logger.info(f"Determinized {nft.name}: {nft.size} -> {len(order)} states")
    return Dft(
        name=nft.name,
        alphabet=nft.alphabet,
        states=tuple(name_of(s) for s in order),
        initial=0,
        initial_output=initial_output,
        final_outputs=final_outputs,
        delta=delta,
    )


# ---------------------------------------------------------------------------
# Disambiguation
# ---------------------------------------------------------------------------


def disambiguate(
    transducer: Transducer, order: Optional[Sequence[tuple[str, str, str]]] = None
) -> Nft:
    """Keep, for each accepted input, only the lexicographically least run.

    Runs are compared by their initial state, then transition by transition.
    ``order`` lists preferred transitions by ``(source, letter, target)`` names;
    unlisted transitions follow, sorted by source, letter and target. A state
    ``(q, P)`` records in ``P`` the states reached by smaller runs on the same
    input; it accepts only when no smaller run accepts.
    """
    nft = trim_nft(transducer)
    letter_rank = {letter: i for i, letter in enumerate(nft.alphabet)}
    rank: dict[tuple[int, str, int], tuple[int, ...]] = {}
    for position, (source, letter, target) in enumerate(order or ()):
        try:
            key = (nft.state_id(source), letter, nft.state_id(target))
        except KeyError:
            continue
        if key in nft.transitions:
            rank[key] = (0, position)
    for p, a, q in nft.transitions:
        rank.setdefault((p, a, q), (1, p, letter_rank[a], q))

    successors = nft.successors()
    State = tuple[int, frozenset[int]]
    initials = sorted(nft.initial_outputs)
    starts: list[State] = [(q, frozenset(initials[:i])) for i, q in enumerate(initials)]
    index = {s: i for i, s in enumerate(starts)}
    queue = deque(starts)
    transitions: dict[tuple[int, str, int], str] = {}
    while queue:
        q, smaller = queue.popleft()
        for letter in nft.alphabet:
            shadow = {r2 for r in smaller for r2, _ in successors.get((r, letter), ())}
            for q2, out in successors.get((q, letter), ()):
                beaten = shadow | {
                    other
                    for other, _ in successors.get((q, letter), ())
                    if rank[(q, letter, other)] < rank[(q, letter, q2)]
                }
                if q2 in beaten:
                    continue
                state = (q2, frozenset(beaten))
                if state not in index:
                    index[state] = len(index)
                    queue.append(state)
                transitions[(index[(q, smaller)], letter, index[state])] = out

    states = sorted(index, key=index.get)

    def name_of(state: State) -> str:
        q, smaller = state
        return f"{nft.states[q]}/" + "{" + ",".join(nft.states[r] for r in sorted(smaller)) + "}"

    result = Nft(
        name=nft.name,
        alphabet=nft.alphabet,
        states=tuple(name_of(s) for s in states),
        initial_outputs={index[s]: nft.initial_outputs[s[0]] for s in starts},
        final_outputs={
            i: nft.final_outputs[q]
            for i, (q, smaller) in enumerate(states)
            if q in nft.final_outputs and not smaller & nft.finals
        },
        transitions=transitions,
    )
    logger.debug(f"Disambiguated {nft.name}: {len(states)} states before trimming")
    return trim_nft(result)


# ---------------------------------------------------------------------------
# Varieties of deterministic transducers
# ---------------------------------------------------------------------------


def decide_variety_dft(transducer: Dft, variety: VarietySpec) -> tuple[bool, Dft, FiniteMonoid]:
    """Is the subsequential function computed by a V-DFT?

    It is exactly when the transition monoid of its minimal transducer lies in V.
    """
    minimal = minimize_dft(transducer)
    monoid, _ = transition_monoid(minimal.underlying_nfa())
    return in_variety(monoid, variety), minimal, monoid
