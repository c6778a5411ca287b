"""Finite automata: runs, standard constructions and congruence conversions.

Every construction numbers its result states deterministically: canonical
automata are numbered breadth-first from the initial state following the
alphabet order, and named after the shortest word reaching each state.
"""
from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Hashable, Iterable, Sequence
from typing import Optional, Union

from app.exceptions import InputError, PreconditionError
from app.models.automata import Dfa, Nfa, Orientation, Partition
from app.services.words import check_word, enumerate_words

logger = logging.getLogger(__name__)

Automaton = Union[Nfa, Dfa]

SINK = "sink"


def word_name(word: str) -> str:
    """Display name of a state represented by ``word``."""
    return word if word else "ε"


def flipped(orientation: Orientation) -> Orientation:
    return "right" if orientation == "left" else "left"


def reading_order(orientation: Orientation, word: str) -> str:
    """The letters of ``word`` in the order an automaton of ``orientation`` consumes them."""
    return word[::-1] if orientation == "right" else word


def extend_word(orientation: Orientation, word: str, letter: str) -> str:
    """The word read after ``word`` once ``letter`` has been consumed."""
    return letter + word if orientation == "right" else word + letter


def as_nfa(automaton: Automaton) -> Nfa:
    return automaton.to_nfa() if isinstance(automaton, Dfa) else automaton


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


def run_dfa(automaton: Dfa, word: str, start: Optional[int] = None) -> Optional[int]:
    """State reached after consuming ``word``; ``None`` if the run leaves the automaton."""
    state: Optional[int] = automaton.initial if start is None else start
    for letter in reading_order(automaton.orientation, word):
        state = automaton.step(state, letter)
        if state is None:
            return None
    return state


def run_nfa(automaton: Nfa, word: str, start: Optional[Iterable[int]] = None) -> frozenset[int]:
    current = frozenset(automaton.initials if start is None else start)
    successors = automaton.successors()
    for letter in reading_order(automaton.orientation, word):
        current = frozenset(q for p in current for q in successors.get((p, letter), ()))
        if not current:
            break
    return current


def accepts(automaton: Automaton, word: str) -> bool:
    check_word(automaton.alphabet, word)
    if isinstance(automaton, Dfa):
        state = run_dfa(automaton, word)
        return state is not None and state in automaton.finals
    return bool(run_nfa(automaton, word) & automaton.finals)


def language_between(
    automaton: Automaton, sources: Iterable[str], targets: Iterable[str]
) -> Nfa:
    """``L_{P1,P2}(A)``: the automaton with initial states ``sources`` and finals ``targets``."""
    nfa = as_nfa(automaton)

    def ids(names: Iterable[str]) -> frozenset[int]:
        found = set()
        for name in names:
            try:
                found.add(nfa.state_id(name))
            except KeyError:
                raise InputError(f"unknown state {name!r}", {"state": name}) from None
        return frozenset(found)

    return nfa.model_copy(update={"initials": ids(sources), "finals": ids(targets)})


# ---------------------------------------------------------------------------
# Reachability and trimming
# ---------------------------------------------------------------------------


def _closure(seeds: Iterable[int], edges: dict[int, set[int]]) -> set[int]:
    seen = set(seeds)
    queue = deque(sorted(seen))
    while queue:
        p = queue.popleft()
        for q in sorted(edges.get(p, ())):
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return seen


def accessible_states(automaton: Automaton) -> set[int]:
    nfa = as_nfa(automaton)
    forward: dict[int, set[int]] = {}
    for p, _, q in nfa.transitions:
        forward.setdefault(p, set()).add(q)
    return _closure(nfa.initials, forward)


def coaccessible_states(automaton: Automaton) -> set[int]:
    nfa = as_nfa(automaton)
    backward: dict[int, set[int]] = {}
    for p, _, q in nfa.transitions:
        backward.setdefault(q, set()).add(p)
    return _closure(nfa.finals, backward)


def restrict(automaton: Automaton, keep: Iterable[int]) -> Nfa:
    """Sub-automaton on ``keep``, renumbered in the original state order."""
    nfa = as_nfa(automaton)
    kept = sorted(set(keep))
    new_id = {q: i for i, q in enumerate(kept)}
    return Nfa(
        name=nfa.name,
        alphabet=nfa.alphabet,
        states=tuple(nfa.states[q] for q in kept),
        initials=frozenset(new_id[q] for q in nfa.initials if q in new_id),
        finals=frozenset(new_id[q] for q in nfa.finals if q in new_id),
        transitions=frozenset(
            (new_id[p], a, new_id[q]) for p, a, q in nfa.transitions if p in new_id and q in new_id
        ),
        orientation=nfa.orientation,
    )


def trim(automaton: Automaton) -> Nfa:
    """Keep the states that are both accessible and co-accessible."""
    return restrict(automaton, accessible_states(automaton) & coaccessible_states(automaton))


def is_empty(automaton: Automaton) -> bool:
    return not (accessible_states(automaton) & as_nfa(automaton).finals)


# ---------------------------------------------------------------------------
# Deterministic constructions
# ---------------------------------------------------------------------------


def representatives(automaton: Dfa) -> dict[int, str]:
    """Shortest word (ties broken by alphabet order) reaching each accessible state."""
    reps = {automaton.initial: ""}
    queue = deque([automaton.initial])
    while queue:
        p = queue.popleft()
        for letter in automaton.alphabet:
            q = automaton.delta.get((p, letter))
            if q is not None and q not in reps:
                reps[q] = extend_word(automaton.orientation, reps[p], letter)
                queue.append(q)
    return reps


def canonical_form(automaton: Dfa, name: Optional[str] = None) -> Dfa:
    """Accessible part, numbered breadth-first and named by representative words."""
    reps = representatives(automaton)
    order = list(reps)
    new_id = {q: i for i, q in enumerate(order)}
    return Dfa(
        name=name or automaton.name,
        alphabet=automaton.alphabet,
        states=tuple(word_name(reps[q]) for q in order),
        initial=0,
        finals=frozenset(new_id[q] for q in automaton.finals if q in new_id),
        delta={
            (new_id[p], a): new_id[q]
            for (p, a), q in automaton.delta.items()
            if p in new_id
        },
        orientation=automaton.orientation,
    )


def determinize(automaton: Automaton) -> Dfa:
    """Subset construction restricted to non-empty reachable subsets."""
    if isinstance(automaton, Dfa):
        return automaton
    successors = automaton.successors()
    start = frozenset(automaton.initials)
    index = {start: 0}
    order = [start]
    delta: dict[tuple[int, str], int] = {}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        for letter in automaton.alphabet:
            target = frozenset(q for p in subset for q in successors.get((p, letter), ()))
            if not target:
                continue
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            delta[(index[subset], letter)] = index[target]

    def subset_name(subset: frozenset[int]) -> str:
        return "{" + ",".join(automaton.states[q] for q in sorted(subset)) + "}"

    logger.debug(f"Determinized {automaton.name}: {automaton.size} -> {len(order)} states")
    return Dfa(
        name=automaton.name,
        alphabet=automaton.alphabet,
        states=tuple(subset_name(s) for s in order),
        initial=0,
        finals=frozenset(i for i, s in enumerate(order) if s & automaton.finals),
        delta=delta,
        orientation=automaton.orientation,
    )


def complete(automaton: Dfa) -> Dfa:
    """Add a sink state so that ``delta`` is total. Complete automata are returned as is."""
    if automaton.is_complete:
        return automaton
    sink_name = SINK
    while sink_name in automaton.states:
        sink_name += "'"
    sink = automaton.size
    delta = dict(automaton.delta)
    for q in range(automaton.size + 1):
        for letter in automaton.alphabet:
            delta.setdefault((q, letter), sink)
    return automaton.model_copy(
        update={"states": automaton.states + (sink_name,), "delta": delta}
    )


def refine_partition(
    states: Sequence[int],
    label: Callable[[int], Hashable],
    edges: Callable[[int], Sequence[tuple[Hashable, Optional[int]]]],
) -> dict[int, int]:
    """Moore partition refinement.

    States start grouped by ``label`` and are split until every state of a block
    has, edge by edge, the same edge label and a target in the same block. Block
    numbers follow the first occurrence in ``states``.
    """

    def renumber(keys: dict[int, Hashable]) -> dict[int, int]:
        ids: dict[Hashable, int] = {}
        return {q: ids.setdefault(keys[q], len(ids)) for q in states}

    block = renumber({q: label(q) for q in states})
    while True:
        keys = {
            q: (
                block[q],
                tuple((lab, -1 if t is None else block[t]) for lab, t in edges(q)),
            )
            for q in states
        }
        refined = renumber(keys)
        if len(set(refined.values())) == len(set(block.values())):
            return refined
        block = refined


def minimize(automaton: Automaton) -> Dfa:
    """The minimal complete Dfa of the language, in canonical form."""
    dfa = complete(canonical_form(determinize(automaton)))
    states = list(range(dfa.size))
    block = refine_partition(
        states,
        label=lambda q: q in dfa.finals,
        edges=lambda q: [(None, dfa.delta[(q, a)]) for a in dfa.alphabet],
    )
    quotient = Dfa(
        name=dfa.name,
        alphabet=dfa.alphabet,
        states=tuple(f"b{i}" for i in range(len(set(block.values())))),
        initial=block[dfa.initial],
        finals=frozenset(block[q] for q in dfa.finals),
        delta={(block[p], a): block[q] for (p, a), q in dfa.delta.items()},
        orientation=dfa.orientation,
    )
    logger.debug(f"Minimized {automaton.name}: {dfa.size} -> {quotient.size} states")
    return canonical_form(quotient)


def _pair_product(a: Nfa, b: Nfa) -> tuple[Nfa, list[tuple[int, int]]]:
    """Synchronised product on reachable pairs, with the pair behind each state id."""
    if a.alphabet != b.alphabet:
        raise InputError("product of automata over different alphabets")
    if a.orientation != b.orientation:
        raise InputError("product of automata with different orientations")
    succ_a, succ_b = a.successors(), b.successors()
    starts = sorted((p, q) for p in a.initials for q in b.initials)
    index = {pair: i for i, pair in enumerate(starts)}
    queue = deque(starts)
    transitions = set()
    while queue:
        p, q = queue.popleft()
        for letter in a.alphabet:
            for p2 in succ_a.get((p, letter), ()):
                for q2 in succ_b.get((q, letter), ()):
                    if (p2, q2) not in index:
                        index[(p2, q2)] = len(index)
                        queue.append((p2, q2))
                    transitions.add((index[(p, q)], letter, index[(p2, q2)]))
    pairs = sorted(index, key=index.get)
    nfa = Nfa(
        name=f"{a.name}x{b.name}",
        alphabet=a.alphabet,
        states=tuple(f"({a.states[p]},{b.states[q]})" for p, q in pairs),
        initials=frozenset(index[pair] for pair in starts),
        finals=frozenset(
            i for i, (p, q) in enumerate(pairs) if p in a.finals and q in b.finals
        ),
        transitions=frozenset(transitions),
        orientation=a.orientation,
    )
    return nfa, pairs


def product(first: Automaton, second: Automaton) -> Nfa:
    """Synchronised product recognising the intersection, restricted to reachable pairs."""
    return _pair_product(as_nfa(first), as_nfa(second))[0]


def complement(automaton: Dfa, auto_complete: bool = False) -> Dfa:
    if not automaton.is_complete:
        if not auto_complete:
            raise PreconditionError(
                "complement requires a complete Dfa", {"automaton": automaton.name}
            )
        automaton = complete(automaton)
    every = frozenset(range(automaton.size))
    return automaton.model_copy(update={"finals": every - automaton.finals})


def reverse(automaton: Automaton) -> Nfa:
    """Swap initial and final states and turn every transition around.

    The reading direction flips as well, so the result recognises the same
    language as ``automaton``.
    """
    nfa = as_nfa(automaton)
    return nfa.model_copy(
        update={
            "initials": nfa.finals,
            "finals": nfa.initials,
            "transitions": frozenset((q, a, p) for p, a, q in nfa.transitions),
            "orientation": flipped(nfa.orientation),
        }
    )


def reorient(automaton: Automaton, orientation: Orientation) -> Dfa:
    """A minimal Dfa of the same language reading in ``orientation``."""
    if automaton.orientation == orientation:
        return automaton if isinstance(automaton, Dfa) else minimize(automaton)
    return minimize(reverse(automaton))


def mirror_dfa(automaton: Dfa) -> Dfa:
    """Same transitions, other reading direction.

    For a congruence automaton this yields the automaton of the mirrored
    congruence (``u ~ v`` iff ``reverse(u) ~ reverse(v)`` before the flip).
    """
    return automaton.model_copy(update={"orientation": flipped(automaton.orientation)})


def equivalent(first: Automaton, second: Automaton) -> bool:
    """Language equality, decided on minimal Dfas."""
    a = minimize(reorient(first, "left"))
    b = minimize(reorient(second, "left"))
    if a.size != b.size or a.alphabet != b.alphabet:
        return False
    return a.delta == b.delta and a.finals == b.finals


def is_unambiguous(automaton: Automaton) -> bool:
    """Every accepted word has exactly one successful run.

    Squaring construction: the trimmed product of the automaton with itself may
    only use diagonal pairs.
    """
    nfa = trim(automaton)
    square, pairs = _pair_product(nfa, nfa)
    live = accessible_states(square) & coaccessible_states(square)
    return all(pairs[i][0] == pairs[i][1] for i in live)


# ---------------------------------------------------------------------------
# Congruences
# ---------------------------------------------------------------------------


def automaton_congruence(automaton: Dfa) -> Partition:
    """The classes ``u ~ v`` iff both words lead to the same state.

    The carrier holds every word up to one letter longer than the number of
    accessible states, enough for each class to have a representative whose
    one-letter extensions are also in the carrier. Words leaving a partial
    automaton form one extra class.
    """
    bound = len(representatives(automaton)) + 1
    words = list(enumerate_words(automaton.alphabet, bound))
    return Partition.from_key(words, lambda w: run_dfa(automaton, w))


def congruence_to_automaton(
    classes: Partition,
    alphabet: tuple[str, ...],
    orientation: Orientation = "left",
    name: str = "C",
) -> Dfa:
    """The automaton ``(Σ*/~, [ε], δ)`` of a one-sided congruence given by a class table.

    A left automaton is built for a right congruence (``u ~ v`` implies
    ``uσ ~ vσ``); a right automaton for a left congruence. The table is a
    partition of a finite set of words containing the empty word.
    """
    carrier = classes.carrier
    if "" not in carrier:
        raise InputError("the class table must contain the empty word")
    for word in carrier:
        check_word(alphabet, word)
    block_id = {word: i for i, block in enumerate(classes.blocks) for word in block}
    delta: dict[tuple[int, str], int] = {}
    for i, block in enumerate(classes.blocks):
        for letter in alphabet:
            targets = {
                block_id[extended]: word
                for word in sorted(block, key=lambda w: (len(w), w))
                if (extended := extend_word(orientation, word, letter)) in carrier
            }
            if len(targets) > 1:
                witnesses = sorted(targets.values(), key=lambda w: (len(w), w))[:2]
                raise InputError(
                    "partition is not a congruence: equivalent words have inequivalent extensions",
                    {"words": ",".join(word_name(w) for w in witnesses), "letter": letter},
                )
            if targets:
                delta[(i, letter)] = next(iter(targets))
    start = block_id[""]
    dfa = Dfa(
        name=name,
        alphabet=alphabet,
        states=tuple(f"c{i}" for i in range(len(classes.blocks))),
        initial=start,
        delta=delta,
        orientation=orientation,
    )
    for q in representatives(dfa):
        for letter in alphabet:
            if (q, letter) not in delta:
                raise InputError(
                    "class table too short: a reachable class has no extension",
                    {"class": word_name(min(classes.blocks[q], key=lambda w: (len(w), w))),
                     "letter": letter},
                )
    return canonical_form(dfa)


def refinement_map(finer: Dfa, coarser: Dfa) -> Optional[dict[Optional[int], Optional[int]]]:
    """Map each class of ``finer`` to the class of ``coarser`` containing it.

    ``None`` stands for the words leaving a partial automaton. Returns ``None``
    when some class of ``finer`` meets two classes of ``coarser``.
    """
    if finer.alphabet != coarser.alphabet or finer.orientation != coarser.orientation:
        raise InputError("refinement between automata of different shapes")
    mapping: dict[Optional[int], Optional[int]] = {finer.initial: coarser.initial}
    queue = deque([(finer.initial, coarser.initial)])
    seen = {(finer.initial, coarser.initial)}
    while queue:
        p, q = queue.popleft()
        for letter in finer.alphabet:
            pair = (finer.step(p, letter), coarser.step(q, letter))
            if mapping.setdefault(pair[0], pair[1]) != pair[1]:
                return None
            if pair not in seen and pair != (None, None):
                seen.add(pair)
                queue.append(pair)
    return mapping


def dfa_congruence_closure(
    automaton: Dfa, blocks: Iterable[Iterable[int]], merge: Iterable[tuple[int, int]] = ()
) -> Optional[list[frozenset[int]]]:
    """Coarsest-needed closure of ``blocks`` plus ``merge`` under the transitions.

    Returns the blocks of the least congruence (``p ~ q`` implies
    ``δ(p,σ) ~ δ(q,σ)``) containing the input, ordered by smallest member, or
    ``None`` if the closure would identify a defined and an undefined transition.
    """
    parent = list(range(automaton.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending: deque[tuple[int, int]] = deque()
    for block in blocks:
        members = sorted(block)
        pending.extend((members[0], other) for other in members[1:])
    pending.extend(merge)
    while pending:
        p, q = pending.popleft()
        rp, rq = find(p), find(q)
        if rp == rq:
            continue
        parent[max(rp, rq)] = min(rp, rq)
        for letter in automaton.alphabet:
            tp, tq = automaton.step(p, letter), automaton.step(q, letter)
            if (tp is None) != (tq is None):
                return None
            if tp is not None:
                pending.append((tp, tq))
    grouped: dict[int, set[int]] = {}
    for q in range(automaton.size):
        grouped.setdefault(find(q), set()).add(q)
    return sorted((frozenset(g) for g in grouped.values()), key=min)


def quotient_dfa(automaton: Dfa, blocks: Iterable[Iterable[int]], name: Optional[str] = None) -> Dfa:
    """Automaton of the congruence whose classes are unions of states along ``blocks``."""
    blocks = [frozenset(b) for b in blocks]
    block_of = {q: i for i, block in enumerate(blocks) for q in block}
    delta: dict[tuple[int, str], int] = {}
    for (p, letter), q in automaton.delta.items():
        key = (block_of[p], letter)
        if delta.setdefault(key, block_of[q]) != block_of[q]:
            raise InputError(
                "blocks are not closed under the transitions",
                {"state": automaton.states[p], "letter": letter},
            )
    quotient = Dfa(
        name=name or automaton.name,
        alphabet=automaton.alphabet,
        states=tuple(f"b{i}" for i in range(len(blocks))),
        initial=block_of[automaton.initial],
        finals=frozenset(block_of[q] for q in automaton.finals),
        delta=delta,
        orientation=automaton.orientation,
    )
    return canonical_form(quotient)
