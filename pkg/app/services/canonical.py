"""Canonical bimachines of rational functions and the decision procedures built on them.

The right automaton of the canonical bimachine is the left syntactic congruence
``u ~ v`` iff ``wu`` and ``wv`` have the same domain behaviour for every context
``w`` and ``‖f(wu), f(wv)‖`` stays bounded. Any finer left congruence ``R`` yields
a family of prefix functions ``f̂_r(u) = ∧{f(uv) | [v] = r}``, computed by a
subset-with-delays construction threaded by ``R``; the left automaton is the
coarsest right congruence agreeing on their increments.
"""
from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Optional

from app.config import get_settings
from app.exceptions import (
    InputError,
    InvariantViolation,
    PrefixError,
    RefinementError,
    SearchLimitError,
)
from app.models.automata import Dfa, Nfa
from app.models.bimachine import Bimachine
from app.models.transducer import Nft
from app.models.translation import Translation
from app.models.variety import VarietySpec
from app.services.automata import (
    canonical_form,
    complement,
    complete,
    dfa_congruence_closure,
    minimize,
    mirror_dfa,
    quotient_dfa,
    refine_partition,
    refinement_map,
    representatives,
    word_name,
)
from app.services.bimachine import (
    bimachine_to_nft,
    complete_automata,
    complete_bimachine,
    eval_bimachine,
    is_v_bimachine,
    mirror_bimachine,
)
from app.services.monoid import (
    FiniteMonoid,
    aperiodicity_witness,
    get_variety,
    syntactic_monoid,
    transition_monoid,
    violated_equation,
)
from app.services.transducer import (
    Transducer,
    evaluate,
    mirror_nft,
    require_functional,
    trim_nft,
    underlying_automaton,
)
from app.services.translation import bimachine_to_translation
from app.services.words import Delay, enumerate_words, lcp, residual

logger = logging.getLogger(__name__)

UNDEFINED = "⊥"

MERGED = "merged"
DOMAIN_DIFFERS = "domain-differs"
UNBOUNDED = "unbounded"


def delay_bound(nft: Nft) -> int:
    """Longest delay two runs of ``nft`` can accumulate when their distance stays bounded."""
    return max(1, nft.max_output_length()) * (nft.size**2 + 1)


# ---------------------------------------------------------------------------
# Left syntactic congruence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MergeRecord:
    """Verdict on one pair of base classes, by representative words."""

    first: str
    second: str
    verdict: str

    def __str__(self) -> str:
        return f"{word_name(self.first)} {word_name(self.second)} {self.verdict}"


@dataclass(frozen=True)
class LeftSyntacticQuotient:
    """``Σ*/~_R0`` as a right automaton, with the merge trace that produced it."""

    automaton: Dfa
    trace: tuple[MergeRecord, ...] = ()

    @property
    def size(self) -> int:
        return self.automaton.size

    def classes(self) -> list[str]:
        return list(self.automaton.states)


def _suffix_outputs(nft: Nft, word: str) -> dict[int, str]:
    """For each state ``q``, the output of the runs from ``q`` reading ``word`` into ``F``."""
    successors = nft.successors()
    result: dict[int, str] = {}
    for start in range(nft.size):
        current: dict[int, set[str]] = {start: {""}}
        for letter in word:
            following: dict[int, set[str]] = {}
            for p, produced in current.items():
                for q, out in successors.get((p, letter), ()):
                    following.setdefault(q, set()).update(w + out for w in produced)
            current = following
        values = {
            w + nft.final_outputs[q]
            for q, produced in current.items()
            if q in nft.final_outputs
            for w in produced
        }
        if len(values) > 1:
            raise InvariantViolation(
                "runs from one state disagree on a suffix",
                {"state": nft.states[start], "suffix": word_name(word)},
            )
        if values:
            result[start] = values.pop()
    return result


def bounded_distance(nft: Nft, u: str, v: str) -> bool:
    """Is ``sup_w ‖f(wu), f(wv)‖`` finite?

    The functions ``w ↦ f(wu)`` and ``w ↦ f(wv)`` share the state graph of
    ``nft`` and differ only in their terminal outputs. Pairs of runs on the same
    context are explored with their reduced delay; the distance is unbounded
    exactly when delays at pairs that can still finish grow past
    :func:`delay_bound`.
    """
    tail_u, tail_v = _suffix_outputs(nft, u), _suffix_outputs(nft, v)
    successors = nft.successors()
    backward: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for (p, a), targets in successors.items():
        for (q, b), others in successors.items():
            if a != b:
                continue
            for p2, _ in targets:
                for q2, _ in others:
                    backward.setdefault((p2, q2), set()).add((p, q))
    live = {(p, q) for p in tail_u for q in tail_v}
    queue = deque(live)
    while queue:
        pair = queue.popleft()
        for previous in backward.get(pair, ()):
            if previous not in live:
                live.add(previous)
                queue.append(previous)

    bound = delay_bound(nft)
    seen: set[tuple[int, int, Delay]] = set()
    pending: deque[tuple[int, int, Delay]] = deque()
    for p, x in nft.initial_outputs.items():
        for q, y in nft.initial_outputs.items():
            if (p, q) in live:
                pending.append((p, q, Delay.of(x, y)))
    while pending:
        state = pending.popleft()
        if state in seen:
            continue
        seen.add(state)
        p, q, delay = state
        if len(delay) > bound:
            logger.debug(f"Delay {delay} past {bound} separates {word_name(u)} and {word_name(v)}")
            return False
        for letter in nft.alphabet:
            for p2, out1 in successors.get((p, letter), ()):
                for q2, out2 in successors.get((q, letter), ()):
                    if (p2, q2) in live:
                        pending.append((p2, q2, delay.extend(out1, out2)))
    return True


def _left_action_automaton(monoid: FiniteMonoid, alphabet: tuple[str, ...], name: str) -> Dfa:
    """Elements of ``monoid`` under ``m ↦ σ·m``, read as a right automaton."""
    return Dfa(
        name=name,
        alphabet=alphabet,
        states=tuple(monoid.label(m) for m in range(monoid.size)),
        initial=monoid.identity,
        delta={
            (m, a): monoid.multiply(g, m)
            for m in range(monoid.size)
            for a, g in monoid.generators.items()
        },
        orientation="right",
    )


def left_syntactic_congruence(transducer: Transducer) -> LeftSyntacticQuotient:
    """Compute ``~_R0`` by merging classes of the transition congruence of ``T``.

    Two classes are merged when no left context separates their domain
    behaviour and their outputs stay within bounded left distance.
    """
    require_functional(transducer)
    nft = trim_nft(transducer)
    monoid, reps = transition_monoid(underlying_automaton(nft))
    base = _left_action_automaton(monoid, nft.alphabet, f"R0({nft.name})")
    accepting = {
        m
        for m in range(monoid.size)
        if any(monoid.elements[m][p] & nft.finals for p in nft.initials)
    }
    domain_block = refine_partition(
        list(range(monoid.size)),
        label=lambda m: m in accepting,
        edges=lambda m: [(None, base.delta[(m, a)]) for a in base.alphabet],
    )

    groups: list[list[int]] = []
    trace: list[MergeRecord] = []
    for m in range(monoid.size):
        home = None
        for group in groups:
            head = group[0]
            if domain_block[head] != domain_block[m]:
                trace.append(MergeRecord(reps[head], reps[m], DOMAIN_DIFFERS))
                continue
            if bounded_distance(nft, reps[head], reps[m]):
                trace.append(MergeRecord(reps[head], reps[m], MERGED))
                home = group
                break
            trace.append(MergeRecord(reps[head], reps[m], UNBOUNDED))
        if home is None:
            groups.append([m])
        else:
            home.append(m)
    try:
        automaton = quotient_dfa(base, groups, name=f"R0({nft.name})")
    except InputError as exc:
        raise InvariantViolation(
            "bounded-distance classes are not closed under the left action", exc.details
        ) from exc
    logger.info(f"Computed R0 of {nft.name} with {automaton.size} classes from {monoid.size}")
    return LeftSyntacticQuotient(automaton=automaton, trace=tuple(trace))


def right_syntactic_congruence(
    transducer: Transducer, quotient: Optional[LeftSyntacticQuotient] = None
) -> Dfa:
    """``~_L0`` as a left automaton: the mirror image of ``~_R0`` of the mirrored function.

    ``quotient`` may carry an already computed ``~_R0`` of the mirrored function.
    """
    if quotient is None:
        quotient = left_syntactic_congruence(mirror_nft(transducer))
    return canonical_form(mirror_dfa(quotient.automaton), name=f"L0({transducer.name})")


# ---------------------------------------------------------------------------
# The T_R family
# ---------------------------------------------------------------------------

Pairs = tuple[tuple[int, str], ...]


@dataclass
class TRFamily:
    """Subset-with-delays automaton ``T_R`` threaded by the classes of ``R``.

    A state is ``(P, s)``: ``P`` holds the runs of ``T`` still alive with the
    output each one owes, ``s`` the class of the suffix still to be read.
    ``terminal[x]`` is ``t_s(P)`` for state ``x = (P, s)``; ``final_outputs``
    are the terminal outputs of ``T_f`` on states with ``s = r0``.
    """

    nft: Nft
    right: Dfa
    states: list[tuple[Pairs, int]] = field(default_factory=list)
    initial: dict[int, int] = field(default_factory=dict)
    initial_output: dict[int, str] = field(default_factory=dict)
    transitions: dict[tuple[int, str, int], str] = field(default_factory=dict)
    terminal: dict[int, str] = field(default_factory=dict)
    final_outputs: dict[int, str] = field(default_factory=dict)

    def state_name(self, x: int) -> str:
        pairs, s = self.states[x]
        body = ",".join(f"{self.nft.states[q]}:{word_name(w)}" for q, w in pairs)
        return "{" + body + "}/" + self.right.states[s]

    def steps(self) -> dict[tuple[int, str, int], tuple[int, str]]:
        """``(state, letter, target class) -> (target, output)``."""
        return {(x, a, self.states[y][1]): (y, out) for (x, a, y), out in self.transitions.items()}

    def thread(self, s: int) -> tuple[set[int], int]:
        """States and number of transitions reachable from the initial state of class ``s``."""
        if s not in self.initial:
            return set(), 0
        outgoing: dict[int, list[int]] = {}
        for x, _, y in self.transitions:
            outgoing.setdefault(x, []).append(y)
        seen = {self.initial[s]}
        queue = deque(seen)
        while queue:
            x = queue.popleft()
            for y in outgoing.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        count = sum(1 for x, _, _ in self.transitions if x in seen)
        return seen, count

    def suffix_classes(self, word: str, r: int) -> list[int]:
        """``[σ_{i+1}...σ_n r]`` for ``i = 0..n``."""
        classes = [r]
        for letter in reversed(word):
            classes.append(self.right.delta[(classes[-1], letter)])
        return classes[::-1]

    def prefix_value(self, r: int, word: str) -> Optional[str]:
        """``f̂_r(word)`` read off the unique run of ``T_r``."""
        classes = self.suffix_classes(word, r)
        x = self.initial.get(classes[0])
        if x is None:
            return None
        produced = self.initial_output[classes[0]]
        steps = self.steps()
        for i, letter in enumerate(word):
            step = steps.get((x, letter, classes[i + 1]))
            if step is None:
                return None
            x, out = step
            produced += out
        return produced + self.terminal[x]

    def underlying_automaton(self) -> Nfa:
        """``T_R`` without final states, every thread start initial."""
        return Nfa(
            name=f"T_R({self.nft.name})",
            alphabet=self.nft.alphabet,
            states=tuple(self.state_name(x) for x in range(len(self.states))),
            initials=frozenset(self.initial.values()),
            transitions=frozenset(self.transitions),
        )

    def transducer_for(self, r: int) -> Nft:
        """``T_r``, the transducer of ``f̂_r``."""
        return trim_nft(
            Nft(
                name=f"T_{self.right.states[r]}({self.nft.name})",
                alphabet=self.nft.alphabet,
                states=tuple(self.state_name(x) for x in range(len(self.states))),
                initial_outputs={x: self.initial_output[s] for s, x in self.initial.items()},
                final_outputs={
                    x: self.terminal[x] for x, (_, s) in enumerate(self.states) if s == r
                },
                transitions=dict(self.transitions),
            )
        )

    def function_transducer(self) -> Nft:
        """``T_f``: the function itself on the automaton ``T_R``."""
        return trim_nft(
            Nft(
                name=f"T_f({self.nft.name})",
                alphabet=self.nft.alphabet,
                states=tuple(self.state_name(x) for x in range(len(self.states))),
                initial_outputs={x: self.initial_output[s] for s, x in self.initial.items()},
                final_outputs=dict(self.final_outputs),
                transitions=dict(self.transitions),
            )
        )


def _coaccessible_pairs(nft: Nft, right: Dfa) -> set[tuple[int, int]]:
    """Pairs ``(q, s)`` such that some ``v`` of class ``s`` leads ``q`` into ``F``."""
    predecessors: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for (p, a, q) in nft.transitions:
        for s2 in range(right.size):
            s = right.delta[(s2, a)]
            predecessors.setdefault((q, s2), set()).add((p, s))
    alive = {(q, right.initial) for q in nft.final_outputs}
    queue = deque(alive)
    while queue:
        pair = queue.popleft()
        for previous in predecessors.get(pair, ()):
            if previous not in alive:
                alive.add(previous)
                queue.append(previous)
    return alive


def _suffix_prefixes(
    nft: Nft, right: Dfa, alive: set[tuple[int, int]]
) -> dict[tuple[int, int], str]:
    """``g(q, s)``: longest common prefix of the outputs from ``q`` on words of class ``s``."""
    successors = nft.successors()
    value: dict[tuple[int, int], Optional[str]] = {pair: None for pair in alive}
    preimages = {
        (s, a): [s2 for s2 in range(right.size) if right.delta[(s2, a)] == s]
        for s in range(right.size)
        for a in nft.alphabet
    }
    changed = True
    while changed:
        changed = False
        for q, s in sorted(alive):
            candidates = []
            if q in nft.final_outputs and s == right.initial:
                candidates.append(nft.final_outputs[q])
            for letter in nft.alphabet:
                for q2, out in successors.get((q, letter), ()):
                    for s2 in preimages[(s, letter)]:
                        known = value.get((q2, s2))
                        if known is not None:
                            candidates.append(out + known)
            if candidates:
                new = lcp(candidates)
                if new != value[(q, s)]:
                    value[(q, s)] = new
                    changed = True
    return {pair: w for pair, w in value.items() if w is not None}


def build_T_family(transducer: Transducer, right: Dfa) -> TRFamily:
    """Build ``T_R`` for a right automaton ``right`` finer than ``~_R0``.

    Runs of ``T`` are merged as in determinization, but only inside one thread
    of ``R``-classes; a delay outgrowing :func:`delay_bound` shows that ``right``
    is not finer than ``~_R0``.
    """
    if right.orientation != "right":
        raise InputError("the T_R family needs a right automaton")
    require_functional(transducer)
    nft = trim_nft(transducer)
    if right.alphabet != nft.alphabet:
        raise InputError("right automaton and transducer use different alphabets")
    right = complete(right)
    alive = _coaccessible_pairs(nft, right)
    tails = _suffix_prefixes(nft, right, alive)
    successors = nft.successors()
    bound = delay_bound(nft)
    family = TRFamily(nft=nft, right=right)
    index: dict[tuple[Pairs, int], int] = {}
    queue: deque[int] = deque()

    def intern(pairs: Pairs, s: int) -> int:
        key = (pairs, s)
        if key not in index:
            for _, w in pairs:
                if len(w) > bound:
                    raise RefinementError(
                        "right automaton is not finer than the left syntactic congruence",
                        {"class": right.states[s], "delay": w, "bound": bound},
                    )
            index[key] = len(family.states)
            family.states.append(key)
            queue.append(index[key])
        return index[key]

    for s in range(right.size):
        starts = {q: w for q, w in nft.initial_outputs.items() if (q, s) in alive}
        if not starts:
            continue
        emitted = lcp(starts.values())
        family.initial_output[s] = emitted
        pairs = tuple(sorted((q, residual(emitted, w)) for q, w in starts.items()))
        family.initial[s] = intern(pairs, s)

    while queue:
        x = queue.popleft()
        pairs, s = family.states[x]
        for letter in nft.alphabet:
            for s2 in range(right.size):
                if right.delta[(s2, letter)] != s:
                    continue
                reached = {
                    (q2, w + out)
                    for q, w in pairs
                    for q2, out in successors.get((q, letter), ())
                    if (q2, s2) in alive
                }
                if not reached:
                    continue
                emitted = lcp(w for _, w in reached)
                target = tuple(sorted((q, residual(emitted, w)) for q, w in reached))
                family.transitions[(x, letter, intern(target, s2))] = emitted

    for x, (pairs, s) in enumerate(family.states):
        family.terminal[x] = lcp(w + tails[(q, s)] for q, w in pairs)
        if s == right.initial:
            values = {w + nft.final_outputs[q] for q, w in pairs if q in nft.final_outputs}
            if len(values) > 1:
                raise InvariantViolation(
                    "T_f state has two terminal outputs", {"state": family.state_name(x)}
                )
            if values:
                family.final_outputs[x] = values.pop()
    logger.info(
        f"Built T_R for {nft.name}: {len(family.states)} states over {right.size} classes"
    )
    return family


# ---------------------------------------------------------------------------
# Canonical left congruence and the canonical bimachine
# ---------------------------------------------------------------------------

Profile = tuple[Optional[int], ...]


@dataclass(frozen=True)
class _ProfileAutomaton:
    profiles: list[Profile]
    delta: dict[tuple[int, str], int]
    increments: dict[tuple[int, str], tuple[Optional[str], ...]]
    residuals: dict[int, str]


def _profile_automaton(family: TRFamily) -> _ProfileAutomaton:
    """One ``T_r`` run per class ``r``, tupled: the state reached on ``u`` in each thread."""
    right = family.right
    steps = family.steps()
    classes = range(right.size)
    start: Profile = tuple(family.initial.get(s) for s in classes)
    index = {start: 0}
    profiles = [start]
    delta: dict[tuple[int, str], int] = {}
    increments: dict[tuple[int, str], tuple[Optional[str], ...]] = {}
    queue = deque([start])
    while queue:
        profile = queue.popleft()
        i = index[profile]
        for letter in family.nft.alphabet:
            following: list[Optional[int]] = []
            labels: list[Optional[str]] = []
            for r in classes:
                x = profile[right.delta[(r, letter)]]
                step = steps.get((x, letter, r)) if x is not None else None
                if step is None:
                    following.append(None)
                    labels.append(None)
                    continue
                y, out = step
                following.append(y)
                try:
                    labels.append(residual(family.terminal[x], out + family.terminal[y]))
                except PrefixError as exc:
                    raise InvariantViolation(
                        "prefix function increment is not a residual", exc.details
                    ) from exc
            target = tuple(following)
            if target not in index:
                index[target] = len(profiles)
                profiles.append(target)
                queue.append(target)
            delta[(i, letter)] = index[target]
            increments[(i, letter)] = tuple(labels)
    residuals: dict[int, str] = {}
    for i, profile in enumerate(profiles):
        x = profile[right.initial]
        if x is not None and x in family.final_outputs:
            residuals[i] = residual(family.terminal[x], family.final_outputs[x])
    return _ProfileAutomaton(profiles, delta, increments, residuals)


def _quotient_profiles(family: TRFamily, automaton: _ProfileAutomaton) -> tuple[Dfa, list[int]]:
    """Moore quotient of the profile automaton, in canonical form, with the state map."""
    states = list(range(len(automaton.profiles)))
    alphabet = family.nft.alphabet
    block = refine_partition(
        states,
        label=lambda i: automaton.residuals.get(i),
        edges=lambda i: [
            (automaton.increments[(i, a)], automaton.delta[(i, a)]) for a in alphabet
        ],
    )
    count = len(set(block.values()))
    quotient = Dfa(
        name=f"L({family.nft.name})",
        alphabet=alphabet,
        states=tuple(f"b{i}" for i in range(count)),
        initial=block[0],
        delta={(block[i], a): block[j] for (i, a), j in automaton.delta.items()},
    )
    reps = representatives(quotient)
    renumber = {b: n for n, b in enumerate(reps)}
    return canonical_form(quotient), [renumber[block[i]] for i in states]


def canonical_left_congruence(family: TRFamily) -> Dfa:
    """``~_L^R`` as a left automaton."""
    return _quotient_profiles(family, _profile_automaton(family))[0]


@dataclass(frozen=True)
class CanonicalBimachine:
    """``B^R`` with the congruences it was built from."""

    bimachine: Bimachine
    family: TRFamily
    right_kind: str
    trace: tuple[MergeRecord, ...] = ()
    profile_size: int = 0

    @property
    def left(self) -> Dfa:
        return self.bimachine.left

    @property
    def right(self) -> Dfa:
        return self.bimachine.right


def verify_equivalent(bimachine: Bimachine, transducer: Transducer, max_length: int) -> None:
    """Compare the bimachine with the transducer on every word up to ``max_length``."""
    for word in enumerate_words(bimachine.alphabet, max_length):
        expected, produced = evaluate(transducer, word), eval_bimachine(bimachine, word)
        if expected != produced:
            raise InvariantViolation(
                "canonical bimachine disagrees with its transducer",
                {"word": word_name(word), "expected": expected, "produced": produced},
            )


def canonical_bimachine(
    transducer: Transducer,
    right: Optional[Dfa] = None,
    *,
    syntactic: Optional[LeftSyntacticQuotient] = None,
    verify: Optional[bool] = None,
) -> CanonicalBimachine:
    """Build ``B^R``; ``B⁰`` when ``right`` is omitted.

    ``ω(l, σ, r)`` is the increment ``f̂_{σr}(u)⁻¹ f̂_r(uσ)`` for any ``u`` in class
    ``l``, ``λ(r) = f̂_r(ε)`` and ``ρ(l) = f̂_{r0}(u)⁻¹ f(u)``; the word ``u`` splits
    into these pieces by telescoping.

    ``syntactic`` reuses a computed ``~_R0`` of ``transducer``; ``verify``
    overrides the ``verify_canonical`` setting.
    """
    settings = get_settings()
    if syntactic is None:
        syntactic = left_syntactic_congruence(transducer)
    if right is None:
        right, kind, trace = syntactic.automaton, "R0", syntactic.trace
    else:
        if refinement_map(complete(right), syntactic.automaton) is None:
            raise RefinementError(
                "right automaton is not finer than the left syntactic congruence",
                {"right": right.name},
            )
        kind, trace = "given", ()
    family = build_T_family(transducer, right)
    profiles = _profile_automaton(family)
    left, block_of = _quotient_profiles(family, profiles)
    right = family.right

    omega: dict[tuple[int, str, int], str] = {}
    rho: dict[int, str] = {}
    for i, l in enumerate(block_of):
        for a in left.alphabet:
            for r, out in enumerate(profiles.increments[(i, a)]):
                if out is not None:
                    omega[(l, a, r)] = out
        if i in profiles.residuals:
            rho[l] = profiles.residuals[i]
    lam = {
        r: family.initial_output[r] + family.terminal[x] for r, x in family.initial.items()
    }
    bimachine = Bimachine(
        name=f"B({transducer.name})", left=left, right=right, omega=omega, rho=rho, lam=lam
    )
    if settings.verify_canonical if verify is None else verify:
        verify_equivalent(bimachine, transducer, settings.oracle_max_length)
    logger.info(
        f"Canonical bimachine of {transducer.name}: |L|={left.size}, |R|={right.size}"
    )
    return CanonicalBimachine(
        bimachine=bimachine,
        family=family,
        right_kind=kind,
        trace=trace,
        profile_size=len(profiles.profiles),
    )


def canonical_bimachine_left(
    transducer: Transducer,
    left: Dfa,
    *,
    syntactic: Optional[LeftSyntacticQuotient] = None,
    verify: Optional[bool] = None,
) -> Bimachine:
    """``B^L`` for a left automaton finer than ``~_L0``: the mirror construction.

    ``syntactic`` is ``~_R0`` of the mirrored function, when already known.
    """
    mirrored = canonical_bimachine(
        mirror_nft(transducer), mirror_dfa(complete(left)), syntactic=syntactic, verify=verify
    )
    return mirror_bimachine(mirrored.bimachine)


# ---------------------------------------------------------------------------
# Decisions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """Why a decision failed: the side whose monoid leaves the variety."""

    side: str
    element: Optional[str] = None
    group: Optional[str] = None
    equation: Optional[str] = None

    def trailer(self) -> dict[str, str]:
        details = {"witness_side": self.side}
        if self.element is not None:
            details["witness_element"] = self.element
        if self.group is not None:
            details["witness_monoid"] = self.group
        if self.equation is not None:
            details["witness_equation"] = self.equation
        return details


@dataclass(frozen=True)
class Decision:
    verdict: bool
    variety: str
    nft: Optional[Nft] = None
    bimachine: Optional[Bimachine] = None
    translation: Optional[Translation] = None
    witness: Optional[Witness] = None
    candidates: int = 0

    def trailer(self) -> dict[str, str]:
        details = {"verdict": "yes" if self.verdict else "no", "variety": self.variety}
        if self.candidates:
            details["candidates"] = str(self.candidates)
        if self.witness is not None:
            details.update(self.witness.trailer())
        return details


def _monoid_witness(side: str, monoid: FiniteMonoid, variety: VarietySpec) -> Optional[Witness]:
    """A witness that ``monoid`` is outside ``variety``, or ``None`` if it is inside."""
    if variety.name == "aperiodic":
        found = aperiodicity_witness(monoid)
        if found is None:
            return None
        element, period = found
        return Witness(side=side, element=monoid.label(element), group=f"Z{period}")
    violation = violated_equation(monoid, variety)
    if violation is None:
        return None
    equation, env = violation
    assignment = ",".join(f"{name}={monoid.label(x)}" for name, x in sorted(env.items()))
    found = aperiodicity_witness(monoid)
    return Witness(
        side=side,
        element=assignment,
        group=f"Z{found[1]}" if found is not None else None,
        equation=str(equation),
    )


def decide_fo(transducer: Transducer) -> Decision:
    """Is the function definable by an FO-translation?

    Yes exactly when the domain is an aperiodic language and both automata of
    the canonical bimachine ``B⁰`` are aperiodic. A positive answer comes with a
    complete aperiodic bimachine, an unambiguous aperiodic transducer and a
    translation.
    """
    aperiodic = get_variety("aperiodic")
    require_functional(transducer)
    domain = underlying_automaton(transducer)
    witness = _monoid_witness("domain", syntactic_monoid(domain), aperiodic)
    if witness is not None:
        return Decision(verdict=False, variety=aperiodic.name, witness=witness)
    canonical = canonical_bimachine(transducer)
    for side, automaton in (("right", canonical.right), ("left", canonical.left)):
        witness = _monoid_witness(side, transition_monoid(automaton)[0], aperiodic)
        if witness is not None:
            logger.info(f"{transducer.name} is not FO-definable: {side} monoid contains {witness.group}")
            return Decision(verdict=False, variety=aperiodic.name, witness=witness)
    bimachine = complete_automata(complete_bimachine(canonical.bimachine))
    translation = bimachine_to_translation(bimachine, aperiodic)
    return Decision(
        verdict=True,
        variety=aperiodic.name,
        nft=bimachine_to_nft(bimachine),
        bimachine=bimachine,
        translation=translation,
    )


def complete_function(transducer: Transducer) -> Nft:
    """``f̄``: ``f`` on its domain and the one-letter word ``⊥`` elsewhere."""
    nft = trim_nft(transducer)
    outside = complement(minimize(underlying_automaton(nft)), auto_complete=True)
    shift = nft.size
    states = nft.states + tuple(f"~{name}" for name in outside.states)
    return Nft(
        name=f"{transducer.name}~bot",
        alphabet=nft.alphabet,
        states=states,
        initial_outputs={**nft.initial_outputs, shift + outside.initial: ""},
        final_outputs={
            **nft.final_outputs,
            **{shift + q: UNDEFINED for q in outside.finals},
        },
        transitions={
            **nft.transitions,
            **{(shift + p, a, shift + q): "" for (p, a), q in outside.delta.items()},
        },
    )


def _restrict_outputs(bimachine: Bimachine) -> Bimachine:
    """Drop every output mentioning ``⊥``."""
    return bimachine.model_copy(
        update={
            "omega": {k: w for k, w in bimachine.omega.items() if UNDEFINED not in w},
            "rho": {k: w for k, w in bimachine.rho.items() if UNDEFINED not in w},
            "lam": {k: w for k, w in bimachine.lam.items() if UNDEFINED not in w},
        }
    )


def coarsenings(
    finer: Dfa, fibers: dict[int, Optional[int]], limit: int
) -> Iterator[tuple[frozenset[int], ...]]:
    """Congruence partitions of ``finer`` whose blocks stay inside ``fibers``, finest first.

    Raises :class:`SearchLimitError` when ``limit`` partitions were produced and
    unvisited ones remain.
    """
    start = tuple(frozenset({q}) for q in range(finer.size))
    seen = {frozenset(start)}
    queue = deque([start])
    produced = 0
    while queue:
        if produced >= limit:
            logger.warning(f"Coarsening search stopped after {limit} candidates")
            raise SearchLimitError(limit, produced)
        blocks = queue.popleft()
        yield blocks
        produced += 1
        owner = {q: i for i, block in enumerate(blocks) for q in block}
        for p in range(finer.size):
            for q in range(p + 1, finer.size):
                if owner[p] == owner[q] or fibers[p] != fibers[q]:
                    continue
                merged = dfa_congruence_closure(finer, blocks, [(p, q)])
                if merged is None:
                    continue
                if any(len({fibers[x] for x in block}) > 1 for block in merged):
                    continue
                key = frozenset(merged)
                if key not in seen:
                    seen.add(key)
                    queue.append(tuple(merged))


def decide_variety_unambiguous(transducer: Transducer, variety: VarietySpec) -> Decision:
    """Is the function definable by an unambiguous V-transducer?

    The domain must be a V-language. The function is then completed with ``⊥``
    and every right congruence between ``L⁰`` and ``L₀`` whose automaton lies in
    V is tried as the left automaton of ``B^L``; the answer is yes when some
    ``R^L`` lies in V as well.
    """
    settings = get_settings()
    require_functional(transducer)
    witness = _monoid_witness("domain", syntactic_monoid(underlying_automaton(transducer)), variety)
    if witness is not None:
        return Decision(verdict=False, variety=variety.name, witness=witness)

    total = complete_function(transducer)
    finest = canonical_bimachine(total).left
    mirrored = left_syntactic_congruence(mirror_nft(total))
    coarsest = right_syntactic_congruence(total, mirrored)
    mapping = refinement_map(finest, coarsest)
    if mapping is None:
        raise InvariantViolation(
            "canonical left automaton does not refine the right syntactic congruence",
            {"transducer": transducer.name},
        )
    if finest.size > settings.lattice_warn_states:
        logger.warning(
            f"Searching coarsenings of a {finest.size}-state automaton; this may take long"
        )
    fibers = {q: mapping[q] for q in range(finest.size)}
    tried = 0
    last_witness: Optional[Witness] = None
    for blocks in coarsenings(finest, fibers, settings.lattice_max_candidates):
        candidate = quotient_dfa(finest, blocks, name=f"L'({transducer.name})")
        found = _monoid_witness("left", transition_monoid(candidate)[0], variety)
        if found is not None:
            last_witness = last_witness or found
            continue
        tried += 1
        bimachine = canonical_bimachine_left(total, candidate, syntactic=mirrored, verify=False)
        found = _monoid_witness("right", transition_monoid(bimachine.right)[0], variety)
        if found is not None:
            last_witness = found
            continue
        if settings.verify_canonical:
            verify_equivalent(bimachine, total, settings.oracle_max_length)
        result = complete_bimachine(_restrict_outputs(bimachine))
        if not is_v_bimachine(result, variety):
            raise InvariantViolation(
                "completing a V-bimachine left the variety", {"variety": variety.name}
            )
        logger.info(
            f"{transducer.name} is definable by an unambiguous {variety.name}-transducer "
            f"after {tried} candidates"
        )
        return Decision(
            verdict=True,
            variety=variety.name,
            nft=bimachine_to_nft(result),
            bimachine=result,
            candidates=tried,
        )
    return Decision(
        verdict=False,
        variety=variety.name,
        witness=last_witness or Witness(side="left"),
        candidates=tried,
    )
