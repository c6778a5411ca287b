import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from app.exceptions import EmptyDomainError, NotFunctionalError, NotSequentialisableError
from app.models.automata import Dfa
from app.models.transducer import Dft, Nft
from app.services.automata import is_empty, is_unambiguous
from app.services.monoid import get_variety, in_variety, refines, transition_monoid, word_classes
from app.services.transducer import (
    automaton_to_nft,
    decide_variety_dft,
    determinize_nft,
    disambiguate,
    evaluate,
    is_functional,
    is_unambiguous_nft,
    minimize_dft,
    mirror_nft,
    outputs,
    trim_nft,
    underlying_automaton,
)
from app.services.words import enumerate_words
from tests.oracles import nft_function, nft_outputs, successful_runs
from tests.strategies import dfts, lookahead_nfts, nfas, words


def moves(dft: Dft) -> dict[tuple[str, str], tuple[str, str]]:
    return {(dft.states[p], a): (dft.states[q], out) for (p, a), (q, out) in dft.delta.items()}


@pytest.mark.parametrize(
    "word, image",
    [("abaa", "aaaa"), ("a", "a"), ("aa", "aa"), ("baaab", ""), ("abab", ""), ("ba", ""), ("", "")],
)
def test_f_ends_values(f_ends, word, image):
    assert evaluate(f_ends, word) == image
    assert nft_function(f_ends, word) == image


def test_f_ends_is_functional(f_ends, f_even):
    assert is_functional(f_ends) == (True, None)
    assert is_functional(f_even) == (True, None)
    assert evaluate(f_even, "aaaa") == "aaaa"
    assert evaluate(f_even, "aaa") == ""


def test_non_functional_transducer():
    nft = Nft(
        name="two",
        alphabet=("a",),
        states=("p", "q", "r"),
        initial_outputs={0: ""},
        final_outputs={1: "", 2: ""},
        transitions={(0, "a", 1): "x", (0, "a", 2): "y"},
    )
    functional, witness = is_functional(nft)
    assert not functional
    assert witness == "a"
    assert outputs(nft, "a") == {"x", "y"}
    with pytest.raises(NotFunctionalError):
        evaluate(nft, "a")
    with pytest.raises(NotFunctionalError):
        determinize_nft(nft)


def test_determinize_detxmp(load):
    dft = determinize_nft(load("detxmp"))
    assert dft.states == ("{0:ε}", "{1:a,2:ε}", "{1:ε}")
    assert dft.initial_output == ""
    assert moves(dft) == {
        ("{0:ε}", "a"): ("{1:a,2:ε}", "a"),
        ("{1:a,2:ε}", "a"): ("{1:a,2:ε}", "a"),
        ("{1:a,2:ε}", "b"): ("{1:ε}", "aa"),
        ("{1:ε}", "a"): ("{1:a,2:ε}", ""),
        ("{1:ε}", "b"): ("{1:ε}", "a"),
    }
    assert dft.final_outputs == {1: ""}


def test_determinize_rejects_unbounded_delays(f_even):
    with pytest.raises(NotSequentialisableError) as exc:
        determinize_nft(f_even)
    assert int(exc.value.details["bound"]) == 17


def test_minimize_g(load):
    g = load("g_dft")
    minimal = minimize_dft(g)
    assert minimal.states == ("ε", "a", "ab")
    assert minimal.initial_output == "a"
    assert moves(minimal) == {
        ("ε", "a"): ("a", ""),
        ("a", "a"): ("a", "a"),
        ("a", "b"): ("ab", "aa"),
        ("ab", "a"): ("a", ""),
        ("ab", "b"): ("ab", "a"),
    }
    assert minimal.final_outputs == {1: ""}
    for word in enumerate_words(g.alphabet, 6):
        assert evaluate(minimal, word) == evaluate(g, word)


def test_minimize_empty_domain():
    dead = Dft(name="dead", alphabet=("a",), states=("0",), initial=0, delta={(0, "a"): (0, "x")})
    with pytest.raises(EmptyDomainError):
        minimize_dft(dead)


@pytest.mark.parametrize(
    "fixture, variety",
    [("det1", "idempotent"), ("det2", "commutative"), ("det4", "J")],
)
def test_determinization_can_leave_the_variety(load, fixture, variety):
    nft = load(fixture)
    target = get_variety(variety)
    assert in_variety(transition_monoid(underlying_automaton(nft))[0], target)
    verdict, minimal, _ = decide_variety_dft(determinize_nft(nft), target)
    assert not verdict
    for word in enumerate_words(nft.alphabet, 4):
        assert evaluate(minimal, word) == evaluate(nft, word)


def test_decide_variety_dft_accepts_letter_to_letter_copy(load):
    copy = determinize_nft(load("identity"))
    verdict, minimal, monoid = decide_variety_dft(copy, get_variety("aperiodic"))
    assert verdict
    assert minimal.size == 1
    assert monoid.size == 1


@pytest.mark.parametrize("first", ["1", "3"])
def test_disambiguation_of_dis_is_periodic(load, first):
    nft = automaton_to_nft(load("dis"))
    assert not is_unambiguous_nft(nft)
    result = disambiguate(nft, order=[("0", "a", first)])
    assert is_unambiguous_nft(result)
    for word in enumerate_words(nft.alphabet, 6):
        assert evaluate(result, word) == evaluate(nft, word)
    monoid, _ = transition_monoid(underlying_automaton(result))
    assert not in_variety(monoid, get_variety("aperiodic"))


def test_disambiguated_states_record_smaller_runs(load):
    result = disambiguate(automaton_to_nft(load("dis")), order=[("0", "a", "1")])
    assert "0/{}" in result.states
    assert all("/" in name for name in result.states)


def test_mirror_nft(f_ends):
    mirrored = mirror_nft(f_ends)
    for word in enumerate_words(f_ends.alphabet, 5):
        image = evaluate(f_ends, word)
        expected = None if image is None else image[::-1]
        assert evaluate(mirrored, word[::-1]) == expected


def test_trim_nft_keeps_useful_states():
    nft = Nft(
        name="t",
        alphabet=("a",),
        states=("0", "1", "dead"),
        initial_outputs={0: ""},
        final_outputs={1: "z"},
        transitions={(0, "a", 1): "x", (0, "a", 2): "y"},
    )
    trimmed = trim_nft(nft)
    assert trimmed.states == ("0", "1")
    assert evaluate(trimmed, "a") == "xz"


@given(st.data())
def test_determinize_nft_agrees_on_deterministic_input(data):
    dft = data.draw(dfts())
    nft = dft.to_nft()
    assume(any(evaluate(dft, w) is not None for w in enumerate_words(dft.alphabet, dft.size)))
    result = determinize_nft(nft)
    word = data.draw(words(dft.alphabet))
    assert evaluate(result, word) == nft_function(nft, word)


@given(st.data())
def test_minimize_dft_preserves_the_function(data):
    dft = data.draw(dfts())
    assume(any(evaluate(dft, w) is not None for w in enumerate_words(dft.alphabet, dft.size)))
    minimal = minimize_dft(dft)
    assert minimal.size <= dft.size
    assert minimize_dft(minimal).size == minimal.size
    word = data.draw(words(dft.alphabet))
    assert evaluate(minimal, word) == evaluate(dft, word)


@given(st.data())
def test_disambiguate_keeps_outputs_and_removes_ambiguity(data):
    nfa = data.draw(nfas(max_states=4))
    nft = automaton_to_nft(nfa)
    result = disambiguate(nft)
    assert is_unambiguous(underlying_automaton(result))
    word = data.draw(words(nfa.alphabet, 5))
    assert nft_outputs(result, word) == nft_outputs(nft, word)
    assert successful_runs(result, word) <= 1


def test_automaton_to_nft_copies_accepted_words(l_ends):
    copy = automaton_to_nft(l_ends)
    assert evaluate(copy, "aba") == "aba"
    assert evaluate(copy, "ab") is None
    assert evaluate(automaton_to_nft(l_ends, copy_input=False), "ba") == ""


def test_automaton_to_nft_reads_right_automata_backwards():
    ends_in_a = Dfa(
        name="r",
        alphabet=("a", "b"),
        states=("0", "1", "2"),
        initial=0,
        finals=frozenset({1}),
        delta={(0, "a"): 1, (0, "b"): 2, (1, "a"): 1, (1, "b"): 1, (2, "a"): 2, (2, "b"): 2},
        orientation="right",
    )
    copy = automaton_to_nft(ends_in_a)
    assert copy.name == "r"
    assert evaluate(copy, "ba") == "ba"
    assert evaluate(copy, "ab") is None
    assert evaluate(copy, "") is None


@pytest.mark.parametrize("fixture", ["detxmp", "identity", "g_dft"])
def test_determinization_keeps_aperiodic_transducers_aperiodic(load, fixture):
    aperiodic = get_variety("aperiodic")
    nft = load(fixture)
    assert in_variety(transition_monoid(underlying_automaton(nft))[0], aperiodic)
    result = determinize_nft(nft)
    assert in_variety(transition_monoid(underlying_automaton(result))[0], aperiodic)


@given(st.data())
def test_determinize_nft_on_nondeterministic_input(data):
    nft = data.draw(lookahead_nfts())
    assume(not is_empty(underlying_automaton(nft)))
    result = determinize_nft(nft)
    for word in enumerate_words(nft.alphabet, 8):
        assert evaluate(result, word) == nft_function(nft, word)


@given(st.data())
def test_determinization_preserves_aperiodicity(data):
    aperiodic = get_variety("aperiodic")
    nft = data.draw(lookahead_nfts())
    assume(not is_empty(underlying_automaton(nft)))
    assume(in_variety(transition_monoid(underlying_automaton(nft))[0], aperiodic))
    result = determinize_nft(nft)
    assert in_variety(transition_monoid(underlying_automaton(result))[0], aperiodic)


@given(st.data())
def test_minimize_dft_is_the_coarsest_congruence(data):
    dft = data.draw(dfts())
    assume(not is_empty(underlying_automaton(dft)))
    minimal = minimize_dft(dft)
    sample = list(enumerate_words(dft.alphabet, 4))
    original, _ = transition_monoid(underlying_automaton(dft))
    reduced, _ = transition_monoid(underlying_automaton(minimal))
    assert refines(word_classes(original, sample), word_classes(reduced, sample))
    assert reduced.size <= original.size
