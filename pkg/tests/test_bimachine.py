import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.exceptions import AmbiguousTransducerError, InputError, RefinementError
from app.services.bimachine import (
    bimachine_domain,
    bimachine_to_nft,
    complete_bimachine,
    eval_bimachine,
    is_v_bimachine,
    mirror_bimachine,
    nft_to_bimachine,
    rebase_finer,
)
from app.services.monoid import get_variety, in_variety, is_v_language, syntactic_monoid, transition_monoid
from app.services.transducer import (
    automaton_to_nft,
    evaluate,
    is_unambiguous_nft,
    underlying_automaton,
)
from app.services.words import enumerate_words
from tests.oracles import nfa_accepts
from tests.strategies import bimachines, words


def test_xmp_computes_f_ends(xmp_bim, f_ends):
    assert eval_bimachine(xmp_bim, "abaa") == "aaaa"
    assert eval_bimachine(xmp_bim, "ba") == ""
    for word in enumerate_words(xmp_bim.alphabet, 6):
        assert eval_bimachine(xmp_bim, word) == evaluate(f_ends, word)


def test_eval_rejects_foreign_letters(xmp_bim):
    with pytest.raises(InputError):
        eval_bimachine(xmp_bim, "abc")


def test_bimachine_to_nft_is_unambiguous(xmp_bim):
    nft = bimachine_to_nft(xmp_bim)
    assert is_unambiguous_nft(nft)
    for word in enumerate_words(xmp_bim.alphabet, 5):
        assert evaluate(nft, word) == eval_bimachine(xmp_bim, word)


def test_nft_to_bimachine(f_ends):
    bimachine = nft_to_bimachine(f_ends)
    assert bimachine.left.size == bimachine.right.size
    for word in enumerate_words(f_ends.alphabet, 6):
        assert eval_bimachine(bimachine, word) == evaluate(f_ends, word)


def test_nft_to_bimachine_needs_an_unambiguous_transducer(load):
    with pytest.raises(AmbiguousTransducerError):
        nft_to_bimachine(automaton_to_nft(load("dis")))


def test_v_bimachine_with_non_v_domain(load):
    vbim = load("v_bim")
    commutative = get_variety("commutative")
    assert is_v_bimachine(vbim, commutative)
    assert [w for w in enumerate_words(vbim.alphabet, 4) if eval_bimachine(vbim, w) is not None] == ["ab"]
    domain = bimachine_domain(vbim)
    assert nfa_accepts(domain, "ab")
    assert not nfa_accepts(domain, "ba")
    assert not in_variety(syntactic_monoid(domain), commutative)


def test_complete_bimachine(load):
    vbim = load("v_bim")
    complete = complete_bimachine(vbim)
    assert complete.is_complete
    assert complete.left.is_complete and complete.right.is_complete
    for word in enumerate_words(vbim.alphabet, 5):
        assert eval_bimachine(complete, word) == eval_bimachine(vbim, word)


def test_rebase_onto_finer_automata(xmp_bim, f_ends):
    finer = nft_to_bimachine(f_ends)
    rebased = rebase_finer(xmp_bim, finer.left, finer.right)
    assert rebased.left.size == finer.left.size
    for word in enumerate_words(xmp_bim.alphabet, 5):
        assert eval_bimachine(rebased, word) == eval_bimachine(xmp_bim, word)
    with pytest.raises(RefinementError):
        rebase_finer(finer, xmp_bim.left, xmp_bim.right)


def test_mirror_bimachine(xmp_bim):
    mirrored = mirror_bimachine(xmp_bim)
    for word in enumerate_words(xmp_bim.alphabet, 5):
        image = eval_bimachine(xmp_bim, word)
        assert eval_bimachine(mirrored, word[::-1]) == (None if image is None else image[::-1])


@given(st.data())
def test_bimachine_to_nft_agrees(data):
    bimachine = data.draw(bimachines())
    word = data.draw(words(bimachine.alphabet, 5))
    assert evaluate(bimachine_to_nft(bimachine), word) == eval_bimachine(bimachine, word)


@given(st.data())
def test_complete_bimachine_agrees(data):
    bimachine = data.draw(bimachines())
    complete = complete_bimachine(bimachine)
    assert complete.is_complete
    word = data.draw(words(bimachine.alphabet, 5))
    assert eval_bimachine(complete, word) == eval_bimachine(bimachine, word)


@given(st.data())
def test_bimachine_round_trip_through_transducers(data):
    bimachine = data.draw(bimachines())
    rebuilt = nft_to_bimachine(bimachine_to_nft(bimachine))
    word = data.draw(words(bimachine.alphabet, 5))
    assert eval_bimachine(rebuilt, word) == eval_bimachine(bimachine, word)


@pytest.mark.parametrize(
    "fixture, variety",
    [("f_ends", "aperiodic"), ("det1", "idempotent"), ("det2", "commutative"), ("det4", "J")],
)
def test_v_transducers_and_complete_v_bimachines_convert_both_ways(load, fixture, variety):
    nft = load(fixture)
    target = get_variety(variety)
    assert in_variety(transition_monoid(underlying_automaton(nft))[0], target)
    bimachine = nft_to_bimachine(nft)
    assert is_v_bimachine(bimachine, target)
    assert is_v_language(bimachine_domain(bimachine), target)
    complete = complete_bimachine(bimachine)
    assert complete.is_complete
    assert is_v_bimachine(complete, target)
    back = bimachine_to_nft(complete)
    assert is_unambiguous_nft(back)
    assert in_variety(transition_monoid(underlying_automaton(back))[0], target)
    for word in enumerate_words(nft.alphabet, 4):
        expected = evaluate(nft, word)
        assert eval_bimachine(complete, word) == expected
        assert evaluate(back, word) == expected
