import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.exceptions import IncompleteBimachineError, InvariantViolation
from app.models.automata import Dfa
from app.models.translation import Translation
from app.services.bimachine import eval_bimachine
from app.services.monoid import get_variety
from app.services.translation import (
    bimachine_to_translation,
    check_translation,
    eval_translation,
    joint_product,
    translation_to_bimachine,
)
from app.services.transducer import evaluate
from app.services.words import enumerate_words
from tests.oracles import same_function
from tests.strategies import bimachines, words


def top(orientation: str = "left", alphabet: tuple[str, ...] = ("a",)) -> Dfa:
    return Dfa(
        name="top",
        alphabet=alphabet,
        states=("t",),
        initial=0,
        finals=frozenset({0}),
        delta={(0, a): 0 for a in alphabet},
        orientation=orientation,
    )


@pytest.mark.parametrize("word, image", [("abaa", "aaaa"), ("ba", ""), ("", ""), ("a", "a"), ("aab", "")])
def test_eval_translation(f_ends_translation, word, image):
    assert eval_translation(f_ends_translation, word) == image


def test_check_translation_counts_classes(f_ends_translation):
    report = check_translation(f_ends_translation)
    assert report.left_classes == 3
    assert report.right_classes == 3
    assert report.monoid_sizes["phi-i,ε"] == 1
    assert "phi<1,a,ε" in report.monoid_sizes


def test_translation_to_bimachine(f_ends_translation, f_ends):
    bimachine = translation_to_bimachine(f_ends_translation)
    assert bimachine.is_complete
    assert bimachine.left.size == 3
    assert same_function(
        lambda word: eval_bimachine(bimachine, word), lambda word: evaluate(f_ends, word), f_ends.alphabet, 6
    ) is None


def test_bimachine_to_translation(xmp_bim):
    translation = bimachine_to_translation(xmp_bim, get_variety("aperiodic"))
    assert translation.k == xmp_bim.left.size * xmp_bim.right.size == 9
    assert translation.variety == "aperiodic"
    check_translation(translation)
    for word in enumerate_words(xmp_bim.alphabet, 5):
        assert eval_translation(translation, word) == eval_bimachine(xmp_bim, word)


def test_bimachine_to_translation_needs_total_outputs(load):
    with pytest.raises(IncompleteBimachineError):
        bimachine_to_translation(load("v_bim"))


def test_overlapping_formulas_are_rejected():
    translation = Translation(
        name="two",
        alphabet=("a",),
        k=1,
        outputs=("x", "y"),
        left={(1, "a", "x"): top(), (1, "a", "y"): top()},
        right={(1, "a", "x"): top("right"), (1, "a", "y"): top("right")},
        initial={"x": top("right")},
        terminal={"x": top()},
    )
    with pytest.raises(InvariantViolation):
        check_translation(translation)
    with pytest.raises(InvariantViolation):
        eval_translation(translation, "a")
    assert eval_translation(translation, "") == "xx"


def test_missing_outputs_are_rejected():
    translation = Translation(
        name="none", alphabet=("a",), k=1, outputs=("x",), initial={"x": top("right")}
    )
    assert eval_translation(translation, "a") is None
    with pytest.raises(InvariantViolation) as exc:
        check_translation(translation)
    assert exc.value.details["letter"] == "a"


def test_components_must_lie_in_the_variety(load):
    even = load("l_even")
    translation = Translation(
        name="parity",
        alphabet=("a",),
        k=1,
        outputs=("x", ""),
        variety="aperiodic",
        left={(1, "a", "x"): even, (1, "a", ""): top()},
        right={(1, "a", "x"): top("right"), (1, "a", ""): top("right")},
    )
    with pytest.raises(InvariantViolation):
        check_translation(translation)


def test_joint_product_shares_equal_components():
    product = joint_product([top(), top()], ("a",), "left", "P")
    assert len(product.components) == 1
    assert product.automaton.size == 1
    assert product.holds(top(), 0)


@given(st.data())
def test_bimachine_translation_round_trip(data):
    bimachine = data.draw(bimachines(total=True))
    translation = bimachine_to_translation(bimachine)
    word = data.draw(words(bimachine.alphabet, 4))
    assert eval_translation(translation, word) == eval_bimachine(bimachine, word)


def test_left_only_formulas_give_a_trivial_right_automaton():
    letters = ("a", "b")
    after_a = Dfa(
        name="after_a",
        alphabet=letters,
        states=("other", "a"),
        initial=0,
        finals=frozenset({1}),
        delta={(0, "a"): 1, (0, "b"): 0, (1, "a"): 1, (1, "b"): 0},
    )
    not_after_a = after_a.model_copy(update={"name": "not_after_a", "finals": frozenset({0})})
    everything = top("right", letters)
    translation = Translation(
        name="doubled",
        alphabet=letters,
        k=1,
        outputs=("", "x"),
        left={
            (1, "a", "x"): after_a,
            (1, "a", ""): not_after_a,
            (1, "b", ""): top("left", letters),
        },
        right={(1, "a", "x"): everything, (1, "a", ""): everything, (1, "b", ""): everything},
        initial={"": everything},
        terminal={"": top("left", letters)},
    )
    assert eval_translation(translation, "aab") == "x"
    assert eval_translation(translation, "aaa") == "xx"
    assert eval_translation(translation, "aba") == ""
    bimachine = translation_to_bimachine(translation)
    assert bimachine.right.size == 1
    for word in enumerate_words(letters, 6):
        assert eval_bimachine(bimachine, word) == eval_translation(translation, word)
