import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.exceptions import InputError, InvariantViolation, UnsupportedVarietyError
from app.models.automata import Partition
from app.services.monoid import (
    FiniteMonoid,
    aperiodicity_witness,
    BUILTIN_VARIETIES,
    get_variety,
    in_variety,
    is_counter_free,
    monoid_congruence_closure,
    parse_equations,
    quotient_monoid,
    refines,
    satisfies,
    syntactic_monoid,
    transition_monoid,
    violated_equation,
    word_classes,
)
from app.services.automata import minimize
from app.services.words import enumerate_words
from tests.oracles import dfa_accepts
from tests.strategies import dfas, words

L_ENDS_TABLE = {
    ("a", "a"): "a",
    ("a", "b"): "ab",
    ("a", "ab"): "ab",
    ("a", "ba"): "a",
    ("b", "a"): "ba",
    ("b", "b"): "b",
    ("b", "ab"): "b",
    ("b", "ba"): "ba",
    ("ab", "a"): "a",
    ("ab", "b"): "ab",
    ("ab", "ab"): "ab",
    ("ab", "ba"): "a",
    ("ba", "a"): "ba",
    ("ba", "b"): "b",
    ("ba", "ab"): "b",
    ("ba", "ba"): "ba",
}


@pytest.fixture
def ends_monoid(l_ends):
    return syntactic_monoid(l_ends)


def test_syntactic_monoid_of_l_ends(ends_monoid):
    labels = [ends_monoid.label(x) for x in range(ends_monoid.size)]
    assert labels == ["ε", "a", "b", "ab", "ba"]
    assert ends_monoid.identity == 0
    for (x, y), product in L_ENDS_TABLE.items():
        assert ends_monoid.label(ends_monoid.multiply(labels.index(x), labels.index(y))) == product


def test_l_ends_varieties(ends_monoid):
    assert in_variety(ends_monoid, get_variety("aperiodic"))
    assert in_variety(ends_monoid, get_variety("idempotent"))
    assert in_variety(ends_monoid, get_variety("DA"))
    assert not in_variety(ends_monoid, get_variety("commutative"))
    assert not in_variety(ends_monoid, get_variety("J"))


def test_violated_equation_reports_an_assignment(ends_monoid):
    equation, env = violated_equation(ends_monoid, get_variety("Com"))
    assert str(equation) == "x y = y x"
    x, y = env["x"], env["y"]
    assert ends_monoid.multiply(x, y) != ends_monoid.multiply(y, x)
    assert violated_equation(ends_monoid, get_variety("FO")) is None


def test_even_length_monoid_is_a_group(load):
    monoid = syntactic_monoid(load("l_even"))
    assert monoid.size == 2
    assert monoid.cycle(1) == (1, 2)
    assert monoid.omega(1) == monoid.identity
    assert monoid.idempotent_power == 2
    assert aperiodicity_witness(monoid) == (1, 2)
    assert not in_variety(monoid, get_variety("aperiodic"))
    assert in_variety(monoid, get_variety("commutative"))


def test_from_table_checks_the_axioms():
    z2 = FiniteMonoid.from_table([[0, 1], [1, 0]], labels=["e", "g"])
    assert z2.omega(1) == 0
    assert z2.label(1) == "g"
    with pytest.raises(InvariantViolation):
        FiniteMonoid.from_table([[0, 1, 2], [1, 2, 1], [2, 1, 1]])


def test_counter_freeness(load, l_ends):
    assert is_counter_free(l_ends)
    dis = load("dis")
    assert not is_counter_free(dis)
    assert in_variety(syntactic_monoid(dis), get_variety("aperiodic"))


def test_parse_equations():
    assert len(parse_equations("x^w = x^(w+1)")) == 1
    chain = parse_equations("y(xy)^ω = (xy)^ω = (xy)^ω x")
    assert len(chain) == 2
    assert str(chain[0]) == "y (x y)^w = (x y)^w"
    assert chain[0].variables == ("x", "y")
    assert str(parse_equations("xy = 1")[0]) == "x y = 1"


@pytest.mark.parametrize("text", ["2x = x", "xy", "x^ = x", "(xy = yx", "x = y?"])
def test_parse_equations_rejects_malformed_text(text):
    with pytest.raises(InputError):
        parse_equations(text)


def test_parse_equations_rejects_undeclared_variables():
    with pytest.raises(InputError):
        parse_equations("xy = yx", variables=["x"])


def test_unknown_variety():
    with pytest.raises(UnsupportedVarietyError):
        get_variety("nilpotent")
    assert get_variety("A").name == "aperiodic"


def test_congruence_closure_and_quotient(ends_monoid):
    labels = [ends_monoid.label(x) for x in range(ends_monoid.size)]
    congruence = monoid_congruence_closure(
        ends_monoid, [(labels.index("ab"), labels.index("ba"))]
    )
    assert len(congruence) == 2
    quotient = quotient_monoid(ends_monoid, congruence)
    assert quotient.size == 2
    assert in_variety(quotient, get_variety("J1"))


def test_satisfies_single_equations(ends_monoid):
    assert satisfies(ends_monoid, get_variety("idempotent").equations[0])
    assert not satisfies(ends_monoid, get_variety("Com").equations[0])


def test_refines():
    numbers = range(6)
    by_value = Partition.from_key(numbers, lambda n: n)
    by_parity = Partition.from_key(numbers, lambda n: n % 2)
    by_half = Partition.from_key(numbers, lambda n: n < 3)
    assert refines(by_value, by_parity)
    assert refines(by_parity, by_parity)
    assert not refines(by_parity, by_value)
    assert not refines(by_parity, by_half)
    with pytest.raises(InputError):
        refines(by_parity, Partition.from_key(range(4), lambda n: n % 2))


def test_word_classes(ends_monoid):
    classes = word_classes(ends_monoid, ["a", "aa", "aba", "ab"])
    assert len(classes) == 2
    assert classes.block_of("a") == frozenset({"a", "aa", "aba"})


def test_transition_monoid_is_cached(l_ends):
    first, _ = transition_monoid(l_ends)
    second, _ = transition_monoid(l_ends)
    assert first is second


@given(st.data())
def test_transition_monoid_is_a_morphism(data):
    dfa = data.draw(dfas(max_states=4, alphabet=("a", "b")))
    monoid, _ = transition_monoid(dfa)
    u, v = data.draw(words(dfa.alphabet, 4)), data.draw(words(dfa.alphabet, 4))
    assert monoid.element_of(u + v) == monoid.multiply(monoid.element_of(u), monoid.element_of(v))


@given(st.data())
def test_equal_elements_have_equal_contexts(data):
    dfa = data.draw(dfas(max_states=4, alphabet=("a", "b")))
    monoid = syntactic_monoid(dfa)
    u, v = data.draw(words(dfa.alphabet, 4)), data.draw(words(dfa.alphabet, 4))
    x, y = data.draw(words(dfa.alphabet, 3)), data.draw(words(dfa.alphabet, 3))
    if monoid.element_of(u) == monoid.element_of(v):
        assert dfa_accepts(dfa, x + u + y) == dfa_accepts(dfa, x + v + y)


@given(st.data())
def test_minimal_automaton_monoid_is_a_quotient(data):
    dfa = data.draw(dfas(max_states=4, alphabet=("a", "b")))
    sample = list(enumerate_words(dfa.alphabet, 4))
    original, _ = transition_monoid(dfa)
    reduced, _ = transition_monoid(minimize(dfa))
    assert refines(word_classes(original, sample), word_classes(reduced, sample))
    assert reduced.size <= original.size


@pytest.mark.parametrize("name", sorted(BUILTIN_VARIETIES))
@given(data=st.data())
def test_varieties_are_closed_under_quotients(name, data):
    variety = get_variety(name)
    dfa = data.draw(dfas(max_states=3, alphabet=("a", "b")))
    monoid, _ = transition_monoid(dfa)
    pairs = data.draw(
        st.lists(
            st.tuples(st.integers(0, monoid.size - 1), st.integers(0, monoid.size - 1)),
            max_size=2,
        )
    )
    quotient = quotient_monoid(monoid, monoid_congruence_closure(monoid, pairs))
    sample = list(enumerate_words(dfa.alphabet, 3))
    assert refines(word_classes(monoid, sample), word_classes(quotient, sample))
    if in_variety(monoid, variety):
        assert in_variety(quotient, variety)
