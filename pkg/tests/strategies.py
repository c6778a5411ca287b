"""Hypothesis strategies for small random machines."""
from hypothesis import strategies as st

from app.models.automata import Dfa, Nfa
from app.models.bimachine import Bimachine
from app.models.transducer import Dft, Nft
from app.services.bimachine import bimachine_to_nft

LETTERS = "abc"


@st.composite
def alphabets(draw, max_size: int = 3):
    return tuple(LETTERS[: draw(st.integers(1, max_size))])


def words(alphabet, max_size: int = 6):
    return st.text(alphabet="".join(alphabet), max_size=max_size)


def outputs(max_size: int = 2):
    return st.text(alphabet="xy", max_size=max_size)


@st.composite
def dfas(draw, alphabet=None, max_states: int = 6, orientation: str = "left", complete: bool = False):
    alphabet = alphabet or draw(alphabets())
    n = draw(st.integers(1, max_states))
    delta = {}
    for q in range(n):
        for a in alphabet:
            target = draw(st.integers(0 if complete else -1, n - 1))
            if target >= 0:
                delta[(q, a)] = target
    finals = frozenset(q for q in range(n) if draw(st.booleans()))
    return Dfa(
        name="A",
        alphabet=alphabet,
        states=tuple(f"q{i}" for i in range(n)),
        initial=0,
        finals=finals,
        delta=delta,
        orientation=orientation,
    )


@st.composite
def nfas(draw, alphabet=None, max_states: int = 5):
    alphabet = alphabet or draw(alphabets())
    n = draw(st.integers(1, max_states))
    transitions = draw(
        st.frozensets(
            st.tuples(st.integers(0, n - 1), st.sampled_from(alphabet), st.integers(0, n - 1)),
            max_size=2 * n * len(alphabet),
        )
    )
    initials = draw(st.frozensets(st.integers(0, n - 1), min_size=1))
    finals = draw(st.frozensets(st.integers(0, n - 1)))
    return Nfa(
        name="N",
        alphabet=alphabet,
        states=tuple(f"p{i}" for i in range(n)),
        initials=initials,
        finals=finals,
        transitions=transitions,
    )


@st.composite
def dfts(draw, alphabet=None, max_states: int = 4, max_output: int = 2):
    alphabet = alphabet or draw(alphabets(max_size=2))
    n = draw(st.integers(1, max_states))
    delta = {}
    for q in range(n):
        for a in alphabet:
            target = draw(st.integers(-1, n - 1))
            if target >= 0:
                delta[(q, a)] = (target, draw(outputs(max_output)))
    final_outputs = {
        q: draw(outputs(max_output)) for q in range(n) if draw(st.booleans())
    }
    return Dft(
        name="D",
        alphabet=alphabet,
        states=tuple(f"d{i}" for i in range(n)),
        initial=0,
        initial_output=draw(outputs(max_output)),
        final_outputs=final_outputs,
        delta=delta,
    )


@st.composite
def bimachines(draw, alphabet=None, max_states: int = 3, max_output: int = 2, total: bool = False):
    """Bimachines over complete automata; ``total`` makes every output defined."""
    alphabet = alphabet or draw(alphabets(max_size=2))
    left = draw(dfas(alphabet=alphabet, max_states=max_states, complete=True))
    right = draw(dfas(alphabet=alphabet, max_states=max_states, orientation="right", complete=True))
    left = left.model_copy(update={"finals": frozenset(), "name": "L"})
    right = right.model_copy(update={"finals": frozenset(), "name": "R"})

    def maybe():
        if total:
            return draw(outputs(max_output))
        return draw(st.one_of(st.none(), outputs(max_output)))

    omega = {}
    for l in range(left.size):
        for a in alphabet:
            for r in range(right.size):
                value = maybe()
                if value is not None:
                    omega[(l, a, r)] = value
    rho = {l: value for l in range(left.size) if (value := maybe()) is not None}
    lam = {r: value for r in range(right.size) if (value := maybe()) is not None}
    return Bimachine(name="B", left=left, right=right, omega=omega, rho=rho, lam=lam)


@st.composite
def functional_nfts(draw, alphabet=None, max_states: int = 3, max_output: int = 2):
    """Unambiguous transducers read off random bimachines; most are nondeterministic."""
    return bimachine_to_nft(
        draw(bimachines(alphabet=alphabet, max_states=max_states, max_output=max_output))
    )


@st.composite
def lookahead_nfts(draw, alphabet=None, max_states: int = 3, max_output: int = 2):
    """A random DFT that guesses its next letter and emits that step's output early.

    State ``(q, g)`` has already paid the output of reading ``g`` from ``q``; the
    guess ``""`` stands for the end of the input. Runs on a wrong guess die after
    one letter, so the result is unambiguous, nondeterministic and sequential.
    """
    dft = draw(dfts(alphabet=alphabet, max_states=max_states, max_output=max_output))
    guesses = (*dft.alphabet, "")
    pairs = [(q, g) for q in range(dft.size) for g in guesses]
    index = {pair: i for i, pair in enumerate(pairs)}

    def paid(q: int, g: str):
        if not g:
            return dft.final_outputs.get(q)
        step = dft.delta.get((q, g))
        return None if step is None else step[1]

    initial_outputs = {
        index[(dft.initial, g)]: dft.initial_output + out
        for g in guesses
        if (out := paid(dft.initial, g)) is not None
    }
    transitions = {
        (index[(q, a)], a, index[(target, g)]): out
        for (q, a), (target, _) in dft.delta.items()
        for g in guesses
        if (out := paid(target, g)) is not None
    }
    return Nft(
        name="G",
        alphabet=dft.alphabet,
        states=tuple(f"{dft.states[q]}/{g or '$'}" for q, g in pairs),
        initial_outputs=initial_outputs,
        final_outputs={index[(q, "")]: "" for q in dft.final_outputs},
        transitions=transitions,
    )
