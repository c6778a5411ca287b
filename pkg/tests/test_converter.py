import pytest
import yaml

from app.exceptions import InputError
from app.models.automata import Dfa
from app.models.variety import VarietySpec
from app.services.converter import MachineConverter
from app.services.monoid import in_variety, syntactic_monoid
from tests.conftest import fixture_path, load_fixture

MACHINES = ["f_ends", "f_even", "identity", "l_ends", "l_even", "xmp_bim", "g_dft", "detxmp", "v_bim", "dis"]


@pytest.mark.parametrize("name", MACHINES)
def test_dump_then_parse_rebuilds_the_machine(name):
    machine = load_fixture(name)
    assert MachineConverter.parse(MachineConverter.dump(machine)) == machine


@pytest.mark.parametrize("name", ["f_ends_translation", "com_variety"])
def test_dump_is_stable(name):
    text = MachineConverter.dump(load_fixture(name))
    assert MachineConverter.dump(MachineConverter.parse(text)) == text


def test_states_default_to_order_of_mention(load):
    l_even = load("l_even")
    assert l_even.states == ("0", "1")
    assert l_even.finals == frozenset({0})


def test_translation_components_take_their_side(f_ends_translation):
    assert all(dfa.orientation == "left" for dfa in f_ends_translation.left.values())
    assert all(dfa.orientation == "right" for dfa in f_ends_translation.right.values())
    assert f_ends_translation.outputs == ("", "a")
    assert f_ends_translation.initial[""].name == "top"


def test_parse_variety_block(load):
    variety = load("com_variety")
    assert isinstance(variety, VarietySpec)
    assert [str(eq) for eq in variety.equations] == ["x y = y x", "x = x^2"]
    assert variety.logic == "FO1 without order"
    assert in_variety(syntactic_monoid(load("l_even")), variety) is False


def test_parse_all_reads_several_blocks():
    text = MachineConverter.dump(load_fixture("l_ends")) + MachineConverter.dump(load_fixture("identity"))
    blocks = MachineConverter.parse_all(text)
    assert [block.name for block in blocks] == ["l_ends", "identity"]
    with pytest.raises(InputError):
        MachineConverter.parse(text)


@pytest.mark.parametrize(
    "text, line",
    [
        ('@nft t\nalphabet a\ninitial p ""\ntrans p b q "x"\n', "4"),
        ("@dfa d\nalphabet a\nfoo 1\n", "3"),
        ("@dfa d\ninitial 0\n", "1"),
        ('@nft t\nalphabet a\ninitial p "x\n', "3"),
        ("@dfa d\nalphabet a\ninitial 0\ntrans 0 a 1\ntrans 0 a 0\n", "5"),
        ("@dfa d\nalphabet a\nstates 0\ninitial 1\n", "4"),
        ("@bimachine b\nalphabet a\nleft\n  initial 0\n", "3"),
        ("alphabet a\n", "1"),
        ('@translation t\nalphabet a\nphi< 1 a "" = maybe\n', "3"),
    ],
)
def test_errors_name_their_line(text, line):
    with pytest.raises(InputError) as exc:
        MachineConverter.parse(text)
    assert exc.value.details["line"] == line
    assert exc.value.message.startswith(f"line {line}:")


def test_invalid_models_are_input_errors():
    with pytest.raises(InputError):
        MachineConverter.parse("@dfa d\nalphabet a a\ninitial 0\n")


def test_parse_file_reports_missing_files(tmp_path):
    with pytest.raises(InputError):
        MachineConverter.parse_file(tmp_path / "missing.txt")
    assert MachineConverter.parse_file(fixture_path("l_ends")).name == "l_ends"


def test_right_components_keep_their_orientation_line():
    dfa = Dfa(
        name="R",
        alphabet=("a",),
        states=("0", "1"),
        initial=0,
        finals=frozenset({1}),
        delta={(0, "a"): 1, (1, "a"): 1},
        orientation="right",
    )
    text = MachineConverter.dump(dfa)
    assert "orientation right" in text
    assert MachineConverter.parse(text) == dfa


def test_dump_monoid(load):
    text = MachineConverter.dump_monoid(syntactic_monoid(load("l_even")), "M")
    assert text.splitlines() == [
        "@monoid M",
        "elements ε a",
        "identity ε",
        "generator a a",
        "idempotent-power 2",
        "table",
        "  ε | ε a",
        "  a | a ε",
    ]


def test_yaml_dump_refers_to_states_by_name(l_ends):
    data = yaml.safe_load(MachineConverter.to_yaml(MachineConverter.to_dict(l_ends)))
    assert data["kind"] == "dfa"
    assert data["initial"] == "0"
    assert data["final"] == ["1"]
    assert ["0", "a", "1"] in data["transitions"]


def test_yaml_dump_of_a_bimachine(xmp_bim):
    data = yaml.safe_load(MachineConverter.to_yaml(MachineConverter.to_dict(xmp_bim)))
    assert data["kind"] == "bimachine"
    assert data["left"]["states"] == ["l0", "la", "lb"]
    assert ["la", "a", "ra", "a"] in data["out"]
