"""
Command handlers for the ratfun CLI.

Provides verbs for:
- Evaluating machines on words
- Monoids and variety membership
- Minimization and determinization
- Conversions between transducers, bimachines and translations
- Canonical bimachines and definability decisions
"""
from __future__ import annotations

import argparse
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from app.exceptions import InputError, PreconditionError
from app.models.automata import Dfa, Nfa
from app.models.bimachine import Bimachine
from app.models.transducer import Dft, Nft
from app.models.translation import Translation
from app.models.variety import VarietySpec
from app.services.automata import accepts, determinize, minimize
from app.services.bimachine import (
    bimachine_to_nft,
    complete_bimachine,
    eval_bimachine,
    is_v_bimachine,
    nft_to_bimachine,
)
from app.services.canonical import Decision, canonical_bimachine, decide_fo, decide_variety_unambiguous
from app.services.converter import Machine, MachineConverter
from app.services.monoid import (
    FiniteMonoid,
    get_variety,
    in_variety,
    syntactic_monoid,
    transition_monoid,
    violated_equation,
)
from app.services.transducer import (
    decide_variety_dft,
    determinize_nft,
    disambiguate,
    evaluate,
    minimize_dft,
    underlying_automaton,
)
from app.services.translation import (
    bimachine_to_translation,
    check_translation,
    eval_translation,
    translation_to_bimachine,
)
from app.services.words import check_word

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """What a verb produced: text and YAML renderings, exit code and trailer lines."""

    text: str
    data: Any
    exit_code: int = 0
    trailer: dict[str, str] = field(default_factory=dict)


Handler = Callable[[argparse.Namespace], CommandResult]


@dataclass
class Command:
    name: str
    help: str
    handler: Handler
    arguments: list[tuple[tuple[str, ...], dict[str, Any]]]


class CommandRouter:
    """Collects verbs and builds their sub-parsers."""

    def __init__(self) -> None:
        self.commands: dict[str, Command] = {}

    def command(self, name: str, help: str, *arguments: tuple[tuple[str, ...], dict[str, Any]]):
        def register(handler: Handler) -> Handler:
            self.commands[name] = Command(name, help, handler, list(arguments))
            return handler

        return register

    def install(self, subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
        for command in self.commands.values():
            parser = subparsers.add_parser(
                command.name, help=command.help, description=command.handler.__doc__, parents=parents
            )
            for flags, options in command.arguments:
                parser.add_argument(*flags, **options)
            parser.set_defaults(handler=command.handler)


def argument(*flags: str, **options: Any) -> tuple[tuple[str, ...], dict[str, Any]]:
    return flags, options


router = CommandRouter()

FILE = argument("file", help="Input file in the machine text format")


def _load(path: str, *kinds: type, verb: str) -> Machine:
    machine = MachineConverter.parse_file(path)
    if not isinstance(machine, kinds):
        expected = ", ".join(f"@{kind.__name__.lower()}" for kind in kinds)
        raise InputError(
            f"{verb} expects {expected}, got @{type(machine).__name__.lower()}", {"path": path}
        )
    return machine


def _variety(args: argparse.Namespace) -> VarietySpec:
    if getattr(args, "spec", None):
        return _load(args.spec, VarietySpec, verb="--spec")
    return get_variety(args.variety)


def _machine_result(machine: Machine, exit_code: int = 0, trailer: Optional[dict[str, str]] = None) -> CommandResult:
    return CommandResult(
        text=MachineConverter.dump(machine),
        data=MachineConverter.to_dict(machine),
        exit_code=exit_code,
        trailer=trailer or {},
    )


def _monoid_of(machine: Machine, syntactic: bool) -> FiniteMonoid:
    if isinstance(machine, (Nft, Dft)):
        automaton: Union[Nfa, Dfa] = underlying_automaton(machine)
    elif isinstance(machine, (Nfa, Dfa)):
        automaton = machine
    else:
        raise InputError(f"no monoid for a @{type(machine).__name__.lower()} block")
    return syntactic_monoid(automaton) if syntactic else transition_monoid(automaton)[0]


def _decision_result(decision: Decision) -> CommandResult:
    verdict = "yes" if decision.verdict else "no"
    artifacts = [a for a in (decision.nft, decision.bimachine, decision.translation) if a is not None]
    text = "\n".join([verdict, *(MachineConverter.dump(a) for a in artifacts)])
    data: dict[str, Any] = {"verdict": verdict, "variety": decision.variety}
    if decision.witness is not None:
        data["witness"] = decision.witness.trailer()
    for key, artifact in (
        ("transducer", decision.nft),
        ("bimachine", decision.bimachine),
        ("translation", decision.translation),
    ):
        if artifact is not None:
            data[key] = MachineConverter.to_dict(artifact)
    return CommandResult(
        text=text if text.endswith("\n") else text + "\n",
        data=data,
        exit_code=0 if decision.verdict else 1,
        trailer=decision.trailer(),
    )


@router.command(
    "eval",
    "Evaluate a machine on a word",
    FILE,
    argument("word", help='Input word; "" is the empty word'),
)
def eval_command(args: argparse.Namespace) -> CommandResult:
    """
    Evaluate an automaton, transducer, bimachine or translation on a word.

    Automata print accepted or rejected. Functions print their output; a word
    outside the domain prints nothing and exits 1.
    """
    machine = _load(args.file, Nfa, Dfa, Nft, Dft, Bimachine, Translation, verb="eval")
    word = check_word(machine.alphabet, args.word)
    if isinstance(machine, (Nfa, Dfa)):
        accepted = accepts(machine, word)
        return CommandResult(
            text="accepted\n" if accepted else "rejected\n",
            data={"word": word, "accepted": accepted},
            exit_code=0 if accepted else 1,
        )
    if isinstance(machine, Bimachine):
        result = eval_bimachine(machine, word)
    elif isinstance(machine, Translation):
        check_translation(machine)
        result = eval_translation(machine, word)
    else:
        result = evaluate(machine, word)
    if result is None:
        return CommandResult(
            text="", data={"word": word, "defined": False}, exit_code=1, trailer={"defined": "false"}
        )
    return CommandResult(text=result + "\n", data={"word": word, "defined": True, "output": result})


@router.command(
    "monoid",
    "Print the transition monoid of an automaton or transducer",
    FILE,
    argument("--table", action="store_true", help="Include the multiplication table"),
    argument("--syntactic", action="store_true", help="Use the syntactic monoid of the language"),
)
def monoid_command(args: argparse.Namespace) -> CommandResult:
    """Transition monoid (or syntactic monoid) with elements named by representatives."""
    machine = _load(args.file, Nfa, Dfa, Nft, Dft, verb="monoid")
    monoid = _monoid_of(machine, args.syntactic)
    text = MachineConverter.dump_monoid(monoid, f"M({machine.name})")
    if not args.table:
        text = text.split("table\n", 1)[0]
    data = MachineConverter.to_dict(monoid)
    if not args.table:
        data.pop("table")
    return CommandResult(text=text, data=data)


@router.command(
    "check",
    "Check that a machine lies in a variety",
    FILE,
    argument("--variety", default=None, help="Built-in variety name (aperiodic, J, DA, ...)"),
    argument("--spec", default=None, help="File holding a @variety block"),
    argument("--syntactic", action="store_true", help="Check the recognized language instead"),
)
def check_command(args: argparse.Namespace) -> CommandResult:
    """
    Check variety membership.

    Automata and transducers are checked on their transition monoid, bimachines
    on both automata and translations on every component.
    """
    if (args.variety is None) == (args.spec is None):
        raise InputError("give exactly one of --variety and --spec")
    variety = _variety(args)
    machine = _load(args.file, Nfa, Dfa, Nft, Dft, Bimachine, Translation, verb="check")
    trailer: dict[str, str] = {"variety": variety.name}
    if isinstance(machine, Bimachine):
        member = is_v_bimachine(machine, variety)
    elif isinstance(machine, Translation):
        member = all(in_variety(syntactic_monoid(dfa), variety) for dfa in machine.components())
    else:
        monoid = _monoid_of(machine, args.syntactic)
        found = violated_equation(monoid, variety)
        member = found is None
        if found is not None:
            equation, env = found
            trailer["witness_equation"] = str(equation)
            trailer.update({f"witness_{var}": monoid.label(x) for var, x in env.items()})
    verdict = "yes" if member else "no"
    return CommandResult(
        text=verdict + "\n",
        data={"verdict": verdict, **trailer},
        exit_code=0 if member else 1,
        trailer=trailer,
    )


@router.command("minimize", "Minimize a deterministic transducer or an automaton", FILE)
def minimize_command(args: argparse.Namespace) -> CommandResult:
    """Minimal DFT (outputs pushed towards the initial state) or minimal DFA."""
    machine = _load(args.file, Dft, Nfa, Dfa, verb="minimize")
    if isinstance(machine, Dft):
        return _machine_result(minimize_dft(machine))
    return _machine_result(minimize(machine))


@router.command("determinize", "Determinize a transducer or an automaton", FILE)
def determinize_command(args: argparse.Namespace) -> CommandResult:
    """Subsequential transducer equivalent to a functional NFT, or subset automaton."""
    machine = _load(args.file, Nft, Dft, Nfa, Dfa, verb="determinize")
    if isinstance(machine, (Nft, Dft)):
        return _machine_result(determinize_nft(machine))
    return _machine_result(determinize(machine))


@router.command(
    "to-bimachine",
    "Convert an unambiguous transducer to a bimachine",
    FILE,
    argument("--disambiguate", action="store_true", help="Disambiguate the transducer first"),
)
def to_bimachine_command(args: argparse.Namespace) -> CommandResult:
    """Bimachine over the transition monoid of the transducer."""
    machine = _load(args.file, Nft, Dft, verb="to-bimachine")
    if args.disambiguate:
        machine = disambiguate(machine)
    return _machine_result(nft_to_bimachine(machine))


@router.command("from-bimachine", "Convert a bimachine to a transducer", FILE)
def from_bimachine_command(args: argparse.Namespace) -> CommandResult:
    """Unambiguous transducer on pairs of left and right states."""
    machine = _load(args.file, Bimachine, verb="from-bimachine")
    return _machine_result(bimachine_to_nft(machine))


@router.command(
    "canonical",
    "Build the canonical bimachine of a functional transducer",
    FILE,
    argument("--right", default=None, help="Right automaton refining the left syntactic congruence"),
    argument("--trace", action="store_true", help="List the class merges and their verdicts"),
)
def canonical_command(args: argparse.Namespace) -> CommandResult:
    """
    Canonical bimachine ``B^R``.

    Without ``--right`` the right automaton is the left syntactic congruence and
    the result is ``B⁰``.
    """
    machine = _load(args.file, Nft, Dft, verb="canonical")
    right = None
    if args.right:
        right = _load(args.right, Dfa, verb="--right")
        if right.orientation != "right":
            raise InputError("the --right automaton must be right-oriented", {"path": args.right})
    canonical = canonical_bimachine(machine, right)
    result = _machine_result(canonical.bimachine)
    result.trailer = {
        "left_classes": str(canonical.left.size),
        "right_classes": str(canonical.right.size),
        "right": canonical.right_kind,
    }
    if args.trace:
        result.text += "".join(f"# trace {record}\n" for record in canonical.trace)
        result.data["trace"] = [
            {"first": r.first, "second": r.second, "verdict": r.verdict} for r in canonical.trace
        ]
    return result


@router.command("decide-fo", "Decide FO-definability of a functional transducer", FILE)
def decide_fo_command(args: argparse.Namespace) -> CommandResult:
    """Yes prints an aperiodic transducer, bimachine and translation; no prints a witness."""
    machine = _load(args.file, Nft, Dft, verb="decide-fo")
    return _decision_result(decide_fo(machine))


@router.command(
    "decide",
    "Decide definability by an unambiguous V-transducer",
    FILE,
    argument("--variety", default=None, help="Built-in variety name"),
    argument("--spec", default=None, help="File holding a @variety block"),
    argument("--unambiguous", action="store_true", help="Decide the unambiguous variant"),
)
def decide_command(args: argparse.Namespace) -> CommandResult:
    """Search the congruences between the canonical and syntactic right congruences."""
    if not args.unambiguous:
        raise PreconditionError(
            "only definability by unambiguous transducers is decided; pass --unambiguous"
        )
    if (args.variety is None) == (args.spec is None):
        raise InputError("give exactly one of --variety and --spec")
    machine = _load(args.file, Nft, Dft, verb="decide")
    return _decision_result(decide_variety_unambiguous(machine, _variety(args)))


@router.command(
    "decide-dft",
    "Decide definability by a V-DFT",
    FILE,
    argument("--variety", default=None, help="Built-in variety name"),
    argument("--spec", default=None, help="File holding a @variety block"),
)
def decide_dft_command(args: argparse.Namespace) -> CommandResult:
    """The minimal DFT decides: its transition monoid must lie in the variety."""
    if (args.variety is None) == (args.spec is None):
        raise InputError("give exactly one of --variety and --spec")
    variety = _variety(args)
    machine = _load(args.file, Dft, verb="decide-dft")
    member, minimal, monoid = decide_variety_dft(machine, variety)
    trailer = {"verdict": "yes" if member else "no", "variety": variety.name}
    if not member:
        found = violated_equation(monoid, variety)
        if found is not None:
            trailer["witness_equation"] = str(found[0])
    result = _machine_result(minimal, exit_code=0 if member else 1, trailer=trailer)
    result.text = f"{trailer['verdict']}\n{result.text}"
    result.data = {"verdict": trailer["verdict"], "variety": variety.name, "transducer": result.data}
    return result


@router.command(
    "translate",
    "Convert a complete bimachine to a translation",
    FILE,
    argument("--variety", default="all", help="Variety tag of the components"),
    argument("--complete", action="store_true", help="Complete the bimachine first"),
)
def translate_command(args: argparse.Namespace) -> CommandResult:
    """Translation whose components are the state languages of the bimachine."""
    machine = _load(args.file, Bimachine, verb="translate")
    if args.complete:
        machine = complete_bimachine(machine)
    return _machine_result(bimachine_to_translation(machine, get_variety(args.variety)))


@router.command("untranslate", "Convert a translation to a complete bimachine", FILE)
def untranslate_command(args: argparse.Namespace) -> CommandResult:
    """Complete bimachine over the joint refinement of the components."""
    machine = _load(args.file, Translation, verb="untranslate")
    return _machine_result(translation_to_bimachine(machine))
