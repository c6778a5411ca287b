"""Converter between machine models and the line-oriented text format, plus YAML dumps.

A file holds one or more blocks, each opened by a header line::

    @nft f_ends
    alphabet a b
    states 0 1 2
    initial 0 ""
    final 0 ""
    trans 0 a 1 "a"

Tokens are split like a shell line: ``#`` starts a comment and words are quoted,
``""`` being the empty word. Bimachines and translations nest automata in
sub-blocks closed by ``end``.
"""
from __future__ import annotations

import logging
import shlex
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import yaml
from pydantic import ValidationError

from app.exceptions import InputError
from app.models.automata import Dfa, Nfa, Orientation
from app.models.bimachine import Bimachine
from app.models.transducer import Dft, Nft
from app.models.translation import ComponentKey, Translation
from app.models.variety import VarietySpec
from app.services.automata import minimize
from app.services.monoid import FiniteMonoid, parse_equations

logger = logging.getLogger(__name__)

Machine = Union[Nfa, Dfa, Nft, Dft, Bimachine, Translation, VarietySpec]

HEADERS = ("nfa", "dfa", "nft", "dft", "bimachine", "translation", "variety")


@dataclass
class _Line:
    number: int
    tokens: list[str]
    text: str

    @property
    def keyword(self) -> str:
        return self.tokens[0]

    @property
    def rest(self) -> str:
        """Raw text after the keyword, for lines that are not tokenized."""
        parts = self.text.split(None, 1)
        return parts[1] if len(parts) == 2 else ""

    def error(self, message: str) -> InputError:
        return InputError(f"line {self.number}: {message}", {"line": self.number})


class _Reader:
    def __init__(self, lines: list[_Line]):
        self.lines = lines
        self.position = 0

    def peek(self) -> Optional[_Line]:
        return self.lines[self.position] if self.position < len(self.lines) else None

    def next(self) -> _Line:
        line = self.lines[self.position]
        self.position += 1
        return line

    def body(self) -> Iterator[_Line]:
        """Lines up to the next top-level header."""
        while (line := self.peek()) is not None and not line.keyword.startswith("@"):
            yield self.next()

    def sub_block(self, opener: _Line) -> list[_Line]:
        """Lines up to the matching ``end``."""
        found = []
        while (line := self.peek()) is not None:
            self.next()
            if line.keyword == "end":
                return found
            if line.keyword.startswith("@"):
                raise line.error("nested header inside a sub-block")
            found.append(line)
        raise opener.error("sub-block is not closed by 'end'")


@dataclass
class _MachineText:
    """Raw contents of an automaton or transducer block before validation."""

    kind: str
    name: str
    line: _Line
    alphabet: Optional[tuple[str, ...]] = None
    orientation: Optional[Orientation] = None
    declared: Optional[list[str]] = None
    mentioned: list[str] = field(default_factory=list)
    initial: list[tuple[str, str, _Line]] = field(default_factory=list)
    final: list[tuple[str, str, _Line]] = field(default_factory=list)
    trans: list[tuple[str, str, str, str, _Line]] = field(default_factory=list)

    @property
    def is_transducer(self) -> bool:
        return self.kind in ("nft", "dft")

    def mention(self, name: str, line: _Line) -> None:
        if self.declared is not None and name not in self.declared:
            raise line.error(f"unknown state {name!r}")
        if name not in self.mentioned:
            self.mentioned.append(name)

    def states(self) -> tuple[str, ...]:
        if self.declared is not None:
            return tuple(self.declared)
        return tuple(self.mentioned)


def _quote(word: str) -> str:
    return '"' + word.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _name(text: str) -> str:
    if text and not any(c in text for c in "\"'\\") and shlex.split(text, comments=True) == [text]:
        return text
    return _quote(text)


def _validated(model: type, line: _Line, **values: Any):
    try:
        return model(**values)
    except ValidationError as exc:
        message = "; ".join(str(error["msg"]) for error in exc.errors())
        raise line.error(f"invalid {model.__name__}: {message}") from None


class MachineConverter:
    """Parses and dumps every model of the text format."""

    @staticmethod
    def tokenize(text: str) -> list[_Line]:
        lines: list[_Line] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            try:
                tokens = shlex.split(raw, comments=True)
            except ValueError as exc:
                raise InputError(f"line {number}: {exc}", {"line": number}) from None
            if tokens:
                lines.append(_Line(number, tokens, raw.split("#", 1)[0].strip()))
        return lines

    # ------------------------------------------------------------------
    # Parsing
    # ------------------------------------------------------------------

    @classmethod
    def parse_all(cls, text: str) -> list[Machine]:
        reader = _Reader(cls.tokenize(text))
        blocks: list[Machine] = []
        while (line := reader.peek()) is not None:
            reader.next()
            kind = line.keyword.lstrip("@")
            if not line.keyword.startswith("@") or kind not in HEADERS:
                raise line.error(f"expected a header such as @nft, got {line.keyword!r}")
            name = line.tokens[1] if len(line.tokens) > 1 else kind.upper()
            if kind in ("nfa", "dfa", "nft", "dft"):
                blocks.append(cls._machine(kind, name, line, list(reader.body())))
            elif kind == "bimachine":
                blocks.append(cls._bimachine(name, line, reader))
            elif kind == "translation":
                blocks.append(cls._translation(name, line, reader))
            else:
                blocks.append(cls._variety(name, line, list(reader.body())))
        return blocks

    @classmethod
    def parse(cls, text: str) -> Machine:
        """The single block of ``text``."""
        blocks = cls.parse_all(text)
        if len(blocks) != 1:
            raise InputError(f"expected exactly one block, found {len(blocks)}")
        return blocks[0]

    @classmethod
    def parse_file(cls, path: Union[str, Path]) -> Machine:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}", {"path": path}) from None
        logger.debug(f"Parsing {path}")
        return cls.parse(text)

    @classmethod
    def _read_machine(
        cls,
        kind: str,
        name: str,
        header: _Line,
        lines: list[_Line],
        alphabet: Optional[tuple[str, ...]] = None,
    ) -> _MachineText:
        machine = _MachineText(kind=kind, name=name, line=header, alphabet=alphabet)
        for line in lines:
            args = line.tokens[1:]
            if line.keyword == "alphabet":
                machine.alphabet = tuple(args)
            elif line.keyword == "orientation":
                if args not in (["left"], ["right"]):
                    raise line.error("orientation must be 'left' or 'right'")
                machine.orientation = args[0]
            elif line.keyword == "states":
                machine.declared = list(args)
            elif line.keyword in ("initial", "final"):
                target = machine.initial if line.keyword == "initial" else machine.final
                if machine.is_transducer:
                    if len(args) not in (1, 2):
                        raise line.error(f"expected '{line.keyword} STATE [\"output\"]'")
                    machine.mention(args[0], line)
                    target.append((args[0], args[1] if len(args) == 2 else "", line))
                else:
                    for state in args:
                        machine.mention(state, line)
                        target.append((state, "", line))
            elif line.keyword == "trans":
                if len(args) not in (3, 4) or (len(args) == 4 and not machine.is_transducer):
                    raise line.error("expected 'trans SOURCE LETTER TARGET' with an output for transducers")
                source, letter, target_state = args[:3]
                machine.mention(source, line)
                machine.mention(target_state, line)
                machine.trans.append((source, letter, target_state, args[3] if len(args) == 4 else "", line))
            else:
                raise line.error(f"unknown keyword {line.keyword!r} in @{kind} block")
        if machine.alphabet is None:
            raise header.error(f"@{kind} {name} has no alphabet line")
        letters = set(machine.alphabet)
        for _, letter, _, _, line in machine.trans:
            if letter not in letters:
                raise line.error(f"letter {letter!r} is not in the alphabet")
        return machine

    @classmethod
    def _machine(
        cls,
        kind: str,
        name: str,
        header: _Line,
        lines: list[_Line],
        alphabet: Optional[tuple[str, ...]] = None,
        orientation: Orientation = "left",
    ) -> Union[Nfa, Dfa, Nft, Dft]:
        text = cls._read_machine(kind, name, header, lines, alphabet)
        states = text.states()
        ids = {state: i for i, state in enumerate(states)}
        if kind == "nfa":
            return _validated(
                Nfa,
                header,
                name=name,
                alphabet=text.alphabet,
                states=states,
                initials=frozenset(ids[s] for s, _, _ in text.initial),
                finals=frozenset(ids[s] for s, _, _ in text.final),
                transitions=frozenset((ids[p], a, ids[q]) for p, a, q, _, _ in text.trans),
                orientation=text.orientation or orientation,
            )
        if kind in ("dfa", "dft") and len(text.initial) != 1:
            raise header.error(f"@{kind} {name} needs exactly one initial state")
        if kind == "dfa":
            delta: dict[tuple[int, str], int] = {}
            for p, a, q, _, line in text.trans:
                if delta.setdefault((ids[p], a), ids[q]) != ids[q]:
                    raise line.error(f"second transition from {p!r} on {a!r} in a deterministic block")
            return _validated(
                Dfa,
                header,
                name=name,
                alphabet=text.alphabet,
                states=states,
                initial=ids[text.initial[0][0]],
                finals=frozenset(ids[s] for s, _, _ in text.final),
                delta=delta,
                orientation=text.orientation or orientation,
            )
        if text.orientation == "right":
            raise header.error("transducers are always left-oriented")
        finals: dict[int, str] = {}
        for state, out, line in text.final:
            if finals.setdefault(ids[state], out) != out:
                raise line.error(f"two terminal outputs for state {state!r}")
        if kind == "nft":
            initials: dict[int, str] = {}
            for state, out, line in text.initial:
                if initials.setdefault(ids[state], out) != out:
                    raise line.error(f"two initial outputs for state {state!r}")
            transitions: dict[tuple[int, str, int], str] = {}
            for p, a, q, out, line in text.trans:
                if transitions.setdefault((ids[p], a, ids[q]), out) != out:
                    raise line.error(f"two outputs on transition {p} {a} {q}")
            return _validated(
                Nft,
                header,
                name=name,
                alphabet=text.alphabet,
                states=states,
                initial_outputs=initials,
                final_outputs=finals,
                transitions=transitions,
            )
        moves: dict[tuple[int, str], tuple[int, str]] = {}
        for p, a, q, out, line in text.trans:
            if moves.setdefault((ids[p], a), (ids[q], out)) != (ids[q], out):
                raise line.error(f"second transition from {p!r} on {a!r} in a deterministic block")
        state, out, _ = text.initial[0]
        return _validated(
            Dft,
            header,
            name=name,
            alphabet=text.alphabet,
            states=states,
            initial=ids[state],
            initial_output=out,
            final_outputs=finals,
            delta=moves,
        )

    @classmethod
    def _bimachine(cls, name: str, header: _Line, reader: _Reader) -> Bimachine:
        alphabet: Optional[tuple[str, ...]] = None
        sides: dict[str, Dfa] = {}
        outputs: list[_Line] = []
        for line in reader.body():
            if line.keyword == "alphabet":
                alphabet = tuple(line.tokens[1:])
            elif line.keyword in ("left", "right"):
                if alphabet is None:
                    raise line.error("the alphabet must precede the automata")
                body = reader.sub_block(line)
                sides[line.keyword] = cls._machine(
                    "dfa", f"{line.keyword[0].upper()}({name})", line, body, alphabet, line.keyword
                )
            elif line.keyword in ("out", "term-left", "term-right"):
                outputs.append(line)
            else:
                raise line.error(f"unknown keyword {line.keyword!r} in @bimachine block")
        if set(sides) != {"left", "right"}:
            raise header.error(f"@bimachine {name} needs a left and a right automaton")
        left, right = sides["left"], sides["right"]

        def state(dfa: Dfa, label: str, line: _Line) -> int:
            try:
                return dfa.state_id(label)
            except KeyError:
                raise line.error(f"unknown state {label!r} of {dfa.name}") from None

        omega: dict[tuple[int, str, int], str] = {}
        rho: dict[int, str] = {}
        lam: dict[int, str] = {}
        for line in outputs:
            args = line.tokens[1:]
            if line.keyword == "out":
                if len(args) != 4:
                    raise line.error("expected 'out LEFT LETTER RIGHT \"output\"'")
                key = (state(left, args[0], line), args[1], state(right, args[2], line))
                if omega.setdefault(key, args[3]) != args[3]:
                    raise line.error("two outputs for the same triple")
            else:
                if len(args) != 2:
                    raise line.error(f"expected '{line.keyword} STATE \"output\"'")
                if line.keyword == "term-left":
                    rho[state(left, args[0], line)] = args[1]
                else:
                    lam[state(right, args[0], line)] = args[1]
        return _validated(
            Bimachine, header, name=name, left=left, right=right, omega=omega, rho=rho, lam=lam
        )

    @classmethod
    def _constant(cls, value: bool, alphabet: tuple[str, ...], orientation: Orientation) -> Dfa:
        return Dfa(
            name="top" if value else "bot",
            alphabet=alphabet,
            states=("0",),
            finals=frozenset({0}) if value else frozenset(),
            delta={(0, a): 0 for a in alphabet},
            orientation=orientation,
        )

    @classmethod
    def _component(
        cls, line: _Line, args: list[str], reader: _Reader, alphabet: tuple[str, ...], orientation: Orientation
    ) -> Dfa:
        if args in (["top"], ["bot"]):
            return cls._constant(args == ["top"], alphabet, orientation)
        if not args or args[0] not in ("@dfa", "@nfa"):
            raise line.error("a component is 'top', 'bot' or an '@dfa'/'@nfa' sub-block")
        kind = args[0][1:]
        name = args[1] if len(args) > 1 else kind.upper()
        machine = cls._machine(kind, name, line, reader.sub_block(line), alphabet, orientation)
        if isinstance(machine, Nfa):
            machine = minimize(machine).model_copy(update={"name": name})
        return machine

    @classmethod
    def _translation(cls, name: str, header: _Line, reader: _Reader) -> Translation:
        alphabet: Optional[tuple[str, ...]] = None
        k: Optional[int] = None
        outputs: Optional[tuple[str, ...]] = None
        variety = "all"
        left: dict[ComponentKey, Dfa] = {}
        right: dict[ComponentKey, Dfa] = {}
        initial: dict[str, Dfa] = {}
        terminal: dict[str, Dfa] = {}
        seen: list[str] = []
        for line in reader.body():
            args = line.tokens[1:]
            if line.keyword == "alphabet":
                alphabet = tuple(args)
            elif line.keyword == "k":
                if len(args) != 1 or not args[0].isdigit():
                    raise line.error("expected 'k N'")
                k = int(args[0])
            elif line.keyword == "outputs":
                outputs = tuple(args)
            elif line.keyword == "variety":
                if len(args) != 1:
                    raise line.error("expected 'variety NAME'")
                variety = args[0]
            elif line.keyword in ("phi<", "phi>", "phi-i", "phi-t"):
                if alphabet is None:
                    raise line.error("the alphabet must precede the components")
                if "=" not in args:
                    raise line.error("a component line needs '= top', '= bot' or '= @dfa NAME'")
                split = args.index("=")
                key, value = args[:split], args[split + 1 :]
                orientation: Orientation = "left" if line.keyword in ("phi<", "phi-t") else "right"
                dfa = cls._component(line, value, reader, alphabet, orientation)
                if line.keyword in ("phi<", "phi>"):
                    if len(key) != 3 or not key[0].isdigit():
                        raise line.error(f"expected '{line.keyword} J LETTER \"output\" = ...'")
                    target = left if line.keyword == "phi<" else right
                    target[(int(key[0]), key[1], key[2])] = dfa
                    seen.append(key[2])
                else:
                    if len(key) != 1:
                        raise line.error(f"expected '{line.keyword} \"output\" = ...'")
                    (initial if line.keyword == "phi-i" else terminal)[key[0]] = dfa
                    seen.append(key[0])
            else:
                raise line.error(f"unknown keyword {line.keyword!r} in @translation block")
        if alphabet is None:
            raise header.error(f"@translation {name} has no alphabet line")
        if k is None:
            k = max((j for j, _, _ in [*left, *right]), default=1)
        if outputs is None:
            outputs = tuple(dict.fromkeys(seen))
        return _validated(
            Translation,
            header,
            name=name,
            alphabet=alphabet,
            k=k,
            outputs=outputs,
            variety=variety,
            left=left,
            right=right,
            initial=initial,
            terminal=terminal,
        )

    @classmethod
    def _variety(cls, name: str, header: _Line, lines: list[_Line]) -> VarietySpec:
        equations = []
        logic: Optional[str] = None
        for line in lines:
            if line.keyword == "eq":
                try:
                    equations.extend(parse_equations(line.rest))
                except InputError as exc:
                    raise line.error(exc.message) from None
            elif line.keyword == "logic":
                logic = line.rest
            else:
                raise line.error(f"unknown keyword {line.keyword!r} in @variety block")
        return _validated(VarietySpec, header, name=name, equations=tuple(equations), logic=logic)

    # ------------------------------------------------------------------
    # Text dumps
    # ------------------------------------------------------------------

    @classmethod
    def dump(cls, machine: Machine) -> str:
        """Deterministic text rendering; ``parse(dump(m))`` rebuilds ``m``."""
        if isinstance(machine, Bimachine):
            lines = cls._bimachine_lines(machine)
        elif isinstance(machine, Translation):
            lines = cls._translation_lines(machine)
        elif isinstance(machine, VarietySpec):
            lines = [f"@variety {_name(machine.name)}"]
            lines += [f"eq {equation}" for equation in machine.equations]
            if machine.logic:
                lines.append(f"logic {machine.logic}")
        else:
            kind = type(machine).__name__.lower()
            lines = [f"@{kind} {_name(machine.name)}", "alphabet " + " ".join(machine.alphabet)]
            lines += cls._machine_lines(machine, default_orientation="left")
        return "\n".join(lines) + "\n"

    @classmethod
    def _machine_lines(
        cls, machine: Union[Nfa, Dfa, Nft, Dft], default_orientation: Orientation
    ) -> list[str]:
        names = machine.states
        lines = []
        orientation = getattr(machine, "orientation", "left")
        if orientation != default_orientation:
            lines.append(f"orientation {orientation}")
        lines.append("states " + " ".join(_name(s) for s in names))
        if isinstance(machine, Nfa):
            lines.append(" ".join(["initial", *(_name(names[q]) for q in sorted(machine.initials))]))
            lines.append(" ".join(["final", *(_name(names[q]) for q in sorted(machine.finals))]))
            lines += [f"trans {_name(names[p])} {a} {_name(names[q])}" for p, a, q in machine.sorted_transitions()]
        elif isinstance(machine, Dfa):
            lines.append(f"initial {_name(names[machine.initial])}")
            lines.append(" ".join(["final", *(_name(names[q]) for q in sorted(machine.finals))]))
            lines += [
                f"trans {_name(names[p])} {a} {_name(names[machine.delta[(p, a)]])}"
                for p in range(machine.size)
                for a in machine.alphabet
                if (p, a) in machine.delta
            ]
        elif isinstance(machine, Nft):
            lines += [f"initial {_name(names[q])} {_quote(w)}" for q, w in sorted(machine.initial_outputs.items())]
            lines += [f"final {_name(names[q])} {_quote(w)}" for q, w in sorted(machine.final_outputs.items())]
            lines += [
                f"trans {_name(names[p])} {a} {_name(names[q])} {_quote(w)}"
                for (p, a, q), w in machine.sorted_transitions()
            ]
        else:
            lines.append(f"initial {_name(names[machine.initial])} {_quote(machine.initial_output)}")
            lines += [f"final {_name(names[q])} {_quote(w)}" for q, w in sorted(machine.final_outputs.items())]
            lines += [
                f"trans {_name(names[p])} {a} {_name(names[q])} {_quote(w)}"
                for p in range(machine.size)
                for a in machine.alphabet
                if (p, a) in machine.delta
                for q, w in [machine.delta[(p, a)]]
            ]
        return lines

    @classmethod
    def _bimachine_lines(cls, bimachine: Bimachine) -> list[str]:
        left, right = bimachine.left, bimachine.right
        lines = [f"@bimachine {_name(bimachine.name)}", "alphabet " + " ".join(bimachine.alphabet)]
        for side, dfa in (("left", left), ("right", right)):
            lines.append(side)
            lines += ["  " + line for line in cls._machine_lines(dfa, default_orientation=side)]
            lines.append("end")
        lines += [
            f"out {_name(left.states[l])} {a} {_name(right.states[r])} {_quote(bimachine.omega[(l, a, r)])}"
            for l in range(left.size)
            for a in bimachine.alphabet
            for r in range(right.size)
            if (l, a, r) in bimachine.omega
        ]
        lines += [f"term-left {_name(left.states[l])} {_quote(w)}" for l, w in sorted(bimachine.rho.items())]
        lines += [f"term-right {_name(right.states[r])} {_quote(w)}" for r, w in sorted(bimachine.lam.items())]
        return lines

    @classmethod
    def _component_lines(cls, head: str, dfa: Dfa, orientation: Orientation) -> list[str]:
        if dfa.size == 1 and dfa.is_complete:
            return [f"{head} = {'top' if dfa.finals else 'bot'}"]
        lines = [f"{head} = @dfa {_name(dfa.name)}"]
        lines += ["  " + line for line in cls._machine_lines(dfa, default_orientation=orientation)]
        lines.append("end")
        return lines

    @classmethod
    def _translation_lines(cls, translation: Translation) -> list[str]:
        lines = [
            f"@translation {_name(translation.name)}",
            "alphabet " + " ".join(translation.alphabet),
            f"k {translation.k}",
            "outputs " + " ".join(_quote(v) for v in translation.outputs),
            f"variety {translation.variety}",
        ]
        order = {a: i for i, a in enumerate(translation.alphabet)}

        def ranked(key: ComponentKey) -> tuple:
            j, a, v = key
            return (j, order[a], translation.outputs.index(v))

        for symbol, components, orientation in (
            ("phi<", translation.left, "left"),
            ("phi>", translation.right, "right"),
        ):
            for key in sorted(components, key=ranked):
                j, a, v = key
                lines += cls._component_lines(f"{symbol} {j} {a} {_quote(v)}", components[key], orientation)
        for symbol, components, orientation in (
            ("phi-i", translation.initial, "right"),
            ("phi-t", translation.terminal, "left"),
        ):
            for v in sorted(components, key=translation.outputs.index):
                lines += cls._component_lines(f"{symbol} {_quote(v)}", components[v], orientation)
        return lines

    @classmethod
    def dump_monoid(cls, monoid: FiniteMonoid, name: str = "M") -> str:
        """Elements by representative, generator images and the multiplication table."""
        labels = [monoid.label(x) for x in range(monoid.size)]
        width = max(len(label) for label in labels)
        lines = [
            f"@monoid {_name(name)}",
            "elements " + " ".join(labels),
            f"identity {labels[monoid.identity]}",
        ]
        lines += [f"generator {a} {labels[g]}" for a, g in monoid.generators.items()]
        lines.append(f"idempotent-power {monoid.idempotent_power}")
        lines.append("table")
        for x in range(monoid.size):
            row = " ".join(labels[y].ljust(width) for y in monoid.table[x]).rstrip()
            lines.append(f"  {labels[x].ljust(width)} | {row}")
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------
    # YAML
    # ------------------------------------------------------------------

    @classmethod
    def to_dict(cls, machine: Union[Machine, FiniteMonoid]) -> dict[str, Any]:
        """Plain structure for YAML output, with states referred to by name."""
        if isinstance(machine, FiniteMonoid):
            labels = [machine.label(x) for x in range(machine.size)]
            return {
                "kind": "monoid",
                "elements": labels,
                "identity": labels[machine.identity],
                "generators": {a: labels[g] for a, g in machine.generators.items()},
                "idempotent_power": machine.idempotent_power,
                "table": {labels[x]: [labels[y] for y in machine.table[x]] for x in range(machine.size)},
            }
        if isinstance(machine, VarietySpec):
            return {
                "kind": "variety",
                "name": machine.name,
                "equations": [str(eq) for eq in machine.equations],
                "logic": machine.logic,
            }
        if isinstance(machine, Bimachine):
            left, right = machine.left, machine.right
            return {
                "kind": "bimachine",
                "name": machine.name,
                "alphabet": list(machine.alphabet),
                "left": cls.to_dict(left),
                "right": cls.to_dict(right),
                "out": [
                    [left.states[l], a, right.states[r], w]
                    for (l, a, r), w in sorted(machine.omega.items())
                ],
                "term_left": {left.states[l]: w for l, w in sorted(machine.rho.items())},
                "term_right": {right.states[r]: w for r, w in sorted(machine.lam.items())},
            }
        if isinstance(machine, Translation):
            return {
                "kind": "translation",
                "name": machine.name,
                "alphabet": list(machine.alphabet),
                "k": machine.k,
                "outputs": list(machine.outputs),
                "variety": machine.variety,
                "left": [
                    {"j": j, "letter": a, "output": v, "language": cls.to_dict(dfa)}
                    for (j, a, v), dfa in sorted(machine.left.items())
                ],
                "right": [
                    {"j": j, "letter": a, "output": v, "language": cls.to_dict(dfa)}
                    for (j, a, v), dfa in sorted(machine.right.items())
                ],
                "initial": {v: cls.to_dict(dfa) for v, dfa in sorted(machine.initial.items())},
                "terminal": {v: cls.to_dict(dfa) for v, dfa in sorted(machine.terminal.items())},
            }
        names = machine.states
        data: dict[str, Any] = {
            "kind": type(machine).__name__.lower(),
            "name": machine.name,
            "alphabet": list(machine.alphabet),
            "states": list(names),
        }
        if isinstance(machine, Nfa):
            data["orientation"] = machine.orientation
            data["initial"] = [names[q] for q in sorted(machine.initials)]
            data["final"] = [names[q] for q in sorted(machine.finals)]
            data["transitions"] = [[names[p], a, names[q]] for p, a, q in machine.sorted_transitions()]
        elif isinstance(machine, Dfa):
            data["orientation"] = machine.orientation
            data["initial"] = names[machine.initial]
            data["final"] = [names[q] for q in sorted(machine.finals)]
            data["transitions"] = [[names[p], a, names[q]] for (p, a), q in sorted(machine.delta.items())]
        elif isinstance(machine, Nft):
            data["initial"] = {names[q]: w for q, w in sorted(machine.initial_outputs.items())}
            data["final"] = {names[q]: w for q, w in sorted(machine.final_outputs.items())}
            data["transitions"] = [[names[p], a, names[q], w] for (p, a, q), w in machine.sorted_transitions()]
        else:
            data["initial"] = {names[machine.initial]: machine.initial_output}
            data["final"] = {names[q]: w for q, w in sorted(machine.final_outputs.items())}
            data["transitions"] = [
                [names[p], a, names[q], w] for (p, a), (q, w) in sorted(machine.delta.items())
            ]
        return data

    @staticmethod
    def to_yaml(data: Any) -> str:
        return yaml.safe_dump(data, default_flow_style=False, allow_unicode=True, sort_keys=False)
