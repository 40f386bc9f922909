"""Voice command grammar: a tiny total parser over a fixed lexicon.

Every utterance maps to exactly one command or one parse error; nothing
else can escape.  Parsing is case- and whitespace-insensitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class CommandKind(str, Enum):
    GRASP = "grasp"
    STOP = "stop"
    STATUS = "status"
    CLOSE_HAND = "close_hand"
    OPEN_HAND = "open_hand"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    target: str | None = None


# Nouns the system can be asked to fetch.
LEXICON = frozenset({"bottle"})

UNRECOGNIZED = "unrecognized"
UNKNOWN_TARGET = "unknown_target"


class ParseError(ValueError):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


_VERB_ALIASES = {
    "grasp": CommandKind.GRASP,
    "find": CommandKind.GRASP,  # "find X" starts the same task as "grasp X"
    "stop": CommandKind.STOP,
    "status": CommandKind.STATUS,
    "close": CommandKind.CLOSE_HAND,
    "open": CommandKind.OPEN_HAND,
}

def parse(utterance: str) -> Command:
    """Parse an utterance; raises ParseError for anything off-grammar."""
    tokens = utterance.strip().lower().split()
    if not tokens:
        raise ParseError(UNRECOGNIZED, "empty utterance")
    verb = _VERB_ALIASES.get(tokens[0])
    if verb is None:
        raise ParseError(UNRECOGNIZED, f"unknown verb {tokens[0]!r}")
    rest = tokens[1:]
    if verb == CommandKind.GRASP:
        if len(rest) != 1:
            raise ParseError(UNRECOGNIZED, "expected exactly one target word")
        if rest[0] not in LEXICON:
            raise ParseError(UNKNOWN_TARGET, f"unknown target {rest[0]!r}")
        return Command(CommandKind.GRASP, rest[0])
    if rest:
        raise ParseError(UNRECOGNIZED, f"{tokens[0]!r} takes no arguments")
    return Command(verb)


def render(command: Command) -> str:
    """Canonical text for a command; parse(render(c)) == c."""
    if command.kind == CommandKind.GRASP:
        return f"grasp {command.target}"
    return {
        CommandKind.STOP: "stop",
        CommandKind.STATUS: "status",
        CommandKind.CLOSE_HAND: "close",
        CommandKind.OPEN_HAND: "open",
    }[command.kind]


def dispatch(command: Command, session: Any) -> dict:
    """Route a parsed command into a running session and return its ack."""
    return session.submit_command(command)
