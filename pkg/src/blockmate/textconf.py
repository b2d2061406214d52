"""Line-based config text shared by the catalogue, profile, template and
geometry files.

The format is deliberately small: one directive per line, `#` comments,
blank lines ignored, blocks opened by a keyword line and closed by `end`.
Every parse failure reports the 1-based line and column it happened at.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources


class ParseError(Exception):
    """A syntax problem in a config document, with its position."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True)
class Directive:
    """One tokenized non-empty line."""

    line: int
    key: str
    args: tuple[str, ...]

    def arg_col(self, index: int, raw: str) -> int:
        # best-effort column of the arg for error reporting
        pos = raw.find(self.args[index])
        return pos + 1 if pos >= 0 else 1


def tokenize(text: str) -> list[Directive]:
    """Split a document into directives, dropping comments and blanks."""
    out: list[Directive] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        out.append(Directive(lineno, parts[0], tuple(parts[1:])))
    return out


def parse_float(d: Directive, index: int, raw: str = "") -> float:
    try:
        return float(d.args[index])
    except (IndexError, ValueError):
        raise ParseError(d.line, 1, f"'{d.key}' needs a number at position {index + 1}") from None


def require_args(d: Directive, n: int) -> None:
    if len(d.args) < n:
        raise ParseError(d.line, len(d.key) + 1, f"'{d.key}' needs at least {n} argument(s)")


def blocks(directives: list[Directive], opener: str) -> list[tuple[Directive, list[Directive]]]:
    """Group directives into `opener ... end` blocks."""
    out: list[tuple[Directive, list[Directive]]] = []
    head: Directive | None = None
    body: list[Directive] = []
    for d in directives:
        if d.key == opener:
            if head is not None:
                raise ParseError(d.line, 1, f"'{opener}' block opened before previous one ended")
            head, body = d, []
        elif d.key == "end":
            if head is None:
                raise ParseError(d.line, 1, "'end' without an open block")
            out.append((head, body))
            head = None
        else:
            if head is None:
                raise ParseError(d.line, 1, f"directive '{d.key}' outside any '{opener}' block")
            body.append(d)
    if head is not None:
        raise ParseError(head.line, 1, f"'{opener}' block never closed")
    return out


def default_data(name: str) -> str:
    """Read one of the packaged default config files."""
    return resources.files("blockmate.data").joinpath(name).read_text(encoding="utf-8")
