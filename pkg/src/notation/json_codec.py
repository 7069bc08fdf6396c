"""Canonical JSON serializer and strict parser.

Minimal-style output is the baseline every byte/token delta is measured
against, so the encoder emits raw UTF-8 (no \\uXXXX escaping beyond the
mandatory quote/backslash/control cases) and the parser keeps number
literals exactly as written instead of widening them to floats.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateKeyError, ParseError
from .values import Array, Bool, Null, Number, Object, Text, Value

__all__ = ["JsonStyle", "MINIMAL", "encode_json", "decode_json", "Scanner"]


@dataclass(frozen=True)
class JsonStyle:
    """indent=None emits minimal JSON; an int emits pretty output."""

    indent: int | None = None

    def __post_init__(self) -> None:
        if self.indent is not None and self.indent < 1:
            raise ValueError("indent width must be >= 1")


MINIMAL = JsonStyle()

_ESCAPES = {
    '"': '\\"',
    "\\": "\\\\",
    "\b": "\\b",
    "\f": "\\f",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def encode_string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ch < " ":
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def encode_json(v: Value, style: JsonStyle = MINIMAL) -> str:
    if style.indent is None:
        return _encode_minimal(v)
    return _encode_pretty(v, style.indent, 0)


def _encode_minimal(v: Value) -> str:
    if isinstance(v, Null):
        return "null"
    if isinstance(v, Bool):
        return "true" if v.value else "false"
    if isinstance(v, Number):
        return v.literal
    if isinstance(v, Text):
        return encode_string(v.value)
    if isinstance(v, Array):
        return "[" + ",".join(_encode_minimal(x) for x in v.items) + "]"
    if isinstance(v, Object):
        return "{" + ",".join(f"{encode_string(k)}:{_encode_minimal(x)}" for k, x in v.pairs) + "}"
    raise TypeError(f"not a Value: {v!r}")


def _encode_pretty(v: Value, width: int, depth: int) -> str:
    pad = " " * (width * (depth + 1))
    close = " " * (width * depth)
    if isinstance(v, Array):
        if not v.items:
            return "[]"
        body = ",\n".join(pad + _encode_pretty(x, width, depth + 1) for x in v.items)
        return f"[\n{body}\n{close}]"
    if isinstance(v, Object):
        if not v.pairs:
            return "{}"
        body = ",\n".join(
            f"{pad}{encode_string(k)}: {_encode_pretty(x, width, depth + 1)}" for k, x in v.pairs
        )
        return f"{{\n{body}\n{close}}}"
    return _encode_minimal(v)


# ---------------------------------------------------------------------------
# Strict parsing.

_WS = " \t\n\r"

# nesting cap keeps hostile input from exhausting the interpreter stack
MAX_NESTING = 120


class Scanner:
    """Position-tracking recursive-descent scanner over JSON grammar.

    The TRON decoder subclasses the value dispatch to add class instances,
    so everything lives on one class instead of free functions.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.depth = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, pos=self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in _WS:
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        if self.at_end():
            raise self.error("unexpected end of input")
        return self.text[self.pos]

    def expect(self, ch: str) -> None:
        if self.at_end() or self.text[self.pos] != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_document(self) -> Value:
        self.skip_ws()
        v = self.parse_value()
        self.skip_ws()
        if not self.at_end():
            raise self.error("trailing content after document")
        return v

    def parse_value(self) -> Value:
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error("nesting too deep")
        try:
            return self.dispatch_value()
        finally:
            self.depth -= 1

    def dispatch_value(self) -> Value:
        ch = self.peek()
        if ch == "{":
            return self.parse_object()
        if ch == "[":
            return self.parse_array()
        if ch == '"':
            return Text(self.parse_string())
        if ch == "-" or "0" <= ch <= "9":
            return Number(self.parse_number_literal())
        if self.text.startswith("true", self.pos):
            self.pos += 4
            return Bool(True)
        if self.text.startswith("false", self.pos):
            self.pos += 5
            return Bool(False)
        if self.text.startswith("null", self.pos):
            self.pos += 4
            return Null()
        raise self.error(f"unexpected character {ch!r}")

    def parse_object(self) -> Object:
        self.expect("{")
        self.skip_ws()
        pairs: list[tuple[str, Value]] = []
        seen: set[str] = set()
        if not self.at_end() and self.peek() == "}":
            self.pos += 1
            return Object(())
        while True:
            self.skip_ws()
            key_pos = self.pos
            if self.peek() != '"':
                raise self.error("expected string key")
            key = self.parse_string()
            if key in seen:
                raise DuplicateKeyError(key, pos=key_pos)
            seen.add(key)
            self.skip_ws()
            self.expect(":")
            self.skip_ws()
            pairs.append((key, self.parse_value()))
            self.skip_ws()
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            if ch == "}":
                self.pos += 1
                return Object(pairs)
            raise self.error("expected ',' or '}' in object")

    def parse_array(self) -> Array:
        self.expect("[")
        self.skip_ws()
        items: list[Value] = []
        if not self.at_end() and self.peek() == "]":
            self.pos += 1
            return Array(())
        while True:
            self.skip_ws()
            items.append(self.parse_value())
            self.skip_ws()
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            if ch == "]":
                self.pos += 1
                return Array(items)
            raise self.error("expected ',' or ']' in array")

    def parse_string(self) -> str:
        self.expect('"')
        out: list[str] = []
        while True:
            if self.at_end():
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == '"':
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                out.append(self._parse_escape())
                continue
            if ch < " ":
                raise self.error("raw control character in string")
            out.append(ch)
            self.pos += 1

    def _parse_escape(self) -> str:
        if self.at_end():
            raise self.error("unterminated escape")
        ch = self.text[self.pos]
        simple = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}
        if ch in simple:
            self.pos += 1
            return simple[ch]
        if ch == "u":
            self.pos += 1
            code = self._parse_hex4()
            if 0xD800 <= code <= 0xDBFF and self.text.startswith("\\u", self.pos):
                save = self.pos
                self.pos += 2
                low = self._parse_hex4()
                if 0xDC00 <= low <= 0xDFFF:
                    return chr(0x10000 + ((code - 0xD800) << 10) + (low - 0xDC00))
                self.pos = save
            return chr(code)
        raise self.error(f"invalid escape \\{ch}")

    def _parse_hex4(self) -> int:
        if self.pos + 4 > len(self.text):
            raise self.error("truncated \\u escape")
        digits = self.text[self.pos : self.pos + 4]
        try:
            code = int(digits, 16)
        except ValueError:
            raise self.error(f"invalid \\u escape {digits!r}") from None
        self.pos += 4
        return code

    def parse_number_literal(self) -> str:
        start = self.pos
        i = self.pos
        n = len(self.text)
        if i < n and self.text[i] == "-":
            i += 1
        if i >= n or not "0" <= self.text[i] <= "9":
            raise self.error("malformed number")
        if self.text[i] == "0":
            i += 1
        else:
            while i < n and "0" <= self.text[i] <= "9":
                i += 1
        if i < n and self.text[i] == ".":
            i += 1
            if i >= n or not "0" <= self.text[i] <= "9":
                raise self.error("malformed number fraction")
            while i < n and "0" <= self.text[i] <= "9":
                i += 1
        if i < n and self.text[i] in "eE":
            i += 1
            if i < n and self.text[i] in "+-":
                i += 1
            if i >= n or not "0" <= self.text[i] <= "9":
                raise self.error("malformed number exponent")
            while i < n and "0" <= self.text[i] <= "9":
                i += 1
        self.pos = i
        return self.text[start:i]


def decode_json(text: str) -> Value:
    """Parse exactly one JSON value; trailing non-whitespace is an error."""
    return Scanner(text).parse_document()
