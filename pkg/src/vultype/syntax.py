"""C/C++ token-level lexer and heuristic syntactic-element extraction.

The lexer is strict: comments and preprocessor lines are stripped, string and
char literals are kept as single tokens, and malformed input (unterminated
literals/comments, stray characters) is rejected with a line number.

Element extraction buckets identifier/keyword/number token texts into four
statement-level categories: function calls, assignments, control structures,
and return statements. Statements are delimited by ;, { and } at paren depth
zero; a single statement may feed several buckets (x = f(y); is both an
assignment and a call).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ExtractionError, LexError

KEYWORDS = frozenset({
    # C
    "auto", "break", "case", "char", "const", "continue", "default", "do",
    "double", "else", "enum", "extern", "float", "for", "goto", "if",
    "inline", "int", "long", "register", "restrict", "return", "short",
    "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
    "unsigned", "void", "volatile", "while", "_Bool", "_Complex", "_Imaginary",
    # common C++
    "bool", "true", "false", "nullptr", "new", "delete", "class", "namespace",
    "template", "typename", "public", "private", "protected", "virtual",
    "this", "using", "try", "catch", "throw", "friend", "explicit", "mutable",
    "constexpr", "wchar_t",
})

CONTROL_KEYWORDS = frozenset({"if", "for", "while", "switch", "do"})

# Keywords that open a declaration; an identifier+( right after one of these
# (possibly through * or &) is a declarator, not a call.
TYPE_CONTEXT_KEYWORDS = frozenset({
    "void", "char", "short", "int", "long", "float", "double", "signed",
    "unsigned", "_Bool", "bool", "auto", "const", "volatile", "static",
    "extern", "inline", "register", "restrict", "typedef", "struct", "union",
    "enum", "class", "typename", "wchar_t", "constexpr",
})

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="})

_OPS3 = ("<<=", ">>=")
_OPS2 = ("==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
         "->", "++", "--", "&&", "||", "<<", ">>")
_OPS1 = frozenset("+-*/%&|^~<>=!?")
_PUNCT = frozenset("(){}[];,.:#")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"0[xX][0-9a-fA-F]+[uUlL]*|\d+\.?\d*(?:[eE][+-]?\d+)?[uUlLfF]*")

ELEMENT_KINDS = ("call", "assignment", "control", "return")
_ELIGIBLE_KINDS = frozenset({"identifier", "keyword", "number"})


@dataclass(frozen=True)
class CodeToken:
    text: str
    kind: str
    line: int


@dataclass
class SyntacticElements:
    """Per-function token sets, one set per element kind."""

    buckets: dict[str, set[str]] = field(
        default_factory=lambda: {kind: set() for kind in ELEMENT_KINDS}
    )

    def as_sorted_dict(self) -> dict[str, list[str]]:
        return {kind: sorted(self.buckets[kind]) for kind in ELEMENT_KINDS}

    @classmethod
    def from_dict(cls, data: dict) -> "SyntacticElements":
        return cls(buckets={kind: set(data.get(kind, ())) for kind in ELEMENT_KINDS})


def _scan_string(source: str, start: int, line: int, quote: str, what: str) -> tuple[int, int]:
    """Return (index past closing quote, updated line). Strict on termination."""
    i = start + 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\\":
            if i + 1 >= n:
                break
            if source[i + 1] == "\n":
                line += 1
            i += 2
            continue
        if c == "\n":
            raise LexError(f"unterminated {what}", line)
        if c == quote:
            return i + 1, line
        i += 1
    raise LexError(f"unterminated {what}", line)


def lex(source: str) -> list[CodeToken]:
    tokens: list[CodeToken] = []
    i, line = 0, 1
    n = len(source)
    at_line_start = True

    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            i += 1
            at_line_start = True
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if ch == "\\" and i + 1 < n and source[i + 1] == "\n":
            line += 1
            i += 2
            continue
        if ch == "#" and at_line_start:
            # preprocessor line (with backslash continuations): skipped entirely
            while i < n and source[i] != "\n":
                if source[i] == "\\" and i + 1 < n and source[i + 1] == "\n":
                    line += 1
                    i += 2
                    continue
                i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            start_line = line
            end = source.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated block comment", start_line)
            line += source.count("\n", i, end)
            i = end + 2
            continue

        start_line = line
        if ch == '"':
            end, line = _scan_string(source, i, line, '"', "string literal")
            tokens.append(CodeToken(source[i:end], "string-literal", start_line))
            i = end
        elif ch == "'":
            end, line = _scan_string(source, i, line, "'", "character literal")
            tokens.append(CodeToken(source[i:end], "char-literal", start_line))
            i = end
        elif match := _IDENT_RE.match(source, i):
            text = match.group()
            kind = "keyword" if text in KEYWORDS else "identifier"
            tokens.append(CodeToken(text, kind, line))
            i = match.end()
        elif ch.isdigit():
            match = _NUMBER_RE.match(source, i)
            tokens.append(CodeToken(match.group(), "number", line))
            i = match.end()
        elif source[i:i + 3] in _OPS3:
            tokens.append(CodeToken(source[i:i + 3], "operator", line))
            i += 3
        elif source[i:i + 2] in _OPS2:
            tokens.append(CodeToken(source[i:i + 2], "operator", line))
            i += 2
        elif ch in _OPS1:
            tokens.append(CodeToken(ch, "operator", line))
            i += 1
        elif ch in _PUNCT:
            tokens.append(CodeToken(ch, "punctuation", line))
            i += 1
        else:
            raise LexError(f"unexpected character {ch!r}", line)
        at_line_start = False

    return tokens


def _split_statements(tokens: list[CodeToken]) -> list[tuple[list[CodeToken], str]]:
    """Split a token stream at ;/{/} outside parentheses.

    Returns (chunk, terminator) pairs; the terminator token itself is dropped.
    Raises on unbalanced parens or braces.
    """
    chunks: list[tuple[list[CodeToken], str]] = []
    current: list[CodeToken] = []
    paren = brace = 0
    for tok in tokens:
        if tok.kind == "punctuation":
            if tok.text == "(":
                paren += 1
            elif tok.text == ")":
                paren -= 1
                if paren < 0:
                    raise ExtractionError(f"unbalanced delimiters at line {tok.line}")
            elif tok.text == "{":
                brace += 1
                if paren == 0:
                    chunks.append((current, "{"))
                    current = []
                    continue
            elif tok.text == "}":
                brace -= 1
                if brace < 0:
                    raise ExtractionError(f"unbalanced delimiters at line {tok.line}")
                if paren == 0:
                    chunks.append((current, "}"))
                    current = []
                    continue
            elif tok.text == ";" and paren == 0:
                chunks.append((current, ";"))
                current = []
                continue
        current.append(tok)
    if paren != 0 or brace != 0:
        last_line = tokens[-1].line if tokens else 1
        raise ExtractionError(f"unbalanced delimiters at line {last_line}")
    if current:
        chunks.append((current, ""))
    return chunks


def _paren_depths(chunk: list[CodeToken]) -> list[int]:
    depths = []
    depth = 0
    for tok in chunk:
        if tok.kind == "punctuation" and tok.text == "(":
            depths.append(depth)
            depth += 1
        elif tok.kind == "punctuation" and tok.text == ")":
            depth -= 1
            depths.append(depth)
        else:
            depths.append(depth)
    return depths


def _match_paren(chunk: list[CodeToken], open_idx: int) -> int:
    depth = 0
    for j in range(open_idx, len(chunk)):
        if chunk[j].kind == "punctuation":
            if chunk[j].text == "(":
                depth += 1
            elif chunk[j].text == ")":
                depth -= 1
                if depth == 0:
                    return j
    raise ExtractionError(f"unbalanced delimiters at line {chunk[open_idx].line}")


def _eligible_texts(toks) -> list[str]:
    return [t.text for t in toks if t.kind in _ELIGIBLE_KINDS]


def _declaration_context(chunk: list[CodeToken], idx: int) -> bool:
    j = idx - 1
    while j >= 0 and chunk[j].kind == "operator" and chunk[j].text in ("*", "&"):
        j -= 1
    return j >= 0 and chunk[j].kind == "keyword" and chunk[j].text in TYPE_CONTEXT_KEYWORDS


def _apply_rules(chunk: list[CodeToken], terminator: str, buckets: dict[str, set[str]]) -> None:
    if not chunk:
        return
    depths = _paren_depths(chunk)

    # assignment: a top-level assignment operator marks the whole statement
    if any(t.kind == "operator" and t.text in ASSIGN_OPS and d == 0
           for t, d in zip(chunk, depths)):
        buckets["assignment"].update(_eligible_texts(chunk))

    for i, tok in enumerate(chunk):
        if tok.kind == "keyword" and tok.text in CONTROL_KEYWORDS:
            buckets["control"].add(tok.text)
            if tok.text == "do":
                continue
            for j in range(i + 1, len(chunk)):
                if chunk[j].kind == "punctuation" and chunk[j].text == "(":
                    k = _match_paren(chunk, j)
                    buckets["control"].update(_eligible_texts(chunk[j + 1:k]))
                    break
        elif tok.kind == "keyword" and tok.text == "return":
            buckets["return"].add("return")
            buckets["return"].update(_eligible_texts(chunk[i + 1:]))
        elif (tok.kind == "identifier" and i + 1 < len(chunk)
              and chunk[i + 1].kind == "punctuation" and chunk[i + 1].text == "("):
            if _declaration_context(chunk, i):
                continue
            k = _match_paren(chunk, i + 1)
            # void f(int a) { ... } — definition header, not a call
            if k == len(chunk) - 1 and terminator == "{" and depths[i] == 0:
                continue
            buckets["call"].add(tok.text)
            buckets["call"].update(_eligible_texts(chunk[i + 2:k]))


def extract_elements(tokens: list[CodeToken]) -> SyntacticElements:
    elements = SyntacticElements()
    for chunk, terminator in _split_statements(tokens):
        _apply_rules(chunk, terminator, elements.buckets)
    return elements


def extract_from_source(source: str) -> SyntacticElements:
    return extract_elements(lex(source))


_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def split_subtokens(identifier: str) -> list[str]:
    """Split an identifier on underscores and camel-case boundaries, lowercased.

    "base_path" -> ["base", "path"]; "readHTTPHeader" -> ["read", "http", "header"].
    """
    parts = []
    for piece in identifier.split("_"):
        for sub in _CAMEL_BOUNDARY.split(piece):
            if sub:
                parts.append(sub.lower())
    return parts
