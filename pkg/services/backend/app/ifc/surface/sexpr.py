"""
S-expression reader with source positions.

Besides plain atoms and lists the reader knows three label-bearing forms:

    bool@H          an atom with a label suffix (kept inside the atom text)
    (...)@L         a list followed by a label suffix (``SList.suffix``)
    [L]             a latent label (``Latent``)

A parenthesised span with no whitespace that contains a comma, such as
``(L,{a})``, is a product label and is read as an atom.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from ..core.errors import ParseError, Pos

_DELIMITERS = set("()[];")


@dataclass(frozen=True)
class Atom:
    text: str
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Latent:
    text: str
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class SList:
    items: Tuple["SExpr", ...]
    pos: Pos = field(compare=False)
    suffix: Optional[str] = None


SExpr = Union[Atom, Latent, SList]


@dataclass
class _Token:
    kind: str  # "(", ")", "atom", "latent"
    text: str
    pos: Pos
    suffix: Optional[str] = None


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def _pos(self) -> Pos:
        return (self.line, self.col)

    def _peek(self, offset: int = 0) -> str:
        j = self.i + offset
        return self.text[j] if j < len(self.text) else ""

    def _advance(self) -> str:
        ch = self.text[self.i]
        self.i += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def _error(self, message: str, pos: Optional[Pos] = None) -> ParseError:
        line, col = pos or self._pos()
        return ParseError(message, line, col)

    def _balanced_span(self, open_ch: str, close_ch: str) -> str:
        """Read a balanced ``open_ch ... close_ch`` span starting at the cursor."""
        start = self._pos()
        depth, out = 0, []
        while True:
            ch = self._peek()
            if not ch:
                raise self._error(f"unterminated '{open_ch}'", start)
            out.append(self._advance())
            if ch == open_ch:
                depth += 1
            elif ch == close_ch:
                depth -= 1
                if depth == 0:
                    return "".join(out)

    def _label_text(self) -> str:
        ch = self._peek()
        if ch == "(":
            return self._balanced_span("(", ")")
        if ch == "{":
            return self._balanced_span("{", "}")
        out = []
        while self._peek() and not self._peek().isspace() and self._peek() not in _DELIMITERS:
            out.append(self._advance())
        if not out:
            raise self._error("expected a label after '@'")
        return "".join(out)

    def _looks_like_product_label(self) -> bool:
        depth, j, seen_comma = 0, self.i, False
        while j < len(self.text):
            ch = self.text[j]
            if ch.isspace():
                return False
            if ch == ",":
                seen_comma = True
            elif ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    return seen_comma
            j += 1
        return False

    def tokens(self) -> List[_Token]:
        out: List[_Token] = []
        while True:
            ch = self._peek()
            if not ch:
                return out
            if ch.isspace():
                self._advance()
                continue
            if ch == ";":
                while self._peek() and self._peek() != "\n":
                    self._advance()
                continue
            pos = self._pos()
            if ch == "(":
                if self._looks_like_product_label():
                    out.append(_Token("atom", self._balanced_span("(", ")"), pos))
                else:
                    self._advance()
                    out.append(_Token("(", "(", pos))
            elif ch == ")":
                self._advance()
                suffix = None
                if self._peek() == "@":
                    self._advance()
                    suffix = self._label_text()
                out.append(_Token(")", ")", pos, suffix))
            elif ch == "[":
                span = self._balanced_span("[", "]")
                out.append(_Token("latent", span[1:-1].strip(), pos))
            elif ch == "]":
                raise self._error("unexpected ']'")
            else:
                text = []
                while self._peek() and not self._peek().isspace() and self._peek() not in _DELIMITERS:
                    c = self._advance()
                    text.append(c)
                    if c == "@":
                        text.append(self._label_text())
                        break
                out.append(_Token("atom", "".join(text), pos))


def read_all(text: str) -> List[SExpr]:
    """
    Read every top-level s-expression in ``text``.

    Raises:
        ParseError: on unbalanced parentheses or malformed labels
    """
    lexer = _Lexer(text)
    tokens = lexer.tokens()
    eof = lexer._pos()
    stack: List[Tuple[Pos, List[SExpr]]] = []
    top: List[SExpr] = []
    for tok in tokens:
        if tok.kind == "(":
            stack.append((tok.pos, []))
        elif tok.kind == ")":
            if not stack:
                raise ParseError("unexpected ')'", *tok.pos)
            pos, items = stack.pop()
            node = SList(tuple(items), pos, tok.suffix)
            (stack[-1][1] if stack else top).append(node)
        else:
            node = Atom(tok.text, tok.pos) if tok.kind == "atom" else Latent(tok.text, tok.pos)
            (stack[-1][1] if stack else top).append(node)
    if stack:
        raise ParseError("unexpected end of input (unclosed '(')", *eof)
    return top


def read_one(text: str) -> SExpr:
    forms = read_all(text)
    if len(forms) != 1:
        line, col = forms[1].pos if len(forms) > 1 else (1, 1)
        raise ParseError(f"expected exactly one expression, found {len(forms)}", line, col)
    return forms[0]


def format_sexpr(s: SExpr) -> str:
    match s:
        case Atom(text):
            return text
        case Latent(text):
            return f"[{text}]"
        case SList(items, _, suffix):
            inner = " ".join(format_sexpr(i) for i in items)
            return f"({inner})" + (f"@{suffix}" if suffix else "")
    raise TypeError(f"not an s-expression: {s!r}")
