"""
File containing the reader of .szm source files.

A source file is a sequence of definitions:

    type Name(params) = Type      non-recursive abbreviation, lowercase params are ordinals
    val name : Type = term        top-level definition, checked against its type
    eval term                     expression evaluated after checking

Both the Unicode and the ASCII notations are accepted (∀/forall, ∃/exists, μ/mu, ν/nu, λ/fun,
Λ/ofun, →/->, ∞/inf, ×/*, Y x./fix x.). Sizes are written mu_a X. A or μ_α X. A. Binders whose
name starts with a lowercase letter (α, β, a, ...) bind ordinals, others bind types; the form
forall o a b. A also quantifies over ordinals. Line comments start with //.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from szm.errors import ParseError, UnboundName
from szm.syntax.operations import instantiate
from szm.syntax.ordinals import INF, OVar, Ordinal, Succ
from szm.syntax.terms import (Annot, App, Branch, Case, Cons, Fix, Global, Lam, OrdAbs, Proj,
                              Record, SourcePos, Term, TypeLet, Var)
from szm.syntax.types import (Arrow, Exists, Forall, Mu, Nu, OExists, OForall, Prod, Sum, TDot,
                              TVar, Type, pair)

logger = logging.getLogger(__name__)

IDENT, SYMBOL, EOF = "ident", "symbol", "eof"

_ALIASES = {
    "forall": "∀",
    "exists": "∃",
    "mu": "μ",
    "nu": "ν",
    "fun": "λ",
    "ofun": "Λ",
    "inf": "∞",
}
_KEYWORDS = {"type", "val", "eval", "case", "of", "let", "such", "that", "in", "fix"}
_SINGLE = set("(){}[],;:.|=×*→∀∃μνλΛ∞_")
_BINDER_STARTS = {"λ", "Λ", "fix", "case", "let"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: SourcePos


def tokenize(text: str, file: str = "<input>") -> List[Token]:
    """
    Splits a source text into identifiers and symbols. ASCII keywords with a Unicode
    counterpart are returned as the Unicode symbol, and mu_a / nu_a are split into μ, _ and a.
    """
    tokens = []
    line, column, i = 1, 1, 0

    def emit(kind, value, col=None):
        tokens.append(Token(kind, value, SourcePos(file, line, column if col is None else col)))

    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, column, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            column, i = column + 1, i + 1
            continue
        if text.startswith("//", i):
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            emit(SYMBOL, "→")
            column, i = column + 2, i + 2
            continue
        if ch in _SINGLE:
            emit(SYMBOL, "×" if ch == "*" else ch)
            column, i = column + 1, i + 1
            continue
        if ch.isalpha():
            j = i + 1
            while j < len(text) and (text[j].isalnum() or text[j] in "_'") and \
                    text[j] not in _SINGLE - {"_"}:
                j += 1
            word = text[i:j]
            if word[:3] in ("mu_", "nu_") and len(word) > 3:
                emit(SYMBOL, _ALIASES[word[:2]])
                emit(SYMBOL, "_", column + 2)
                emit(IDENT, word[3:], column + 3)
            elif word in _ALIASES:
                emit(SYMBOL, _ALIASES[word])
            elif word in _KEYWORDS:
                emit(SYMBOL, word)
            else:
                emit(IDENT, word)
            column, i = column + (j - i), j
            continue
        raise ParseError(f"unexpected character {ch!r}", SourcePos(file, line, column))
    tokens.append(Token(EOF, "", SourcePos(file, line, column)))
    return tokens


@dataclass(frozen=True)
class Scope:
    terms: FrozenSet[str] = frozenset()
    types: FrozenSet[str] = frozenset()
    ordinals: FrozenSet[str] = frozenset()

    def with_terms(self, *names: str) -> "Scope":
        return Scope(self.terms | set(names), self.types, self.ordinals)

    def with_types(self, *names: str) -> "Scope":
        return Scope(self.terms, self.types | set(names), self.ordinals - set(names))

    def with_ordinals(self, *names: str) -> "Scope":
        return Scope(self.terms, self.types - set(names), self.ordinals | set(names))


@dataclass
class TypeDef:
    name: str
    params: Tuple[str, ...]
    body: Type
    pos: Optional[SourcePos] = None

    def apply(self, args, pos: SourcePos) -> Type:
        if len(args) != len(self.params):
            raise ParseError(
                f"type {self.name} expects {len(self.params)} arguments, got {len(args)}", pos)
        ordinals = {p: a for p, a in zip(self.params, args) if is_ordinal_name(p)}
        types = {p: a for p, a in zip(self.params, args) if not is_ordinal_name(p)}
        return instantiate(self.body, types, ordinals)


@dataclass
class ValDef:
    name: str
    type: Optional[Type]
    term: Term
    pos: Optional[SourcePos] = None


@dataclass
class EvalDef:
    term: Term
    pos: Optional[SourcePos] = None


@dataclass
class SourceFile:
    file: str
    definitions: List[object] = field(default_factory=list)

    @property
    def values(self) -> List[ValDef]:
        return [d for d in self.definitions if isinstance(d, ValDef)]

    @property
    def evals(self) -> List[EvalDef]:
        return [d for d in self.definitions if isinstance(d, EvalDef)]

    def bodies(self) -> Dict[str, Term]:
        return {d.name: d.term for d in self.values}


def is_ordinal_name(name: str) -> bool:
    return name[:1].islower()


def _list_type() -> TypeDef:
    body = Mu(OVar("a"), "L", Sum((("Nil", Prod(())), ("Cons", pair(TVar("A"), TVar("L"))))))
    return TypeDef("List", ("A", "a"), body)


class Parser:
    def __init__(self, text: str, file: str = "<input>") -> None:
        self.file = file
        self.tokens = tokenize(text, file)
        self.i = 0
        self.type_defs: Dict[str, TypeDef] = {"List": _list_type()}
        self.globals: Dict[str, Optional[Type]] = {}

    # Token stream

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        self.i = min(self.i + 1, len(self.tokens) - 1)
        return token

    def at(self, text: str, offset: int = 0) -> bool:
        token = self.peek(offset)
        return token.kind == SYMBOL and token.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def error(self, message: str) -> ParseError:
        token = self.peek()
        if token.kind == EOF and self.i > 0:
            return ParseError(f"{message}, reached the end of the file",
                              self.tokens[self.i - 1].pos)
        found = token.text or "end of file"
        return ParseError(f"{message}, found '{found}'", token.pos)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected '{text}'")
        return self.advance()

    def ident(self) -> Token:
        if self.peek().kind != IDENT:
            raise self.error("expected a name")
        return self.advance()

    # Definitions

    def program(self) -> SourceFile:
        source = SourceFile(self.file)
        while self.peek().kind != EOF:
            start = self.peek().pos
            if self.accept("type"):
                source.definitions.append(self.type_definition(start))
            elif self.accept("val"):
                source.definitions.append(self.value_definition(start))
            elif self.accept("eval"):
                source.definitions.append(EvalDef(self.term(Scope()), start))
            else:
                raise self.error("expected a definition (type, val or eval)")
        logger.debug("Parsed %d definitions from %s", len(source.definitions), self.file)
        return source

    def type_definition(self, start: SourcePos) -> TypeDef:
        name = self.ident().text
        params = []
        if self.accept("("):
            params.append(self.ident().text)
            while self.accept(","):
                params.append(self.ident().text)
            self.expect(")")
        self.expect("=")
        scope = Scope().with_ordinals(*filter(is_ordinal_name, params))
        scope = scope.with_types(*(p for p in params if not is_ordinal_name(p)))
        definition = TypeDef(name, tuple(params), self.type(scope), start)
        self.type_defs[name] = definition
        return definition

    def value_definition(self, start: SourcePos) -> ValDef:
        token = self.ident()
        if token.text in self.globals:
            raise ParseError(f"{token.text} is already defined", token.pos)
        a = self.type(Scope()) if self.accept(":") else None
        self.expect("=")
        t = self.term(Scope())
        self.globals[token.text] = a
        return ValDef(token.text, a, t, start)

    # Types

    def type(self, scope: Scope) -> Type:
        token = self.peek()
        if self.at("∀") or self.at("∃"):
            self.advance()
            marker = (self.peek().kind == IDENT and self.peek().text == "o"
                      and self.peek(1).kind == IDENT)
            if marker:
                self.advance()
            names = [self.ident().text]
            while self.peek().kind == IDENT:
                names.append(self.ident().text)
            self.expect(".")
            ordinal = [marker or is_ordinal_name(n) for n in names]
            inner = scope
            for name, is_ord in zip(names, ordinal):
                inner = inner.with_ordinals(name) if is_ord else inner.with_types(name)
            body = self.type(inner)
            for name, is_ord in reversed(list(zip(names, ordinal))):
                if token.text == "∀":
                    body = (OForall if is_ord else Forall)(name, body, token.pos)
                else:
                    body = (OExists if is_ord else Exists)(name, body, token.pos)
            return body
        if self.at("μ") or self.at("ν"):
            self.advance()
            size = self.ordinal(scope) if self.accept("_") else INF
            name = self.ident().text
            self.expect(".")
            body = self.type(scope.with_types(name))
            return (Mu if token.text == "μ" else Nu)(size, name, body, token.pos)
        left = self.product(scope)
        if self.accept("→"):
            return Arrow(left, self.type(scope), token.pos)
        return left

    def product(self, scope: Scope) -> Type:
        left = self.type_atom(scope)
        if self.accept("×"):
            return pair(left, self.product(scope))
        return left

    def type_atom(self, scope: Scope) -> Type:
        token = self.peek()
        if self.accept("("):
            a = self.type(scope)
            self.expect(")")
            return a
        if self.accept("{"):
            fields = self.labelled(scope, ":", "}", self.type)
            return Prod(fields, token.pos)
        if self.accept("["):
            cases = []
            if not self.at("]"):
                cases.append(self.case_type(scope))
                while self.accept("|"):
                    cases.append(self.case_type(scope))
            self.expect("]")
            self.check_distinct([c for c, _ in cases], token.pos, "constructor")
            return Sum(tuple(cases), token.pos)
        if token.kind != IDENT:
            raise self.error("expected a type")
        name = token.text
        if name in scope.types:
            self.advance()
            return TVar(name, token.pos)
        if self.at(".", 1) and (name in scope.terms or name in self.globals):
            self.advance()
            self.advance()
            subject = Var(name, token.pos) if name in scope.terms else Global(name, token.pos)
            return TDot(subject, self.ident().text, token.pos)
        if name in self.type_defs:
            self.advance()
            definition = self.type_defs[name]
            args = []
            if definition.params:
                self.expect("(")
                for k, param in enumerate(definition.params):
                    if k:
                        self.expect(",")
                    args.append(self.ordinal(scope) if is_ordinal_name(param)
                                else self.type(scope))
                self.expect(")")
            return definition.apply(args, token.pos)
        raise UnboundName(f"unbound type {name}", token.pos)

    def case_type(self, scope: Scope) -> Tuple[str, Type]:
        name = self.ident().text
        if self.accept("of"):
            return name, self.type(scope)
        return name, Prod(())

    def ordinal(self, scope: Scope) -> Ordinal:
        token = self.peek()
        if self.accept("∞"):
            return INF
        if token.kind == IDENT and token.text == "S" and self.at("(", 1):
            self.advance()
            self.advance()
            o = self.ordinal(scope)
            self.expect(")")
            return Succ(o)
        if token.kind == IDENT and token.text in scope.ordinals:
            self.advance()
            return OVar(token.text)
        if token.kind == IDENT:
            raise UnboundName(f"unbound ordinal {token.text}", token.pos)
        raise self.error("expected an ordinal")

    def labelled(self, scope: Scope, separator: str, closing: str, item) -> tuple:
        start = self.tokens[self.i - 1].pos
        entries = []
        while not self.at(closing):
            label = self.ident().text
            self.expect(separator)
            entries.append((label, item(scope)))
            if not self.accept(";"):
                break
        self.expect(closing)
        self.check_distinct([label for label, _ in entries], start, "label")
        return tuple(entries)

    @staticmethod
    def check_distinct(names, pos: SourcePos, what: str) -> None:
        seen = set()
        for name in names:
            if name in seen:
                raise ParseError(f"duplicate {what} {name}", pos)
            seen.add(name)

    # Terms

    def term(self, scope: Scope) -> Term:
        token = self.peek()
        if self.accept("λ"):
            binders = []
            while not self.at("."):
                if self.accept("("):
                    name = self.ident().text
                    self.expect(":")
                    binders.append((name, self.type(scope)))
                    self.expect(")")
                else:
                    binders.append((self.ident().text, None))
            if not binders:
                raise self.error("expected a bound variable")
            self.expect(".")
            body = self.term(scope.with_terms(*(n for n, _ in binders)))
            for name, domain in reversed(binders):
                body = Lam(name, body, domain, token.pos)
            return body
        if self.accept("Λ"):
            names = [self.ident().text]
            while self.peek().kind == IDENT:
                names.append(self.ident().text)
            self.expect(".")
            body = self.term(scope.with_ordinals(*names))
            for name in reversed(names):
                body = OrdAbs(name, body, token.pos)
            return body
        if self.at("fix") or (token.kind == IDENT and token.text == "Y"
                              and self.peek(1).kind == IDENT and self.at(".", 2)):
            self.advance()
            name = self.ident().text
            self.expect(".")
            return Fix(name, self.term(scope.with_terms(name)), token.pos)
        if self.accept("case"):
            scrutinee = self.term(scope)
            self.expect("of")
            self.accept("|")
            branches = [self.branch(scope)]
            while self.accept("|"):
                branches.append(self.branch(scope))
            self.check_distinct([b.constructor for b in branches], token.pos, "branch")
            return Case(scrutinee, tuple(branches), token.pos)
        if self.accept("let"):
            return self.let(scope, token)
        return self.application(scope)

    def branch(self, scope: Scope) -> Branch:
        constructor = self.ident().text
        name = "_"
        if self.peek().kind == IDENT:
            name = self.ident().text
        elif self.accept("_"):
            name = "_"
        self.expect("→")
        return Branch(constructor, name, self.term(scope.with_terms(name)))

    def let(self, scope: Scope, token: Token) -> Term:
        names = [self.ident().text]
        while self.accept(","):
            names.append(self.ident().text)
        if self.accept("such"):
            self.expect("that")
            subject = self.application(scope)
            self.expect(":")
            inner = scope.with_types(*names)
            pattern = self.type(inner)
            self.expect("in")
            return TypeLet(tuple(names), subject, pattern, self.term(inner), token.pos)
        if len(names) > 1:
            raise self.error("expected 'such that'")
        annotation = self.type(scope) if self.accept(":") else None
        self.expect("=")
        bound = self.term(scope)
        if annotation is not None:
            bound = Annot(bound, annotation, token.pos)
        self.expect("in")
        body = self.term(scope.with_terms(names[0]))
        return App(Lam(names[0], body, None, token.pos), bound, token.pos)

    def starts_atom(self) -> bool:
        token = self.peek()
        return token.kind == IDENT or self.at("(") or self.at("{")

    def application(self, scope: Scope) -> Term:
        t = self.postfix(scope)
        while True:
            if self.starts_atom():
                t = App(t, self.postfix(scope), t.pos)
            elif self.peek().kind == SYMBOL and self.peek().text in _BINDER_STARTS:
                return App(t, self.term(scope), t.pos)
            else:
                return t

    def postfix(self, scope: Scope) -> Term:
        t = self.atom(scope)
        while self.at(".") and self.peek(1).kind == IDENT:
            self.advance()
            t = Proj(t, self.ident().text, t.pos)
        return t

    def atom(self, scope: Scope) -> Term:
        token = self.peek()
        if token.kind == IDENT:
            self.advance()
            name = token.text
            if name[:1].isupper():
                argument = self.postfix(scope) if self.starts_atom() else Record(())
                return Cons(name, argument, token.pos)
            if name in scope.terms:
                return Var(name, token.pos)
            if name in self.globals:
                return Global(name, token.pos)
            raise UnboundName(f"unbound variable {name}", token.pos)
        if self.accept("("):
            t = self.term(scope)
            if self.accept(":"):
                a = self.type(scope)
                self.expect(")")
                return Annot(t, a, token.pos)
            if self.accept(","):
                u = self.term(scope)
                self.expect(")")
                return Record((("fst", t), ("snd", u)), token.pos)
            self.expect(")")
            return t
        if self.accept("{"):
            return Record(self.labelled(scope, "=", "}", self.term), token.pos)
        raise self.error("expected a term")


def parse_program(text: str, file: str = "<input>") -> SourceFile:
    """
    Parses the text of a .szm file.

    Parameters
    ----------
    text : str
        Source text.
    file : str
        Name used in source positions. By default it is "<input>".

    Returns
    -------
    SourceFile
        The definitions, in order. Type abbreviations are already expanded in the types and
        terms of the following definitions, and references to earlier definitions are Global
        nodes.

    Raises
    ------
    ParseError
        On a syntax error, with the position of the offending token.
    UnboundName
        When a name is used before being defined.
    """
    return Parser(text, file).program()


def _prepared(prelude: str, text: str) -> Parser:
    parser = Parser(prelude, "<prelude>")
    parser.program()
    definitions, names = parser.type_defs, parser.globals
    parser = Parser(text)
    parser.type_defs.update(definitions)
    parser.globals.update(names)
    return parser


def _finish(parser: Parser, node):
    if parser.peek().kind != EOF:
        raise parser.error("unexpected trailing input")
    return node


def parse_type(text: str, prelude: str = "") -> Type:
    """
    Parses a closed type, with the type abbreviations and definitions of prelude in scope.
    """
    parser = _prepared(prelude, text)
    return _finish(parser, parser.type(Scope()))


def parse_term(text: str, prelude: str = "") -> Term:
    """
    Parses a closed term, with the type abbreviations and definitions of prelude in scope.
    """
    parser = _prepared(prelude, text)
    return _finish(parser, parser.term(Scope()))
