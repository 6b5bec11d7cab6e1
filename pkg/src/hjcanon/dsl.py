"""Model-definition language: tokenizer, parser, and model printer.

Grammar (newline-insensitive, ``#`` comments):

    model     := "model" IDENT decl* "lagrangian" ":" expr
    decl      := "parameter" IDENT
               | "metric" "(" SIGN SIGN SIGN SIGN ")"
               | ("constant" | "variable") IDENT ("[" "4" "]")? ":" ("even" | "odd")
    expr      := term (("+" | "-") term)*
    term      := factor (("*" | "/") factor)*
    factor    := "-"? atom ("^" UINT)?
    atom      := UINT | "I" | IDENT | IDENT "[" UINT "]"
               | "d" "(" atom ")" | "dot" "(" expr "," expr ")" | "(" expr ")"

``d(v)`` is the evolution-parameter derivative of v; ``dot(a, b)`` contracts
two indexed arguments with the declared metric, preserving factor order.
Transformation files share the expression grammar:

    transformation := "transformation" IDENT param vary*
    param          := "param" IDENT ":" ("even" | "odd")
    vary           := "vary" IDENT ":" expr
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import kernel as K
from .errors import DeclarationError, GradingError, ModelSyntaxError, OddDenominatorError
from .kernel import EVEN, ODD, Generator, GradedExpr
from .printer import dsl_expr_str

KEYWORDS = {
    "model", "parameter", "metric", "constant", "variable", "lagrangian",
    "transformation", "param", "vary", "even", "odd",
}
RESERVED = KEYWORDS | {"d", "dot", "I"}


@dataclass
class Token:
    kind: str  # IDENT NUMBER PUNCT EOF
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("NUMBER", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c in "+-*/^()[]:,":
            tokens.append(Token("PUNCT", c, line, start_col))
            i += 1
            col += 1
            continue
        raise ModelSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# -- AST ---------------------------------------------------------------------


@dataclass
class Node:
    line: int
    col: int


@dataclass
class Num(Node):
    value: int


@dataclass
class Imag(Node):
    pass


@dataclass
class Name(Node):
    ident: str


@dataclass
class Indexed(Node):
    ident: str
    index: int


@dataclass
class Vel(Node):
    arg: Node


@dataclass
class Dot(Node):
    left: Node
    right: Node


@dataclass
class Neg(Node):
    arg: Node


@dataclass
class Pow(Node):
    arg: Node
    exponent: int


@dataclass
class Bin(Node):
    op: str
    left: Node
    right: Node


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ModelSyntaxError(msg, tok.line, tok.col)

    def expect_punct(self, ch) -> Token:
        tok = self.next()
        if tok.kind != "PUNCT" or tok.text != ch:
            self.error(f"expected {ch!r}, found {tok.text!r}", tok)
        return tok

    def expect_ident(self, word=None) -> Token:
        tok = self.next()
        if tok.kind != "IDENT":
            self.error(f"expected identifier, found {tok.text!r}", tok)
        if word is not None and tok.text != word:
            self.error(f"expected {word!r}, found {tok.text!r}", tok)
        return tok

    def at_punct(self, ch) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == ch

    def at_ident(self, word) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    # expression grammar

    def expr(self) -> Node:
        node = self.term()
        while self.at_punct("+") or self.at_punct("-"):
            op = self.next().text
            rhs = self.term()
            node = Bin(node.line, node.col, op, node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.at_punct("*") or self.at_punct("/"):
            op = self.next().text
            rhs = self.factor()
            node = Bin(node.line, node.col, op, node, rhs)
        return node

    def factor(self) -> Node:
        if self.at_punct("-"):
            tok = self.next()
            return Neg(tok.line, tok.col, self.factor())
        node = self.atom()
        if self.at_punct("^"):
            self.next()
            tok = self.next()
            if tok.kind != "NUMBER":
                self.error("exponent must be an unsigned integer", tok)
            node = Pow(node.line, node.col, node, int(tok.text))
        return node

    def atom(self) -> Node:
        tok = self.next()
        if tok.kind == "NUMBER":
            return Num(tok.line, tok.col, int(tok.text))
        if tok.kind == "PUNCT" and tok.text == "(":
            node = self.expr()
            self.expect_punct(")")
            return node
        if tok.kind != "IDENT":
            self.error(f"expected an atom, found {tok.text!r}", tok)
        if tok.text == "I":
            return Imag(tok.line, tok.col)
        if tok.text == "d":
            self.expect_punct("(")
            arg = self.atom()
            self.expect_punct(")")
            return Vel(tok.line, tok.col, arg)
        if tok.text == "dot":
            self.expect_punct("(")
            left = self.expr()
            self.expect_punct(",")
            right = self.expr()
            self.expect_punct(")")
            return Dot(tok.line, tok.col, left, right)
        if self.at_punct("["):
            self.next()
            idx = self.next()
            if idx.kind != "NUMBER":
                self.error("index must be an unsigned integer", idx)
            self.expect_punct("]")
            return Indexed(tok.line, tok.col, tok.text, int(idx.text))
        return Name(tok.line, tok.col, tok.text)


# -- declarations ------------------------------------------------------------


@dataclass
class Declaration:
    """One declared symbol: a scalar or a 4-component family."""

    name: str
    role: str  # "parameter" | "constant" | "variable"
    parity: int
    is_family: bool
    gens: list  # component generators (length 1 or 4)
    velocities: list = field(default_factory=list)


@dataclass
class Model:
    name: str
    parameter: Generator
    metric: tuple
    declarations: list  # of Declaration, in source order
    lagrangian: GradedExpr
    side_conditions: list = field(default_factory=list)

    def coordinates(self):
        out = []
        for d in self.declarations:
            if d.role == "variable":
                out.extend(d.gens)
        return out

    def velocity_of(self, coord: Generator) -> Generator:
        for d in self.declarations:
            for g, v in zip(d.gens, d.velocities):
                if g == coord:
                    return v
        raise KeyError(coord.name)

    def coordinate_of_velocity(self, vel: Generator) -> Generator:
        for d in self.declarations:
            for g, v in zip(d.gens, d.velocities):
                if v == vel:
                    return g
        raise KeyError(vel.name)

    def declaration_of(self, gen: Generator):
        for d in self.declarations:
            if gen in d.gens or gen in d.velocities:
                return d
        return None

    def lookup(self, name: str):
        for d in self.declarations:
            if d.name == name:
                return d
        return None


def _component_name(base: str, idx: int) -> str:
    return f"{base}{idx}"


class _SymbolTable:
    def __init__(self):
        self.entries = {}
        self.next_ordinal = 0

    def fresh(self, **kw) -> Generator:
        g = Generator(ordinal=self.next_ordinal, **kw)
        self.next_ordinal += 1
        return g

    def declare(self, decl: Declaration, tok: Token):
        if decl.name in self.entries or decl.name in RESERVED:
            raise ModelSyntaxError(f"duplicate or reserved name {decl.name!r}", tok.line, tok.col)
        self.entries[decl.name] = decl


def _evaluate(node: Node, resolve, metric, idx=None) -> GradedExpr:
    """Fold an AST into a GradedExpr. ``resolve(name, node, idx, want_velocity)``
    returns a Generator; ``idx`` is the active contraction slot inside dot()."""
    if isinstance(node, Num):
        return K.scalar(node.value)
    if isinstance(node, Imag):
        return K.I
    if isinstance(node, Name):
        return K.atom(resolve(node.ident, node, idx, False))
    if isinstance(node, Indexed):
        return K.atom(resolve(node.ident, node, node.index, False))
    if isinstance(node, Vel):
        arg = node.arg
        if isinstance(arg, Name):
            return K.atom(resolve(arg.ident, arg, idx, True))
        if isinstance(arg, Indexed):
            return K.atom(resolve(arg.ident, arg, arg.index, True))
        raise ModelSyntaxError("d() takes a declared symbol", node.line, node.col)
    if isinstance(node, Dot):
        total = K.ZERO
        for mu in range(4):
            sign = metric[mu]
            piece = _evaluate(node.left, resolve, metric, mu) * _evaluate(
                node.right, resolve, metric, mu
            )
            total = total + (piece if sign > 0 else -piece)
        return total
    if isinstance(node, Neg):
        return -_evaluate(node.arg, resolve, metric, idx)
    if isinstance(node, Pow):
        return _evaluate(node.arg, resolve, metric, idx) ** node.exponent
    if isinstance(node, Bin):
        lhs = _evaluate(node.left, resolve, metric, idx)
        rhs = _evaluate(node.right, resolve, metric, idx)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        try:
            return lhs / rhs
        except OddDenominatorError as exc:
            raise ModelSyntaxError(str(exc), node.line, node.col) from exc
        except ZeroDivisionError as exc:
            raise ModelSyntaxError("division by zero", node.line, node.col) from exc
    raise AssertionError(f"unhandled node {node!r}")


def _collect_divisors(node: Node, out: list):
    if isinstance(node, Bin):
        _collect_divisors(node.left, out)
        _collect_divisors(node.right, out)
        if node.op == "/":
            out.append(node.right)
    elif isinstance(node, (Neg, Pow, Vel)):
        _collect_divisors(getattr(node, "arg"), out)
    elif isinstance(node, Dot):
        _collect_divisors(node.left, out)
        _collect_divisors(node.right, out)


def parse_model(text: str) -> Model:
    parser = _Parser(tokenize(text))
    parser.expect_ident("model")
    name_tok = parser.expect_ident()
    table = _SymbolTable()
    declarations = []
    parameter = None
    metric = None

    while not parser.at_ident("lagrangian"):
        tok = parser.next()
        if tok.kind != "IDENT":
            parser.error("expected a declaration keyword", tok)
        if tok.text == "parameter":
            ident = parser.expect_ident()
            if parameter is not None:
                parser.error("only one evolution parameter is allowed", ident)
            g = table.fresh(name=ident.text, parity=EVEN, kind="parameter")
            decl = Declaration(ident.text, "parameter", EVEN, False, [g])
            table.declare(decl, ident)
            declarations.append(decl)
            parameter = g
        elif tok.text == "metric":
            parser.expect_punct("(")
            signs = []
            for _ in range(4):
                s = parser.next()
                if s.kind != "PUNCT" or s.text not in "+-":
                    parser.error("metric entries must be + or -", s)
                signs.append(1 if s.text == "+" else -1)
            parser.expect_punct(")")
            metric = tuple(signs)
        elif tok.text in ("constant", "variable"):
            ident = parser.expect_ident()
            is_family = False
            if parser.at_punct("["):
                parser.next()
                size = parser.next()
                if size.kind != "NUMBER" or size.text != "4":
                    parser.error("only 4-component families are supported", size)
                parser.expect_punct("]")
                is_family = True
            parser.expect_punct(":")
            ptok = parser.expect_ident()
            if ptok.text not in ("even", "odd"):
                parser.error("parity must be 'even' or 'odd'", ptok)
            parity = EVEN if ptok.text == "even" else ODD
            role = tok.text
            kind = "constant" if role == "constant" else "coordinate"
            gens = []
            velocities = []
            count = 4 if is_family else 1
            for k in range(count):
                comp = k if is_family else None
                base = ident.text if is_family else None
                gname = _component_name(ident.text, k) if is_family else ident.text
                g = table.fresh(name=gname, parity=parity, kind=kind,
                                component=comp, base=base)
                gens.append(g)
                if role == "variable":
                    v = table.fresh(name=f"d_{gname}", parity=parity, kind="velocity",
                                    component=comp, base=base, linked=g.ordinal, order=1)
                    velocities.append(v)
            decl = Declaration(ident.text, role, parity, is_family, gens, velocities)
            table.declare(decl, ident)
            declarations.append(decl)
        else:
            parser.error(f"unknown declaration {tok.text!r}", tok)

    if parameter is None:
        parser.error("model declares no evolution parameter")
    if metric is None:
        metric = (1, -1, -1, -1)

    parser.expect_ident("lagrangian")
    parser.expect_punct(":")
    ast = parser.expr()
    tok = parser.peek()
    if tok.kind != "EOF":
        parser.error(f"unexpected trailing input {tok.text!r}", tok)

    def resolve(name, node, idx, want_velocity):
        decl = table.entries.get(name)
        if decl is None:
            raise ModelSyntaxError(f"undeclared identifier {name!r}", node.line, node.col)
        if want_velocity and decl.role != "variable":
            raise ModelSyntaxError(f"d() needs a variable, {name!r} is a {decl.role}",
                                   node.line, node.col)
        if decl.is_family:
            if idx is None:
                raise ModelSyntaxError(
                    f"family {name!r} needs an index or a dot() context", node.line, node.col)
            if not 0 <= idx <= 3:
                raise ModelSyntaxError(f"index {idx} out of range", node.line, node.col)
            slot = idx
        else:
            if isinstance(node, Indexed):
                raise ModelSyntaxError(f"{name!r} is not a family", node.line, node.col)
            slot = 0
        return decl.velocities[slot] if want_velocity else decl.gens[slot]

    lagrangian = _evaluate(ast, resolve, metric)
    if lagrangian.parity() == ODD:
        raise GradingError("lagrangian must be parity even")
    if lagrangian.parity() is None and not lagrangian.is_zero():
        raise GradingError("lagrangian must be parity even")

    model = Model(name_tok.text, parameter, metric, declarations, lagrangian)

    divisors = []
    _collect_divisors(ast, divisors)
    for dnode in divisors:
        dexpr = _evaluate(dnode, resolve, metric)
        if not dexpr.is_scalar():
            _add_side_condition(model, dexpr)
    return model


def _add_side_condition(model: Model, expr: GradedExpr):
    if expr.num:
        lead = GradedExpr((K.Monomial(expr.num[0].coeff),))
        expr = expr / lead
    for existing in model.side_conditions:
        if K.equals(existing, expr):
            return
    model.side_conditions.append(expr)


# -- transformations ----------------------------------------------------------


@dataclass
class Transformation:
    """First-order variation of a model's variables, with one parameter."""

    name: str
    param: Generator
    param_velocity: Generator
    variations: dict  # coordinate Generator -> GradedExpr


def parse_transformation(text: str, model: Model) -> Transformation:
    parser = _Parser(tokenize(text))
    parser.expect_ident("transformation")
    name_tok = parser.expect_ident()

    parser.expect_ident("param")
    ptok = parser.expect_ident()
    parser.expect_punct(":")
    parity_tok = parser.expect_ident()
    if parity_tok.text not in ("even", "odd"):
        parser.error("parity must be 'even' or 'odd'", parity_tok)
    parity = EVEN if parity_tok.text == "even" else ODD
    if model.lookup(ptok.text) is not None or ptok.text in RESERVED:
        parser.error(f"parameter name {ptok.text!r} clashes with the model", ptok)

    next_ordinal = max(g.ordinal for d in model.declarations
                       for g in d.gens + d.velocities) + 1
    param = Generator(name=ptok.text, parity=parity, kind="parameter",
                      ordinal=next_ordinal)
    param_vel = Generator(name=f"d_{ptok.text}", parity=parity, kind="velocity",
                          ordinal=next_ordinal + 1, linked=param.ordinal, order=1)

    def resolve(name, node, idx, want_velocity):
        if name == param.name:
            return param_vel if want_velocity else param
        decl = model.lookup(name)
        if decl is None:
            raise ModelSyntaxError(f"undeclared identifier {name!r}", node.line, node.col)
        if want_velocity and decl.role != "variable":
            raise ModelSyntaxError(f"d() needs a variable, {name!r} is a {decl.role}",
                                   node.line, node.col)
        if decl.is_family:
            if idx is None:
                raise ModelSyntaxError(
                    f"family {name!r} needs an index or a dot() context", node.line, node.col)
            slot = idx
        else:
            slot = 0
        return decl.velocities[slot] if want_velocity else decl.gens[slot]

    variations = {}
    while not parser.at_ident("vary") and parser.peek().kind != "EOF":
        parser.error("expected 'vary' declarations")
    while parser.at_ident("vary"):
        parser.next()
        target = parser.expect_ident()
        parser.expect_punct(":")
        ast = parser.expr()
        decl = model.lookup(target.text)
        if decl is None or decl.role != "variable":
            parser.error(f"vary target {target.text!r} is not a model variable", target)
        for slot, gen in enumerate(decl.gens):
            idx = slot if decl.is_family else None
            delta = _evaluate(ast, resolve, model.metric, idx)
            if gen in variations:
                parser.error(f"duplicate vary for {target.text!r}", target)
            p = delta.parity()
            if p is not None and p != gen.parity:
                raise GradingError(
                    f"variation of {gen.name} has parity {p}, expected {gen.parity}")
            variations[gen] = delta
    tok = parser.peek()
    if tok.kind != "EOF":
        parser.error(f"unexpected trailing input {tok.text!r}", tok)
    return Transformation(name_tok.text, param, param_vel, variations)


# -- model printer -------------------------------------------------------------


def print_model(model: Model) -> str:
    """Emit a model file that re-parses to a structurally equal Model."""
    lines = [f"model {model.name}"]
    for d in model.declarations:
        if d.role == "parameter":
            lines.append(f"parameter {d.name}")
            signs = " ".join("+" if s > 0 else "-" for s in model.metric)
            lines.append(f"metric ({signs})")
        else:
            suffix = "[4]" if d.is_family else ""
            parity = "even" if d.parity == EVEN else "odd"
            lines.append(f"{d.role} {d.name}{suffix} : {parity}")

    def velocity_name(g: Generator) -> str:
        coord = model.coordinate_of_velocity(g)
        if coord.component is not None and coord.base is not None:
            return f"d({coord.base}[{coord.component}])"
        return f"d({coord.name})"

    lines.append("lagrangian: " + dsl_expr_str(model.lagrangian, velocity_name))
    return "\n".join(lines) + "\n"
