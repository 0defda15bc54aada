"""
Surgery plans: a line-oriented language for lattice computations.

One statement per line, '#' starts a comment. Parsing resolves every name a
statement refers to, so a plan that parses can only fail at run time on
arithmetic, never on spelling.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from surgery.errors import PlanArityError, PlanReferenceError, PlanSyntaxError, SurgeryError

logger = logging.getLogger(__name__)

Expr = Tuple[Tuple[int, str], ...]

PLAN_GRAMMAR = r"""
start: _NL? (_statement _NL)*

_statement: surface_blowup | surface_ruled | surface_abstract | square | meet
          | canonical | canonical_zero | invariants | convert | class_def | blowup
          | resolve | relation | ledger | component | step | finalize | block
          | fibration | plumbing | embed | blowdown | certify | expect | claim
          | basic | derivation | assume | assertion | report

surface_blowup: "surface" "blowup" INT
surface_ruled: "surface" "ruled" INT
surface_abstract: "surface" "abstract" NAME+
square: "square" NAME "=" signed
meet: "meet" NAME NAME "=" signed
canonical: "canonical" "=" expr
canonical_zero: "canonical" "zero"
invariants: "invariants" "euler" signed "signature" signed
convert: "convert" "blowup"
class_def: "class" NAME "=" expr
blowup: "blowup" INT?
resolve: "resolve" NAME "=" part ("+" part)*
part: NAME
    | "(" expr ")"
relation: "relation" expr "=" expr
ledger: "ledger" NAME "base" NAME
component: "component" NAME "mult" INT
step: "step" drop* "->" NAME ("=" expr)? "mult" INT
drop: NAME (":" INT)?
finalize: "finalize" NAME?
block: "block" NAME
fibration: "fibration" "Kf2" signed "chi" signed "genus" INT "base" INT
plumbing: "plumbing" INT INT
embed: "embed" NAME "=" expr
blowdown: "blowdown" NAME?
certify: "certify"
expect: "expect" "functional" REST
claim: "claim" NAME ESCAPED_STRING
basic: "basic" NAME NAME?
derivation: "derivation" NAME
assume: "assume" "sc" ESCAPED_STRING
assertion: "assert" KEY (ESCAPED_STRING | BARE)
report: "report"

expr: lead_term term*
lead_term: SIGN? INT? NAME
term: SIGN INT? NAME
signed: SIGN? INT

SIGN: "+" | "-"
NAME: /[A-Za-z_][A-Za-z0-9_']*/
KEY: /[A-Za-z0-9_.'\-]+/
BARE: /[^\s#"]+/
REST: /[^\n#]+/
COMMENT: /#[^\n]*/
_NL: /(\r?\n[\t ]*(#[^\n]*)?)+/

%import common.INT
%import common.ESCAPED_STRING
%ignore /[ \t]+/
%ignore COMMENT
"""

_parser = Lark(PLAN_GRAMMAR, parser='lalr', propagate_positions=True)

BLOCK_KINDS = ('ix2', 'ix4')
BLOWDOWN_TAG = 'blowdown'
FIBER_NAME = 'fiber'
BASIC_OPERATIONS = {'zero': 0, 'taubes': 0, 'blowup': 1, 'descend': 0, 'minimal': 0, 'standard': 0}
_VERTEX = re.compile(r"u(\d+)$")
_EXCEPTIONAL = re.compile(r"e(\d+)$")


@dataclass(frozen=True)
class Statement:
    kind: str
    args: Tuple[Any, ...] = ()
    line: Optional[int] = field(default=None, compare=False)
    column: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class SurgeryPlan:
    statements: Tuple[Statement, ...]
    name: str = field(default='', compare=False)

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)


# ═══════════════════════════════════════════════════════════════════════════════
# PARSE TREE -> STATEMENTS
# ═══════════════════════════════════════════════════════════════════════════════

def _unquote(token) -> str:
    return json.loads(str(token))


@v_args(meta=True)
class _PlanBuilder(Transformer):
    def _statement(self, kind, meta, *args) -> Statement:
        return Statement(kind, tuple(args), meta.line, meta.column)

    # values

    def signed(self, meta, children):
        sign = -1 if len(children) == 2 and str(children[0]) == '-' else 1
        return sign * int(children[-1])

    def lead_term(self, meta, children):
        sign, size = 1, 1
        for token in children[:-1]:
            if token.type == 'SIGN':
                sign = -1 if str(token) == '-' else 1
            else:
                size = int(token)
        return sign * size, str(children[-1])

    term = lead_term

    def expr(self, meta, children):
        return tuple(children)

    def part(self, meta, children):
        value = children[0]
        if isinstance(value, tuple):
            return 'expr', value
        return 'name', str(value)

    def drop(self, meta, children):
        return str(children[0]), int(children[1]) if len(children) > 1 else 1

    # statements

    def surface_blowup(self, meta, children):
        return self._statement('surface', meta, 'blowup', int(children[0]))

    def surface_ruled(self, meta, children):
        return self._statement('surface', meta, 'ruled', int(children[0]))

    def surface_abstract(self, meta, children):
        return self._statement('surface', meta, 'abstract', tuple(str(c) for c in children))

    def square(self, meta, children):
        return self._statement('square', meta, str(children[0]), children[1])

    def meet(self, meta, children):
        return self._statement('meet', meta, str(children[0]), str(children[1]), children[2])

    def canonical(self, meta, children):
        return self._statement('canonical', meta, children[0])

    def canonical_zero(self, meta, children):
        return self._statement('canonical', meta, None)

    def invariants(self, meta, children):
        return self._statement('invariants', meta, children[0], children[1])

    def convert(self, meta, children):
        return self._statement('convert', meta, 'blowup')

    def class_def(self, meta, children):
        return self._statement('class', meta, str(children[0]), children[1])

    def blowup(self, meta, children):
        return self._statement('blowup', meta, int(children[0]) if children else 1)

    def resolve(self, meta, children):
        if len(children) < 3:
            raise PlanArityError("resolve needs at least two parts", meta.line, meta.column)
        return self._statement('resolve', meta, str(children[0]), tuple(children[1:]))

    def relation(self, meta, children):
        return self._statement('relation', meta, children[0], children[1])

    def ledger(self, meta, children):
        return self._statement('ledger', meta, str(children[0]), str(children[1]))

    def component(self, meta, children):
        return self._statement('component', meta, str(children[0]), int(children[1]))

    def step(self, meta, children):
        drops = tuple(c for c in children if isinstance(c, tuple) and len(c) == 2 and isinstance(c[1], int))
        rest = children[len(drops):]
        name = str(rest[0])
        exceptional = rest[1] if len(rest) == 3 else None
        return self._statement('step', meta, drops, name, exceptional, int(rest[-1]))

    def finalize(self, meta, children):
        return self._statement('finalize', meta, str(children[0]) if children else FIBER_NAME)

    def block(self, meta, children):
        kind = str(children[0])
        if kind not in BLOCK_KINDS:
            raise PlanArityError(f"block expects one of {', '.join(BLOCK_KINDS)}, got '{kind}'",
                                 meta.line, meta.column)
        return self._statement('block', meta, kind)

    def fibration(self, meta, children):
        return self._statement('fibration', meta, children[0], children[1], int(children[2]), int(children[3]))

    def plumbing(self, meta, children):
        return self._statement('plumbing', meta, int(children[0]), int(children[1]))

    def embed(self, meta, children):
        name = str(children[0])
        match = _VERTEX.match(name)
        if not match or int(match.group(1)) < 1:
            raise PlanArityError(f"embed targets u1, u2, ...; got '{name}'", meta.line, meta.column)
        return self._statement('embed', meta, int(match.group(1)), children[1])

    def blowdown(self, meta, children):
        return self._statement('blowdown', meta, str(children[0]) if children else BLOWDOWN_TAG)

    def certify(self, meta, children):
        return self._statement('certify', meta)

    def expect(self, meta, children):
        return self._statement('expect', meta, str(children[0]).strip())

    def claim(self, meta, children):
        return self._statement('claim', meta, str(children[0]), _unquote(children[1]))

    def basic(self, meta, children):
        operation = str(children[0])
        if operation not in BASIC_OPERATIONS:
            raise PlanArityError(f"unknown basic-class operation '{operation}'", meta.line, meta.column)
        if len(children) - 1 != BASIC_OPERATIONS[operation]:
            raise PlanArityError(f"basic {operation} takes {BASIC_OPERATIONS[operation]} argument(s)",
                                 meta.line, meta.column)
        return self._statement('basic', meta, operation, str(children[1]) if len(children) > 1 else None)

    def derivation(self, meta, children):
        return self._statement('derivation', meta, str(children[0]))

    def assume(self, meta, children):
        return self._statement('assume', meta, _unquote(children[0]))

    def assertion(self, meta, children):
        value = children[1]
        text = _unquote(value) if value.type == 'ESCAPED_STRING' else str(value)
        return self._statement('assert', meta, str(children[0]), text)

    def report(self, meta, children):
        return self._statement('report', meta)

    def start(self, meta, children):
        return list(children)


# ═══════════════════════════════════════════════════════════════════════════════
# NAME RESOLUTION
# ═══════════════════════════════════════════════════════════════════════════════

def _next_exceptional(generators: Sequence[str]) -> str:
    used = [int(m.group(1)) for m in map(_EXCEPTIONAL.match, generators) if m]
    return f"e{max(used, default=0) + 1}"


class _Scope:
    def __init__(self):
        self.generators: List[str] = []
        self.classes: Set[str] = set()
        self.ruled: Optional[int] = None
        self.ledger: Optional[Set[str]] = None

    def known(self, name: str) -> bool:
        return name in self.generators or name in self.classes

    def require(self, name: str, statement: Statement) -> None:
        if not self.known(name):
            raise PlanReferenceError(name, statement.line, statement.column)

    def require_expr(self, expr: Expr, statement: Statement) -> None:
        for _, name in expr:
            self.require(name, statement)


def check_references(statements: Sequence[Statement]) -> None:
    """Raise PlanReferenceError at the first statement naming an undefined symbol."""
    scope = _Scope()
    for st in statements:
        kind, args = st.kind, st.args
        if kind == 'surface':
            scope.classes = set()
            scope.ledger = None
            scope.ruled = None
            if args[0] == 'blowup':
                scope.generators = ['h'] + [f"e{i}" for i in range(1, args[1] + 1)]
            elif args[0] == 'ruled':
                scope.generators = ['Cinf', 'F']
                scope.classes = {'C0'}
                scope.ruled = args[1]
            else:
                scope.generators = list(args[1])
        elif kind == 'square':
            scope.require(args[0], st)
        elif kind == 'meet':
            scope.require(args[0], st)
            scope.require(args[1], st)
        elif kind == 'canonical' and args[0] is not None:
            scope.require_expr(args[0], st)
        elif kind == 'convert':
            if scope.ruled is None:
                raise PlanArityError("convert needs a ruled surface", st.line, st.column)
            scope.generators = ['h', 'e1', 'e2'] if scope.ruled == 2 else ['h', 'e1']
            scope.classes |= {'Cinf', 'F', 'C0'}
            scope.ruled = None
        elif kind == 'class':
            scope.require_expr(args[1], st)
            scope.classes.add(args[0])
        elif kind == 'blowup':
            for _ in range(args[0]):
                scope.generators.append(_next_exceptional(scope.generators))
        elif kind == 'resolve':
            for tag, value in args[1]:
                if tag == 'name':
                    scope.require(value, st)
                else:
                    scope.require_expr(value, st)
            scope.classes.add(args[0])
        elif kind == 'relation':
            scope.require_expr(args[0], st)
            scope.require_expr(args[1], st)
        elif kind == 'ledger':
            scope.require(args[1], st)
            scope.ledger = set()
        elif kind in ('component', 'step', 'finalize') and scope.ledger is None:
            raise PlanReferenceError(kind, st.line, st.column, f"'{kind}' outside an open ledger")
        elif kind == 'component':
            scope.require(args[0], st)
            scope.ledger.add(args[0])
        elif kind == 'step':
            drops, name, exceptional, multiplicity = args
            for component, _ in drops:
                if component not in scope.ledger:
                    raise PlanReferenceError(component, st.line, st.column,
                                             f"'{component}' is not a component of the open ledger")
            if exceptional is None:
                expected = _next_exceptional(scope.generators)
                if name != expected:
                    raise PlanReferenceError(name, st.line, st.column,
                                             f"step names '{name}' but the next exceptional curve is '{expected}'")
                scope.generators.append(name)
            else:
                scope.require_expr(exceptional, st)
            if multiplicity:
                scope.ledger.add(name)
        elif kind == 'finalize':
            scope.classes.add(args[0])
            scope.ledger = None
        elif kind == 'embed':
            scope.require_expr(args[1], st)
        elif kind == 'basic' and args[0] == 'blowup':
            scope.require(args[1], st)


def parse(text: str, name: str = '', resolve_names: bool = True) -> SurgeryPlan:
    if not text.endswith('\n'):
        text += '\n'
    try:
        tree = _parser.parse(text)
    except (UnexpectedCharacters, UnexpectedToken) as err:
        raise PlanSyntaxError(f"unexpected input {_describe(err)}", err.line, err.column) from err
    except UnexpectedEOF as err:
        raise PlanSyntaxError("unexpected end of plan", err.line, err.column) from err
    except UnexpectedInput as err:
        raise PlanSyntaxError("malformed plan", err.line, err.column) from err
    try:
        statements = _PlanBuilder().transform(tree)
    except VisitError as err:
        if isinstance(err.orig_exc, SurgeryError):
            raise err.orig_exc from err
        raise
    if resolve_names:
        check_references(statements)
    logger.debug("parsed plan %s: %d statements", name or '<text>', len(statements))
    return SurgeryPlan(tuple(statements), name)


def _describe(err: UnexpectedInput) -> str:
    token = getattr(err, 'token', None)
    if token is not None:
        return f"'{token}'" if str(token).strip() else 'end of line'
    char = getattr(err, 'char', None)
    return f"'{char}'" if char else ''


def load_plan(path) -> SurgeryPlan:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as err:
        raise PlanSyntaxError(f"cannot read plan {path}: {err.strerror}") from err
    return parse(text, path.stem)


# ═══════════════════════════════════════════════════════════════════════════════
# PRETTY PRINTER
# ═══════════════════════════════════════════════════════════════════════════════

def format_expr(expr: Expr) -> str:
    pieces = []
    for position, (coefficient, name) in enumerate(expr):
        size = abs(coefficient)
        body = f"{'' if size == 1 else size}{name}"
        if coefficient < 0:
            pieces.append(f"-{body}")
        elif position:
            pieces.append(f"+{body}")
        else:
            pieces.append(body)
    return ' '.join(pieces)


def _quote(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def _bare(text: str) -> str:
    if not text or re.search(r'[\s#"]', text):
        return _quote(text)
    return text


def format_statement(st: Statement) -> str:
    kind, args = st.kind, st.args
    if kind == 'surface':
        if args[0] == 'abstract':
            return f"surface abstract {' '.join(args[1])}"
        return f"surface {args[0]} {args[1]}"
    if kind == 'square':
        return f"square {args[0]} = {args[1]}"
    if kind == 'meet':
        return f"meet {args[0]} {args[1]} = {args[2]}"
    if kind == 'canonical':
        return 'canonical zero' if args[0] is None else f"canonical = {format_expr(args[0])}"
    if kind == 'invariants':
        return f"invariants euler {args[0]} signature {args[1]}"
    if kind == 'convert':
        return 'convert blowup'
    if kind == 'class':
        return f"class {args[0]} = {format_expr(args[1])}"
    if kind == 'blowup':
        return f"blowup {args[0]}"
    if kind == 'resolve':
        parts = [value if tag == 'name' else f"({format_expr(value)})" for tag, value in args[1]]
        return f"resolve {args[0]} = {' + '.join(parts)}"
    if kind == 'relation':
        return f"relation {format_expr(args[0])} = {format_expr(args[1])}"
    if kind == 'ledger':
        return f"ledger {args[0]} base {args[1]}"
    if kind == 'component':
        return f"component {args[0]} mult {args[1]}"
    if kind == 'step':
        drops, name, exceptional, multiplicity = args
        head = ' '.join(c if d == 1 else f"{c}:{d}" for c, d in drops)
        target = name if exceptional is None else f"{name} = {format_expr(exceptional)}"
        return f"step {head + ' ' if head else ''}-> {target} mult {multiplicity}"
    if kind == 'fibration':
        return f"fibration Kf2 {args[0]} chi {args[1]} genus {args[2]} base {args[3]}"
    if kind == 'plumbing':
        return f"plumbing {args[0]} {args[1]}"
    if kind == 'embed':
        return f"embed u{args[0]} = {format_expr(args[1])}"
    if kind == 'expect':
        return f"expect functional {args[0]}"
    if kind == 'claim':
        return f"claim {args[0]} {_quote(args[1])}"
    if kind == 'basic':
        return f"basic {args[0]}" if args[1] is None else f"basic {args[0]} {args[1]}"
    if kind == 'assume':
        return f"assume sc {_quote(args[0])}"
    if kind == 'assert':
        return f"assert {args[0]} {_bare(args[1])}"
    if kind == 'blowdown':
        return 'blowdown' if args[0] == BLOWDOWN_TAG else f"blowdown {args[0]}"
    if kind in ('finalize', 'block', 'derivation'):
        return f"{kind} {args[0]}"
    if kind in ('certify', 'report'):
        return kind
    raise PlanSyntaxError(f"cannot format statement kind '{kind}'")


def format_plan(plan: SurgeryPlan) -> str:
    return ''.join(format_statement(st) + '\n' for st in plan.statements)
