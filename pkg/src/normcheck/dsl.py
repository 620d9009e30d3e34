"""Reader and canonical writer for ``.nms`` model files.

The grammar is small enough for a hand-written lexer and a recursive-descent
parser with one token of lookahead. Parsing happens in two passes: the first
collects statements (recovering at the next statement keyword after a syntax
error), the second resolves identifiers across every statement of every input
file so forward references and multi-file models work.

Diagnostic codes:

    P001  unexpected token or character (also: byte-order mark, bad UTF-8)
    P002  duplicate identifier, binding or realization
    P003  reference to an unknown or wrong-kind identifier
    P004  malformed refinement (bad ``select``, duplicate child, cycle)
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .model import (
    Actor, Argument, ArgumentKind, Goal, GoalKind, Modality, Model, NormativeProposition,
    RealizationRelation, Refinement, RefinementMode, SubjectBinding, Task, hypothesis_argument,
    refinement_cycles, validate_referential_integrity,
)


@dataclass(frozen=True, order=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 0

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan

    def __str__(self):
        return f"{self.span}: {self.severity.value} {self.code}: {self.message}"


class ParseError(Exception):
    """Raised when a source has at least one error diagnostic."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(map(str, diagnostics)))


STATEMENT_KEYWORDS = frozenset({"np", "actor", "binding", "goal", "task", "realize", "affects", "argument"})
KEYWORDS = STATEMENT_KEYWORDS | frozenset({
    "subject", "modality", "duty", "right", "desc", "name", "is", "not", "justified_by",
    "owner", "compliance", "refine", "and", "or", "select", "supports", "revises", "rejects",
    "evidence", "claim",
})

ARGUMENT_VERBS = {
    "supports": ArgumentKind.SUPPORT,
    "revises": ArgumentKind.REVISION_ATTACK,
    "rejects": ArgumentKind.REJECTION_ATTACK,
    "evidence": ArgumentKind.EVIDENCE,
}
VERB_OF_KIND = {v: k for k, v in ARGUMENT_VERBS.items()}

ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}
UNESCAPES = {v: "\\" + k for k, v in ESCAPES.items()}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>")
  | (?P<arrow>->)
  | (?P<punct>[{}\[\],])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # ID, KW, STRING, PUNCT, ARROW, EOF
    value: str
    span: SourceSpan


def _lex(source: str, file: str, diags: list[ParseDiagnostic]) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(source)

    def span(start, length):
        return SourceSpan(file, line, start - line_start + 1, length)

    if source.startswith("\ufeff"):
        diags.append(ParseDiagnostic(Severity.ERROR, "P001", "byte-order mark is not allowed", span(0, 1)))
        pos = 1
        line_start = 1

    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            diags.append(ParseDiagnostic(Severity.ERROR, "P001", f"unexpected character {source[pos]!r}", span(pos, 1)))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "ws":
            text = m.group()
            nl = text.rfind("\n")
            if nl >= 0:
                line += text.count("\n")
                line_start = pos + nl + 1
            pos = m.end()
        elif kind == "comment":
            pos = m.end()
        elif kind == "ident":
            word = m.group()
            tokens.append(Token("KW" if word in KEYWORDS else "ID", word, span(pos, len(word))))
            pos = m.end()
        elif kind == "arrow":
            tokens.append(Token("ARROW", "->", span(pos, 2)))
            pos = m.end()
        elif kind == "punct":
            tokens.append(Token("PUNCT", m.group(), span(pos, 1)))
            pos = m.end()
        else:
            start = pos
            pos += 1
            chars = []
            while True:
                if pos >= n or source[pos] == "\n":
                    diags.append(ParseDiagnostic(Severity.ERROR, "P001", "unterminated string", span(start, pos - start)))
                    break
                c = source[pos]
                if c == '"':
                    pos += 1
                    tokens.append(Token("STRING", "".join(chars), span(start, pos - start)))
                    break
                if c == "\\":
                    esc = source[pos + 1] if pos + 1 < n else ""
                    if esc not in ESCAPES:
                        diags.append(ParseDiagnostic(Severity.ERROR, "P001", f"unknown escape \\{esc}", span(pos, 2)))
                        pos += 2 if esc and esc != "\n" else 1
                        continue
                    chars.append(ESCAPES[esc])
                    pos += 2
                    continue
                chars.append(c)
                pos += 1
    tokens.append(Token("EOF", "", span(pos, 0)))
    return tokens


class _Sync(Exception):
    pass


Ref = tuple[str, SourceSpan]


@dataclass
class _Statements:
    """Raw statements collected from one or more files, in source order."""

    nps: list = field(default_factory=list)
    actors: list = field(default_factory=list)
    bindings: list = field(default_factory=list)
    goals: list = field(default_factory=list)
    tasks: list = field(default_factory=list)
    realizations: list = field(default_factory=list)
    affects: list = field(default_factory=list)
    arguments: list = field(default_factory=list)
    files: list = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[Token], out: _Statements, diags: list[ParseDiagnostic]):
        self.tokens = tokens
        self.i = 0
        self.out = out
        self.diags = diags

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def error(self, expected: str):
        t = self.tok
        found = "end of file" if t.kind == "EOF" else repr(t.value)
        self.diags.append(ParseDiagnostic(Severity.ERROR, "P001", f"expected {expected}, found {found}", t.span))
        raise _Sync

    def at(self, value: str) -> bool:
        return self.tok.kind in ("KW", "PUNCT", "ARROW") and self.tok.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(repr(value))
        return self.advance()

    def ident(self, what="identifier") -> Ref:
        if self.tok.kind != "ID":
            self.error(what)
        t = self.advance()
        return t.value, t.span

    def string(self) -> str:
        if self.tok.kind != "STRING":
            self.error("string")
        return self.advance().value

    def ident_list(self) -> list[Ref]:
        refs = [self.ident()]
        while self.accept(","):
            refs.append(self.ident())
        return refs

    def parse(self):
        while self.tok.kind != "EOF":
            start = self.i
            try:
                self.statement()
            except _Sync:
                if self.i == start:
                    self.advance()
                while self.tok.kind != "EOF" and not (self.tok.kind == "KW" and self.tok.value in STATEMENT_KEYWORDS):
                    self.advance()

    def statement(self):
        t = self.tok
        if t.kind != "KW" or t.value not in STATEMENT_KEYWORDS:
            self.error("statement keyword")
        self.advance()
        getattr(self, "stmt_" + t.value)(t.span)

    def stmt_np(self, span):
        ident = self.ident("normative proposition id")
        self.expect("{")
        self.expect("subject")
        subject = self.string()
        self.expect("modality")
        if not (self.at("duty") or self.at("right")):
            self.error("'duty' or 'right'")
        modality = Modality(self.advance().value)
        desc = self.string() if self.accept("desc") else ""
        self.expect("}")
        self.out.nps.append((ident, NormativeProposition(ident[0], subject, modality, desc)))

    def stmt_actor(self, span):
        ident = self.ident("actor id")
        name = ""
        if self.accept("{"):
            self.expect("name")
            name = self.string()
            self.expect("}")
        self.out.actors.append((ident, Actor(ident[0], name)))

    def stmt_binding(self, span):
        actor = self.ident("actor id")
        self.expect("is")
        negated = self.accept("not")
        role = self.string()
        self.expect("justified_by")
        just = self.ident("argument id")
        self.out.bindings.append((span, actor, just, SubjectBinding(actor[0], role, just[0], negated)))

    def stmt_goal(self, span):
        ident = self.ident("goal id")
        self.expect("owner")
        owner = self.ident("actor id")
        kind = GoalKind.COMPLIANCE if self.accept("compliance") else GoalKind.STRATEGIC
        desc, refine = "", None
        if self.accept("{"):
            if self.accept("desc"):
                desc = self.string()
            if self.at("refine"):
                rspan = self.advance().span
                if not (self.at("and") or self.at("or")):
                    self.error("'and' or 'or'")
                mode = RefinementMode(self.advance().value)
                self.expect("[")
                children = self.ident_list()
                self.expect("]")
                select = self.ident() if self.accept("select") else None
                refine = (rspan, mode, children, select)
            self.expect("}")
        self.out.goals.append((ident, owner, refine, Goal(ident[0], owner[0], desc, kind)))

    def stmt_task(self, span):
        ident = self.ident("task id")
        desc = ""
        if self.accept("{"):
            self.expect("desc")
            desc = self.string()
            self.expect("}")
        self.out.tasks.append((ident, Task(ident[0], desc)))

    def stmt_realize(self, span):
        goal = self.ident("goal id")
        self.expect("->")
        np = self.ident("normative proposition id")
        self.out.realizations.append((span, goal, np))

    def stmt_affects(self, span):
        np = self.ident("normative proposition id")
        goal = self.ident("goal id")
        self.out.affects.append((span, np, goal))

    def stmt_argument(self, span):
        ident = self.ident("argument id")
        if self.tok.kind != "KW" or self.tok.value not in ARGUMENT_VERBS:
            self.error("'supports', 'revises', 'rejects' or 'evidence'")
        kind = ARGUMENT_VERBS[self.advance().value]
        targets: list[Ref] = []
        if kind is not ArgumentKind.EVIDENCE or self.tok.kind == "ID":
            targets = self.ident_list()
        self.expect("{")
        self.expect("claim")
        claim = self.string()
        self.expect("}")
        self.out.arguments.append((ident, targets, Argument(ident[0], claim, kind, [t[0] for t in targets])))


def _collect(sources: Iterable[tuple[str, str]], diags: list[ParseDiagnostic]) -> _Statements:
    out = _Statements()
    for file, text in sources:
        out.files.append(file)
        _Parser(_lex(text, file, diags), out, diags).parse()
    return out


def _resolve(st: _Statements, diags: list[ParseDiagnostic], local: bool = False) -> Model:
    def err(code, message, span, severity=Severity.ERROR):
        diags.append(ParseDiagnostic(severity, code, message, span))

    kinds: dict[str, tuple[str, SourceSpan]] = {}

    def declare(kind, ref: Ref) -> bool:
        name, span = ref
        if name in kinds:
            prev_kind, prev_span = kinds[name]
            err("P002", f"duplicate id {name!r} (already declared as {prev_kind} at {prev_span})", span)
            return False
        kinds[name] = (kind, span)
        return True

    # Declarations in source order so the reported duplicate is the later one.
    decls = []
    for ref, np in st.nps:
        decls.append((ref[1], "np", ref))
    for ref, _ in st.actors:
        decls.append((ref[1], "actor", ref))
    for ref, *_ in st.goals:
        decls.append((ref[1], "goal", ref))
    for ref, _ in st.tasks:
        decls.append((ref[1], "task", ref))
    for ref, *_ in st.arguments:
        decls.append((ref[1], "argument", ref))
    realize_decls = []
    for span, goal, np in st.realizations:
        hyp = RealizationRelation(goal[0], np[0]).hypothesis
        decls.append((span, "hypothesis", (hyp, span)))
        realize_decls.append(hyp)
    decls.sort(key=lambda d: (d[0].file, d[0].line, d[0].column))
    accepted = set()
    for _, kind, ref in decls:
        if declare(kind, ref):
            accepted.add((kind, ref))

    def check(ref: Ref, *allowed: str, what: str) -> bool:
        if local:
            return True
        name, span = ref
        if name not in kinds:
            err("P003", f"unknown {what} {name!r}", span)
            return False
        kind = kinds[name][0]
        if allowed and kind not in allowed:
            err("P003", f"{name!r} is a {kind}, expected {what}", span)
            return False
        return True

    nps = [np for ref, np in st.nps if ("np", ref) in accepted]
    actors = [a for ref, a in st.actors if ("actor", ref) in accepted]
    tasks = [t for ref, t in st.tasks if ("task", ref) in accepted]

    goals = []
    refine_spans = {}
    for ref, owner, refine, goal in st.goals:
        check(owner, "actor", what="actor")
        if refine is not None:
            rspan, mode, children, select = refine
            refine_spans[goal.id] = rspan
            names = [c[0] for c in children]
            for c in children:
                check(c, "goal", "task", what="goal or task")
            if len(set(names)) != len(names):
                err("P004", f"refinement of {goal.id} lists a child twice", rspan)
            if select is not None:
                if mode is RefinementMode.AND:
                    err("P004", "'select' is only allowed on 'or' refinements", select[1])
                elif select[0] not in names:
                    err("P004", f"selected {select[0]!r} is not a child of {goal.id}", select[1])
            goal = Goal(goal.id, goal.owner, goal.description, goal.kind,
                        Refinement(mode, tuple(names), select[0] if select else None))
        if ("goal", ref) in accepted:
            goals.append(goal)

    bindings = []
    seen_bindings = {}
    for span, actor, just, b in st.bindings:
        check(actor, "actor", what="actor")
        check(just, "argument", "hypothesis", what="argument")
        if b.key in seen_bindings:
            err("P002", f"duplicate binding of {b.actor} to {b.role!r} (first at {seen_bindings[b.key]})", span)
            continue
        seen_bindings[b.key] = span
        bindings.append(b)

    realizations = []
    for span, goal, np in st.realizations:
        check(goal, "goal", what="goal")
        check(np, "np", what="normative proposition")
        rel = RealizationRelation(goal[0], np[0])
        if ("hypothesis", (rel.hypothesis, span)) in accepted:
            realizations.append((span, rel))

    affects = []
    seen_affects = {}
    for span, np, goal in st.affects:
        check(np, "np", what="normative proposition")
        check(goal, "goal", what="goal")
        key = (np[0], goal[0])
        if key in seen_affects:
            err("P002", f"repeated declaration 'affects {key[0]} {key[1]}'", span, Severity.WARNING)
        seen_affects[key] = span
        affects.append(key)

    # Hypotheses enter the log at the position of their realize statement.
    log = [(span, hypothesis_argument(rel)) for span, rel in realizations]
    for ref, targets, arg in st.arguments:
        for t in targets:
            check(t, what="target")
        if ("argument", ref) in accepted:
            log.append((ref[1], arg))
    log.sort(key=lambda e: (e[0].file, e[0].line, e[0].column))

    model = Model(
        nps=nps, actors=actors, bindings=bindings, goals=goals, tasks=tasks,
        realizations=[r for _, r in realizations], affects=affects,
        arguments=[a for _, a in log],
    )
    if local or any(d.severity is Severity.ERROR for d in diags):
        return model

    for gid in refinement_cycles(model):
        err("P004", f"refinement of {gid} is part of a cycle", refine_spans[gid])
    if not any(d.severity is Severity.ERROR for d in diags):
        # Backstop: anything the passes above missed is still reported.
        for v in validate_referential_integrity(model):
            span = kinds.get(v.element, (None, SourceSpan(st.files[0] if st.files else "<input>", 1, 1)))[1]
            code = {"DanglingRef": "P003", "DuplicateId": "P002", "DuplicateBinding": "P002",
                    "DuplicateRealization": "P002"}.get(v.code, "P004")
            err(code, f"{v.code}: {v.element} {v.detail}".rstrip(), span)
    return model


def _sort_diagnostics(diags: list[ParseDiagnostic]) -> list[ParseDiagnostic]:
    return sorted(diags, key=lambda d: (d.span.file, d.span.line, d.span.column, d.code, d.message))


def parse_sources(sources: Iterable[tuple[str, str]]) -> tuple[Model, list[ParseDiagnostic]]:
    """Parse ``(file name, text)`` pairs into one merged model.

    Returns the model and any warnings. Raises :class:`ParseError` if any
    error diagnostic was produced.
    """
    diags: list[ParseDiagnostic] = []
    st = _collect(sources, diags)
    model = _resolve(st, diags)
    diags = _sort_diagnostics(diags)
    if any(d.severity is Severity.ERROR for d in diags):
        raise ParseError(diags)
    return model, diags


def parse_model(source: str, file: str = "<input>") -> Model:
    return parse_sources([(file, source)])[0]


def parse_fragment(source: str, file: str = "<input>") -> Model:
    """Parse one file of a multi-file model without resolving references.

    Syntax errors and duplicates within the file are still reported.
    """
    diags: list[ParseDiagnostic] = []
    model = _resolve(_collect([(file, source)], diags), diags, local=True)
    diags = _sort_diagnostics(diags)
    if any(d.severity is Severity.ERROR for d in diags):
        raise ParseError(diags)
    return model


def format_source(source: str, file: str = "<input>") -> str:
    return serialize_model(parse_fragment(source, file))


def decode_source(data: bytes, file: str) -> str:
    """Decode file bytes as UTF-8, raising :class:`ParseError` (P001) otherwise."""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        prefix = data[: e.start].decode("utf-8", errors="replace")
        line = prefix.count("\n") + 1
        col = len(prefix) - (prefix.rfind("\n") + 1) + 1
        raise ParseError([ParseDiagnostic(Severity.ERROR, "P001", "source is not valid UTF-8",
                                          SourceSpan(file, line, col, 1))]) from None


def quote(text: str) -> str:
    return '"' + "".join(UNESCAPES.get(c, c) for c in text) + '"'


def _serialize_sections(model: Model) -> Iterator[list[str]]:
    yield [
        f"np {np.id} {{ subject {quote(np.subject_role)} modality {np.modality.value}"
        + (f" desc {quote(np.description)}" if np.description else "") + " }"
        for np in model.nps
    ]
    yield [f"actor {a.id}" + (f" {{ name {quote(a.name)} }}" if a.name else "") for a in model.actors]
    yield [f"task {t.id}" + (f" {{ desc {quote(t.description)} }}" if t.description else "") for t in model.tasks]
    goals = []
    for g in model.goals:
        head = f"goal {g.id} owner {g.owner}" + (" compliance" if g.kind is GoalKind.COMPLIANCE else "")
        body = []
        if g.description:
            body.append(f"  desc {quote(g.description)}")
        if g.refinement is not None:
            r = g.refinement
            line = f"  refine {r.mode.value} [{', '.join(r.children)}]"
            if r.selected is not None:
                line += f" select {r.selected}"
            body.append(line)
        goals.append("\n".join([head + " {", *body, "}"]) if body else head)
    yield goals
    yield [f"realize {r.goal} -> {r.np}" for r in model.realizations]
    yield [f"affects {np} {goal}" for np, goal in model.affects]
    yield [
        f"binding {b.actor} is {'not ' if b.negated else ''}{quote(b.role)} justified_by {b.justification}"
        for b in model.bindings
    ]
    args = sorted((a for a in model.arguments if a.kind is not ArgumentKind.HYPOTHESIS), key=lambda a: a.id)
    yield [
        f"argument {a.id} {VERB_OF_KIND[a.kind]}"
        + (" " + ", ".join(a.targets) if a.targets else "")
        + f" {{ claim {quote(a.claim)} }}"
        for a in args
    ]


def serialize_model(model: Model) -> str:
    """Canonical text: fixed section order, entries sorted by id, 2-space indent."""
    sections = ["\n".join(lines) for lines in _serialize_sections(model) if lines]
    return "\n\n".join(sections) + "\n" if sections else ""
