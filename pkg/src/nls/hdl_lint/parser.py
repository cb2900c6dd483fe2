"""Tolerant structural parser for Verilog/SystemVerilog modules.

Recovers the shape the lint rules need (ports, declarations with scope,
always blocks, assignments) without attempting the full IEEE grammar.
Unparseable regions are skipped with a parse note; only a missing
`module` header is fatal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from nls.errors import NlsError
from nls.hdl_lint.tokenizer import Token, significant, tokenize


class NoModuleHeaderError(NlsError):
    """Token stream contains no `module` keyword."""


DECL_KINDS = {
    "reg": "reg",
    "wire": "wire",
    "integer": "integer",
    "logic": "other",
    "bit": "other",
    "byte": "other",
    "int": "other",
    "shortint": "other",
    "longint": "other",
    "real": "other",
    "realtime": "other",
    "time": "other",
    "genvar": "other",
    "tri": "wire",
    "tri0": "wire",
    "tri1": "wire",
    "wand": "wire",
    "wor": "wire",
    "supply0": "wire",
    "supply1": "wire",
    "event": "other",
    "var": "other",
}

_ALWAYS_KINDS = ("always", "always_ff", "always_comb", "always_latch")
_GATE_PRIMITIVES = {"and", "or", "not"}  # keyword-classified gate types


@dataclass
class Port:
    name: str
    direction: str  # input | output | inout | "" (unresolved non-ANSI)
    width: int | None  # bits; 1 = scalar, None = unknown/parameterized
    is_array_port: bool
    line: int
    col: int
    net_kind: str = "wire"


@dataclass
class Declaration:
    name: str
    kind: str  # reg | wire | integer | other
    width: int | None
    scope: str  # module | always_block
    line: int
    col: int


@dataclass
class ProcAssign:
    lhs: str
    op: str  # "=" | "<="
    lhs_select: bool
    rhs_select: bool
    rhs: list[Token]
    line: int
    col: int


@dataclass
class CaseStmt:
    has_default: bool
    line: int
    col: int


@dataclass
class AlwaysBlock:
    kind: str  # always | always_ff | always_comb | always_latch | initial
    sensitivity: str  # raw text inside @(...), "*", or ""
    star: bool
    edge: bool
    sens_signals: list[str]
    assigns: list[ProcAssign] = field(default_factory=list)
    declarations: list[Declaration] = field(default_factory=list)
    cases: list[CaseStmt] = field(default_factory=list)
    reads: set[str] = field(default_factory=set)
    line: int = 0
    col: int = 0

    @property
    def has_case_without_default(self) -> bool:
        return any(not c.has_default for c in self.cases)

    @property
    def combinational(self) -> bool:
        # Edge-triggered and run-once blocks are not combinational logic.
        return self.kind not in ("always_ff", "initial") and not self.edge


@dataclass
class ContAssign:
    lhs: str
    lhs_select: bool
    rhs_select: bool
    rhs: list[Token]
    line: int
    col: int


@dataclass
class ModuleTree:
    name: str
    file: str = "<input>"
    ports: list[Port] = field(default_factory=list)
    declarations: list[Declaration] = field(default_factory=list)
    always_blocks: list[AlwaysBlock] = field(default_factory=list)
    assigns_continuous: list[ContAssign] = field(default_factory=list)
    # Sites of SystemVerilog-only parameter syntax: (line, col, detail).
    array_param_sites: list[tuple[int, int, str]] = field(default_factory=list)
    reads: set[str] = field(default_factory=set)
    instance_conns: set[str] = field(default_factory=set)
    initialized: set[str] = field(default_factory=set)  # declared with `= value`
    parse_notes: list[str] = field(default_factory=list)
    tokens: list[Token] = field(default_factory=list)

    def port(self, name: str) -> Port | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def width_of(self, name: str) -> int | None:
        """Declared width of a signal, or None when the name is unknown or
        the range was not a plain constant."""
        for d in self.declarations:
            if d.name == name:
                return d.width
        p = self.port(name)
        return p.width if p else None


class _Skip(Exception):
    """Internal: abandon the current statement and resynchronise."""


class _Parser:
    def __init__(self, toks: list[Token], file: str):
        self.toks = toks
        self.i = 0
        self.file = file
        self.tree: ModuleTree | None = None
        self._assigned_in_for: set[str] = set()

    # -- token cursor ------------------------------------------------------

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.text == text

    def at_kind(self, kind: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.kind == kind

    def note(self, msg: str) -> None:
        assert self.tree is not None
        self.tree.parse_notes.append(msg)

    def skip_to_semicolon(self) -> list[Token]:
        """Consume up to and including the next `;`, returning the span."""
        span: list[Token] = []
        depth = 0
        while self.peek() is not None:
            t = self.advance()
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            elif t.text == ";" and depth <= 0:
                return span
            elif t.text in ("endmodule", "end", "endcase"):
                # Statement ran into a closing keyword: put it back.
                self.i -= 1
                return span
            span.append(t)
        return span

    def skip_balanced(self, open_text: str, close_text: str) -> list[Token]:
        """From an opening token, consume through its matching close.
        Returns the inner tokens (excluding the delimiters)."""
        assert self.at(open_text)
        self.advance()
        inner: list[Token] = []
        depth = 1
        while self.peek() is not None:
            t = self.advance()
            if t.text == open_text:
                depth += 1
            elif t.text == close_text:
                depth -= 1
                if depth == 0:
                    return inner
            inner.append(t)
        return inner  # unbalanced: tolerate, EOF closes everything

    # -- shared helpers ----------------------------------------------------

    def collect_reads(self, span: list[Token]) -> set[str]:
        """Identifiers read within an expression span. Names directly after
        `.` are formal port names, not reads."""
        reads: set[str] = set()
        prev: Token | None = None
        for t in span:
            if t.kind == "identifier" and not t.text.startswith(("$", "`")):
                if not (prev is not None and prev.text == "."):
                    reads.add(t.text)
            prev = t
        return reads

    def range_width(self, span: list[Token]) -> int | None:
        """Width of a `[msb:lsb]` span (tokens between the brackets)."""
        if len(span) == 3 and span[1].text == ":":
            msb, lsb = span[0], span[2]
            if msb.kind == "number" and lsb.kind == "number":
                try:
                    return abs(int(msb.text) - int(lsb.text)) + 1
                except ValueError:
                    return None
        return None

    # -- module structure ----------------------------------------------------

    def parse_module(self) -> ModuleTree:
        while self.peek() is not None and not self.at("module") and not self.at("macromodule"):
            self.advance()
        if self.peek() is None:
            raise NoModuleHeaderError("no module header found")
        start = self.i
        self.advance()  # module
        name = "<anonymous>"
        if self.at_kind("identifier"):
            name = self.advance().text
        self.tree = ModuleTree(name=name, file=self.file)

        if self.at("#"):
            self.advance()
            if self.at("("):
                self.parse_header_parameters()
        if self.at("("):
            self.parse_port_list()
        if self.at(";"):
            self.advance()

        depth = 1
        while self.peek() is not None:
            if self.at("module") or self.at("macromodule"):
                depth += 1  # nested module (SV): treat body as opaque
                self.advance()
                continue
            if self.at("endmodule"):
                depth -= 1
                self.advance()
                if depth == 0:
                    break
                continue
            if depth > 1:
                self.advance()
                continue
            self.parse_module_item()
        else:
            self.note("missing endmodule; parsed to end of input")

        self.tree.tokens = self.toks[start:self.i]
        self.finalize()
        return self.tree

    def parse_header_parameters(self) -> None:
        inner = self.skip_balanced("(", ")")
        self.scan_parameter_span(inner)

    def scan_parameter_span(self, span: list[Token]) -> None:
        """Flag SystemVerilog-style array parameters inside a parameter
        declaration span: unpacked dims after the name, or stacked packed
        ranges before it."""
        assert self.tree is not None
        j = 0
        packed_runs = 0
        last_name: Token | None = None
        while j < len(span):
            t = span[j]
            if t.text == "[":
                depth = 1
                j += 1
                while j < len(span) and depth:
                    if span[j].text == "[":
                        depth += 1
                    elif span[j].text == "]":
                        depth -= 1
                    j += 1
                if last_name is not None:
                    self.tree.array_param_sites.append(
                        (last_name.line, last_name.col,
                         f"array parameter '{last_name.text}'"))
                    last_name = None
                else:
                    packed_runs += 1
                    if packed_runs >= 2:
                        self.tree.array_param_sites.append(
                            (t.line, t.col, "multi-dimensional packed parameter"))
                continue
            if t.kind == "identifier":
                last_name = t
            elif t.text in ("=", ",", ";"):
                if t.text != "=":
                    packed_runs = 0
                last_name = None
                if t.text == "=":
                    # skip default value up to the next top-level comma
                    depth = 0
                    j += 1
                    while j < len(span):
                        tt = span[j]
                        if tt.text in "([{":
                            depth += 1
                        elif tt.text in ")]}":
                            depth -= 1
                        elif tt.text == "," and depth == 0:
                            break
                        j += 1
                    packed_runs = 0
                    continue
            j += 1

    def parse_port_list(self) -> None:
        assert self.tree is not None
        inner = self.skip_balanced("(", ")")
        items: list[list[Token]] = [[]]
        depth = 0
        for t in inner:
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            if t.text == "," and depth == 0:
                items.append([])
            else:
                items[-1].append(t)

        # Direction/type/width carry across commas in ANSI lists
        # (`input [7:0] a, b` makes b an 8-bit input).
        direction = ""
        net_kind = "wire"
        width: int | None = 1
        for item in items:
            if not item:
                continue
            j = 0
            while j < len(item) and item[j].text in ("input", "output", "inout"):
                direction = item[j].text
                net_kind = "wire"
                width = 1
                j += 1
            while j < len(item) and item[j].text in DECL_KINDS:
                net_kind = item[j].text
                j += 1
            while j < len(item) and item[j].text in ("signed", "unsigned"):
                j += 1
            packed: list[int | None] = []
            while j < len(item) and item[j].text == "[":
                depth = 1
                span: list[Token] = []
                j += 1
                while j < len(item) and depth:
                    if item[j].text == "[":
                        depth += 1
                    elif item[j].text == "]":
                        depth -= 1
                    if depth:
                        span.append(item[j])
                    j += 1
                packed.append(self.range_width(span))
            if packed:
                width = packed[-1] if len(packed) == 1 else None
            if j >= len(item) or item[j].kind != "identifier":
                continue  # `.name(expr)` port expressions etc.: skip
            name_tok = item[j]
            j += 1
            is_array = False
            while j < len(item) and item[j].text == "[":
                is_array = True
                depth = 1
                j += 1
                while j < len(item) and depth:
                    if item[j].text == "[":
                        depth += 1
                    elif item[j].text == "]":
                        depth -= 1
                    j += 1
            self.tree.ports.append(Port(
                name=name_tok.text,
                direction=direction,
                width=width,
                is_array_port=is_array,
                line=name_tok.line,
                col=name_tok.col,
                net_kind=net_kind,
            ))
            if direction and net_kind in ("reg", "integer", "logic"):
                self.tree.declarations.append(Declaration(
                    name=name_tok.text,
                    kind=DECL_KINDS.get(net_kind, "other"),
                    width=width,
                    scope="module",
                    line=name_tok.line,
                    col=name_tok.col,
                ))

    # -- module items --------------------------------------------------------

    def parse_module_item(self) -> None:
        t = self.peek()
        assert t is not None and self.tree is not None
        try:
            if t.text in ("input", "output", "inout"):
                self.parse_body_port_decl()
            elif t.text in DECL_KINDS:
                self.parse_declaration("module", None)
            elif t.text in ("parameter", "localparam", "specparam"):
                self.advance()
                span = self.skip_to_semicolon()
                self.scan_parameter_span(span)
            elif t.text in _ALWAYS_KINDS:
                self.parse_always()
            elif t.text == "initial":
                self.parse_initial()
            elif t.text == "assign":
                self.parse_continuous_assign()
            elif t.text in ("generate", "endgenerate", "signed", "unsigned", "automatic"):
                self.advance()
            elif t.text in ("function", "task"):
                self.skip_function_or_task(t.text)
            elif t.text == "specify":
                self.skip_until_keyword("endspecify")
            elif t.text == "defparam":
                self.advance()
                self.tree.reads |= self.collect_reads(self.skip_to_semicolon())
            elif t.text in ("if", "for", "case", "casex", "casez"):
                # generate-region control flow: contents re-enter this loop
                self.advance()
                if self.at("("):
                    self.tree.reads |= self.collect_reads(self.skip_balanced("(", ")"))
            elif t.text in ("begin", "end", "endcase", "else", ":", "@", "#"):
                self.advance()
                if t.text == ":" and self.at_kind("identifier"):
                    self.advance()  # generate block label
            elif t.kind == "identifier" and t.text.startswith("`"):
                self.advance()  # compiler directive: line-oriented, ignore
            elif t.kind == "identifier" or t.text in _GATE_PRIMITIVES:
                self.parse_instance_or_unknown()
            elif t.text == ";":
                self.advance()
            else:
                self.note(f"skipped unexpected token '{t.text}' at line {t.line}")
                self.advance()
                self.skip_to_semicolon()
        except _Skip:
            self.skip_to_semicolon()

    def parse_body_port_decl(self) -> None:
        assert self.tree is not None
        direction = self.advance().text
        net_kind = "wire"
        while self.peek() is not None and self.peek().text in DECL_KINDS:
            net_kind = self.advance().text
        while self.at("signed") or self.at("unsigned"):
            self.advance()
        width: int | None = 1
        while self.at("["):
            width = self.range_width(self.skip_balanced("[", "]"))
        while True:
            if not self.at_kind("identifier"):
                break
            name_tok = self.advance()
            is_array = False
            while self.at("["):
                is_array = True
                self.skip_balanced("[", "]")
            existing = self.tree.port(name_tok.text)
            if existing is not None:
                existing.direction = direction
                existing.width = width
                existing.net_kind = net_kind
                existing.is_array_port = existing.is_array_port or is_array
                existing.line = name_tok.line
                existing.col = name_tok.col
            else:
                self.tree.ports.append(Port(
                    name=name_tok.text, direction=direction, width=width,
                    is_array_port=is_array, line=name_tok.line,
                    col=name_tok.col, net_kind=net_kind,
                ))
            if net_kind in ("reg", "integer", "logic"):
                self.tree.declarations.append(Declaration(
                    name=name_tok.text, kind=DECL_KINDS.get(net_kind, "other"),
                    width=width, scope="module",
                    line=name_tok.line, col=name_tok.col,
                ))
            if self.at(","):
                self.advance()
                continue
            break
        if self.at(";"):
            self.advance()

    def parse_declaration(self, scope: str, blk: AlwaysBlock | None) -> None:
        """`reg [7:0] a, b;` style declarations, at module or block scope."""
        assert self.tree is not None
        kind_tok = self.advance()
        kind = DECL_KINDS.get(kind_tok.text, "other")
        while self.peek() is not None and self.peek().text in DECL_KINDS:
            self.advance()  # `wire logic` style stacking: keep first kind
        while self.at("signed") or self.at("unsigned"):
            self.advance()
        width: int | None = 1
        while self.at("["):
            width = self.range_width(self.skip_balanced("[", "]"))
        declared_any = False
        while True:
            if not self.at_kind("identifier"):
                break
            name_tok = self.advance()
            declared_any = True
            while self.at("["):  # unpacked dims (memories)
                self.tree.reads |= self.collect_reads(self.skip_balanced("[", "]"))
            decl = Declaration(
                name=name_tok.text, kind=kind, width=width, scope=scope,
                line=name_tok.line, col=name_tok.col,
            )
            self.tree.declarations.append(decl)
            if blk is not None:
                blk.declarations.append(decl)
            if self.at("="):
                self.advance()
                span: list[Token] = []
                depth = 0
                while self.peek() is not None:
                    tt = self.peek()
                    if tt.text in "([{":
                        depth += 1
                    elif tt.text in ")]}":
                        depth -= 1
                    elif (tt.text == "," and depth == 0) or tt.text == ";":
                        break
                    span.append(self.advance())
                reads = self.collect_reads(span)
                self.tree.reads |= reads
                if blk is not None:
                    blk.reads |= reads
                self.tree.initialized.add(name_tok.text)
            if self.at(","):
                self.advance()
                continue
            break
        if self.at(";"):
            self.advance()
        elif not declared_any:
            raise _Skip

    def parse_continuous_assign(self) -> None:
        assert self.tree is not None
        self.advance()  # assign
        while True:
            if self.at("#"):  # delay
                self.advance()
                if self.peek() is not None:
                    self.advance()
            if not self.at_kind("identifier"):
                self.skip_to_semicolon()
                return
            lhs_tok = self.advance()
            lhs_select = False
            while self.at("["):
                lhs_select = True
                self.tree.reads |= self.collect_reads(self.skip_balanced("[", "]"))
            if not self.at("="):
                self.skip_to_semicolon()
                return
            self.advance()
            span: list[Token] = []
            depth = 0
            while self.peek() is not None:
                tt = self.peek()
                if tt.text in "([{":
                    depth += 1
                elif tt.text in ")]}":
                    depth -= 1
                elif (tt.text == "," and depth == 0) or tt.text == ";":
                    break
                span.append(self.advance())
            self.tree.assigns_continuous.append(ContAssign(
                lhs=lhs_tok.text, lhs_select=lhs_select,
                rhs_select=any(x.text == ":" for x in span if x.kind == "punct"),
                rhs=span, line=lhs_tok.line, col=lhs_tok.col,
            ))
            self.tree.reads |= self.collect_reads(span)
            if self.at(","):
                self.advance()
                continue
            break
        if self.at(";"):
            self.advance()

    # -- procedural blocks ---------------------------------------------------

    def parse_always(self) -> None:
        assert self.tree is not None
        kw = self.advance()
        blk = AlwaysBlock(
            kind=kw.text, sensitivity="",
            star=kw.text in ("always_comb", "always_latch"),
            edge=False, sens_signals=[], line=kw.line, col=kw.col,
        )
        if self.at("@"):
            self.advance()
            if self.at("*"):
                self.advance()
                blk.star = True
                blk.sensitivity = "*"
            elif self.at("("):
                inner = self.skip_balanced("(", ")")
                blk.sensitivity = " ".join(t.text for t in inner)
                if any(t.text == "*" for t in inner):
                    blk.star = True
                blk.edge = any(t.text in ("posedge", "negedge") for t in inner)
                blk.sens_signals = [
                    t.text for t in inner
                    if t.kind == "identifier" and not t.text.startswith(("$", "`"))
                ]
        if kw.text == "always_ff":
            blk.edge = True
        self.tree.always_blocks.append(blk)
        self.parse_statement(blk)
        self.tree.reads |= blk.reads

    def parse_initial(self) -> None:
        assert self.tree is not None
        kw = self.advance()
        blk = AlwaysBlock(kind="initial", sensitivity="", star=False, edge=False,
                          sens_signals=[], line=kw.line, col=kw.col)
        self.tree.always_blocks.append(blk)
        self.parse_statement(blk)
        self.tree.reads |= blk.reads

    def parse_statement(self, blk: AlwaysBlock, depth: int = 0) -> None:
        if depth > 200:
            raise _Skip
        t = self.peek()
        if t is None:
            return
        if t.text == "begin":
            self.advance()
            if self.at(":"):
                self.advance()
                if self.at_kind("identifier"):
                    self.advance()
            while self.peek() is not None and not self.at("end"):
                if self.at("endmodule") or self.at("endcase"):
                    self.note(f"unterminated begin block at line {t.line}")
                    return
                self.parse_statement(blk, depth + 1)
            if self.at("end"):
                self.advance()
                if self.at(":"):
                    self.advance()
                    if self.at_kind("identifier"):
                        self.advance()
            return
        if t.text in DECL_KINDS:
            self.parse_declaration("always_block", blk)
            return
        if t.text == "if":
            self.advance()
            if self.at("("):
                blk.reads |= self.collect_reads(self.skip_balanced("(", ")"))
            self.parse_statement(blk, depth + 1)
            if self.at("else"):
                self.advance()
                self.parse_statement(blk, depth + 1)
            return
        if t.text in ("case", "casex", "casez"):
            self.parse_case(blk, t, depth)
            return
        if t.text == "for":
            self.advance()
            if self.at("("):
                inner = self.skip_balanced("(", ")")
                blk.reads |= self.collect_reads(inner)
                for j, tok in enumerate(inner):
                    if tok.text == "=" and j > 0 and inner[j - 1].kind == "identifier":
                        self._assigned_in_for.add(inner[j - 1].text)
            self.parse_statement(blk, depth + 1)
            return
        if t.text in ("while", "repeat", "wait"):
            self.advance()
            if self.at("("):
                blk.reads |= self.collect_reads(self.skip_balanced("(", ")"))
            self.parse_statement(blk, depth + 1)
            return
        if t.text == "forever":
            self.advance()
            self.parse_statement(blk, depth + 1)
            return
        if t.text == "disable":
            self.advance()
            self.skip_to_semicolon()
            return
        if t.text == "#":
            self.advance()
            if self.at("("):
                self.skip_balanced("(", ")")
            elif self.peek() is not None:
                self.advance()
            self.parse_statement(blk, depth + 1)
            return
        if t.text == "@":
            self.advance()
            if self.at("("):
                blk.reads |= self.collect_reads(self.skip_balanced("(", ")"))
            elif self.peek() is not None:
                self.advance()
            self.parse_statement(blk, depth + 1)
            return
        if t.text == ";":
            self.advance()
            return
        if t.text in ("end", "endcase", "endmodule", "join"):
            # Let the enclosing construct consume it.
            return
        if t.kind == "identifier" and t.text.startswith("$"):
            self.advance()
            span = self.skip_to_semicolon()
            blk.reads |= self.collect_reads(span)
            return
        if t.kind == "identifier" or t.text == "{":
            self.parse_assignment_or_call(blk)
            return
        self.note(f"skipped unexpected token '{t.text}' in block at line {t.line}")
        self.advance()
        self.skip_to_semicolon()

    def parse_case(self, blk: AlwaysBlock, kw: Token, depth: int) -> None:
        self.advance()
        if self.at("("):
            blk.reads |= self.collect_reads(self.skip_balanced("(", ")"))
        case = CaseStmt(has_default=False, line=kw.line, col=kw.col)
        blk.cases.append(case)
        while self.peek() is not None and not self.at("endcase"):
            if self.at("endmodule"):
                self.note(f"unterminated case at line {kw.line}")
                return
            if self.at("default"):
                case.has_default = True
                self.advance()
                if self.at(":"):
                    self.advance()
                self.parse_statement(blk, depth + 1)
                continue
            # case item labels up to a top-level ':'
            label: list[Token] = []
            bdepth = 0
            while self.peek() is not None:
                tt = self.peek()
                if tt.text in "([{":
                    bdepth += 1
                elif tt.text in ")]}":
                    bdepth -= 1
                elif tt.text == ":" and bdepth == 0:
                    self.advance()
                    break
                elif tt.text in ("endcase", "endmodule"):
                    break
                label.append(self.advance())
            blk.reads |= self.collect_reads(label)
            if self.at("endcase") or self.at("endmodule"):
                break
            self.parse_statement(blk, depth + 1)
        if self.at("endcase"):
            self.advance()

    def parse_assignment_or_call(self, blk: AlwaysBlock) -> None:
        assert self.tree is not None
        first = self.peek()
        assert first is not None
        if first.text == "{":  # concatenation target: treat parts as assigned
            inner = self.skip_balanced("{", "}")
            names = [t.text for t in inner if t.kind == "identifier"]
            if self.peek() is not None and self.peek().text in ("=", "<="):
                op = self.advance().text
                span = self.skip_to_semicolon()
                blk.reads |= self.collect_reads(span)
                for nm in names:
                    blk.assigns.append(ProcAssign(
                        lhs=nm, op=op, lhs_select=True, rhs_select=True,
                        rhs=span, line=first.line, col=first.col,
                    ))
            else:
                self.skip_to_semicolon()
            return
        lhs_tok = self.advance()
        lhs_select = False
        while True:
            if self.at("["):
                lhs_select = True
                blk.reads |= self.collect_reads(self.skip_balanced("[", "]"))
                continue
            if self.at(".") and self.at_kind("identifier", 1):
                self.advance()
                self.advance()
                continue
            break
        nxt = self.peek()
        if nxt is not None and nxt.text in ("=", "<="):
            op = self.advance().text
            span = self.skip_to_semicolon()
            blk.reads |= self.collect_reads(span)
            blk.assigns.append(ProcAssign(
                lhs=lhs_tok.text, op=op, lhs_select=lhs_select,
                rhs_select=any(x.text == ":" and x.kind == "punct" for x in span),
                rhs=span, line=lhs_tok.line, col=lhs_tok.col,
            ))
            return
        if nxt is not None and nxt.text == "(":  # task enable
            blk.reads |= self.collect_reads(self.skip_balanced("(", ")"))
            if self.at(";"):
                self.advance()
            return
        blk.reads.add(lhs_tok.text)
        self.skip_to_semicolon()

    # -- instances and skips ---------------------------------------------------

    def parse_instance_or_unknown(self) -> None:
        assert self.tree is not None
        start = self.i
        self.advance()  # module/gate type name
        if self.at("#"):
            self.advance()
            if self.at("("):
                self.tree.reads |= self.collect_reads(self.skip_balanced("(", ")"))
        inst_ok = False
        if self.at_kind("identifier"):
            self.advance()  # instance name
            while self.at("["):
                self.skip_balanced("[", "]")  # instance array
            if self.at("("):
                conns = self.skip_balanced("(", ")")
                reads = self.collect_reads(conns)
                self.tree.reads |= reads
                self.tree.instance_conns |= reads
                inst_ok = True
        elif self.at("("):  # gate primitive without instance name
            conns = self.skip_balanced("(", ")")
            reads = self.collect_reads(conns)
            self.tree.reads |= reads
            self.tree.instance_conns |= reads
            inst_ok = True
        if inst_ok:
            while self.at(","):  # more instances of the same type
                self.advance()
                if self.at_kind("identifier"):
                    self.advance()
                if self.at("("):
                    conns = self.skip_balanced("(", ")")
                    reads = self.collect_reads(conns)
                    self.tree.reads |= reads
                    self.tree.instance_conns |= reads
            if self.at(";"):
                self.advance()
            return
        tok = self.toks[start]
        self.note(f"skipped unrecognised construct near '{tok.text}' at line {tok.line}")
        self.skip_to_semicolon()

    def skip_function_or_task(self, which: str) -> None:
        assert self.tree is not None
        closer = "endfunction" if which == "function" else "endtask"
        self.advance()
        span: list[Token] = []
        while self.peek() is not None and not self.at(closer):
            if self.at("endmodule"):
                self.note(f"unterminated {which}")
                return
            span.append(self.advance())
        if self.at(closer):
            self.advance()
        self.tree.reads |= self.collect_reads(span)

    def skip_until_keyword(self, closer: str) -> None:
        while self.peek() is not None and not self.at(closer):
            if self.at("endmodule"):
                return
            self.advance()
        if self.at(closer):
            self.advance()

    # -- final bookkeeping -----------------------------------------------------

    def finalize(self) -> None:
        assert self.tree is not None
        self.tree.reads |= self._assigned_in_for  # loop vars: count as used


def parse_module(tokens: list[Token], file: str = "<input>") -> ModuleTree:
    """Parse the first module in a token stream into a ModuleTree."""
    return _Parser(significant(tokens), file).parse_module()


def parse_source(source: str, file: str = "<input>") -> list[ModuleTree]:
    """Parse every top-level module in a source text."""
    toks = significant(tokenize(source))
    trees: list[ModuleTree] = []
    i = 0
    while i < len(toks):
        if toks[i].text in ("module", "macromodule") and toks[i].kind == "keyword":
            p = _Parser(toks[i:], file)
            trees.append(p.parse_module())
            i += max(p.i, 1)
        else:
            i += 1
    return trees
