"""The six-rule defect catalog.

NLS001  register balance            warning
NLS002  declaration in always block error
NLS003  SystemVerilog in Verilog    error    (verilog sources only)
NLS004  logic-structure risks       warning
NLS005  fixed-point width risk      warning
NLS006  array port in port list     error    (verilog sources only)

SystemVerilog sources receive only NLS001/004/005; the remaining rules
check Verilog-2005 validity and do not apply.
"""

from __future__ import annotations

from dataclasses import dataclass

from nls.hdl_lint.parser import ContAssign, ModuleTree, ProcAssign
from nls.hdl_lint.tokenizer import SV_ONLY_KEYWORDS, Token

RULE_IDS = ("NLS001", "NLS002", "NLS003", "NLS004", "NLS005", "NLS006")


@dataclass(frozen=True)
class Diagnostic:
    rule_id: str
    severity: str  # error | warning
    file: str
    line: int
    col: int
    message: str

    def sort_key(self):
        return (self.file, self.line, self.col, self.rule_id)


def lint(tree: ModuleTree, language: str = "verilog") -> list[Diagnostic]:
    """Run every applicable rule on a parsed module. Never raises; returns
    diagnostics sorted by (file, line, col, rule_id)."""
    diags: list[Diagnostic] = []
    diags += _rule_register_balance(tree)
    diags += _rule_logic_structure(tree)
    diags += _rule_width_risk(tree)
    if language == "verilog":
        diags += _rule_always_local_decl(tree)
        diags += _rule_sv_in_verilog(tree)
        diags += _rule_array_ports(tree)
    return sorted(diags, key=Diagnostic.sort_key)


def _d(tree: ModuleTree, rule: str, severity: str, line: int, col: int,
       message: str) -> Diagnostic:
    return Diagnostic(rule, severity, tree.file, line, col, message)


# -- NLS001 ------------------------------------------------------------------

def _rule_register_balance(tree: ModuleTree) -> list[Diagnostic]:
    assigned: set[str] = set(tree.initialized)
    for blk in tree.always_blocks:
        assigned |= {a.lhs for a in blk.assigns}
    assigned |= {a.lhs for a in tree.assigns_continuous}
    port_dirs = {p.name: p.direction for p in tree.ports}

    out: list[Diagnostic] = []
    seen: set[str] = set()
    for d in tree.declarations:
        if d.kind != "reg" or d.name in seen:
            continue
        seen.add(d.name)
        is_assigned = d.name in assigned or d.name in tree.instance_conns
        is_read = (d.name in tree.reads
                   or port_dirs.get(d.name) in ("output", "inout"))
        if not is_assigned:
            out.append(_d(tree, "NLS001", "warning", d.line, d.col,
                          f"register '{d.name}' is declared but never assigned"))
        elif not is_read:
            out.append(_d(tree, "NLS001", "warning", d.line, d.col,
                          f"register '{d.name}' is assigned but never read"))
    return out


# -- NLS002 ------------------------------------------------------------------

def _rule_always_local_decl(tree: ModuleTree) -> list[Diagnostic]:
    out = []
    for d in tree.declarations:
        if d.scope == "always_block" and d.kind in ("reg", "wire", "integer"):
            out.append(_d(tree, "NLS002", "error", d.line, d.col,
                          f"{d.kind} '{d.name}' is declared inside an always "
                          f"block; declare it at module scope"))
    return out


# -- NLS003 ------------------------------------------------------------------

def _rule_sv_in_verilog(tree: ModuleTree) -> list[Diagnostic]:
    out = []
    for t in tree.tokens:
        if t.kind == "keyword" and t.text in SV_ONLY_KEYWORDS:
            out.append(_d(tree, "NLS003", "error", t.line, t.col,
                          f"SystemVerilog keyword '{t.text}' is not valid in "
                          f"a Verilog design"))
    for line, col, detail in tree.array_param_sites:
        out.append(_d(tree, "NLS003", "error", line, col,
                      f"SystemVerilog {detail} syntax is not valid in a "
                      f"Verilog design"))
    return out


# -- NLS004 ------------------------------------------------------------------

def _rule_logic_structure(tree: ModuleTree) -> list[Diagnostic]:
    out: list[Diagnostic] = []

    for blk in tree.always_blocks:
        if blk.combinational:
            for case in blk.cases:
                if not case.has_default:
                    out.append(_d(tree, "NLS004", "warning", case.line, case.col,
                                  "case statement in a combinational always "
                                  "block has no default branch"))

    # Mixed blocking / non-blocking assignment to one signal.
    first_op: dict[str, str] = {}
    flagged: set[str] = set()
    for blk in tree.always_blocks:
        if blk.kind == "initial":
            continue
        for a in blk.assigns:
            prev = first_op.setdefault(a.lhs, a.op)
            if a.op != prev and a.lhs not in flagged:
                flagged.add(a.lhs)
                out.append(_d(tree, "NLS004", "warning", a.line, a.col,
                              f"signal '{a.lhs}' is assigned with both "
                              f"blocking and non-blocking assignments"))

    # Incomplete explicit sensitivity list on a combinational block.
    declared = {d.name for d in tree.declarations} | {p.name for p in tree.ports}
    for blk in tree.always_blocks:
        if not blk.combinational or blk.star or not blk.sens_signals:
            continue
        listed = set(blk.sens_signals)
        written = {a.lhs for a in blk.assigns}
        missing = sorted((blk.reads & declared) - listed - written)
        for name in missing:
            out.append(_d(tree, "NLS004", "warning", blk.line, blk.col,
                          f"signal '{name}' is read in the always block but "
                          f"missing from the sensitivity list"))
    return out


# -- NLS005 ------------------------------------------------------------------

class _NotEstimable(Exception):
    pass


class _HasSelect(Exception):
    """Expression contains a part/bit select: explicit truncation."""


def _number_width(text: str) -> int:
    """Bit width of a numeric literal: declared size when given, minimum
    representation width otherwise."""
    if "'" in text:
        size_part = text.split("'", 1)[0].strip().replace("_", "")
        if size_part:
            return int(size_part)
        digits = text.split("'", 1)[1].lstrip("sS")
        base = digits[0].lower()
        digits = digits[1:].strip().replace("_", "")
        radix = {"b": 2, "o": 8, "d": 10, "h": 16}[base]
        try:
            value = int(digits.replace("x", "0").replace("z", "0")
                        .replace("X", "0").replace("Z", "0").replace("?", "0"),
                        radix)
        except ValueError:
            raise _NotEstimable
        return max(1, value.bit_length())
    try:
        value = int(text.replace("_", ""))
    except ValueError:
        raise _NotEstimable  # reals
    return max(1, value.bit_length())


class _WidthEstimator:
    """Result-width estimate for expressions over +, *, and shifts.

    width(a*b) = width(a) + width(b); width(a+b) = max; a shift by a
    constant grows the left operand by that amount. Undeclared names
    count as 1 bit wide. Anything else refuses to estimate.
    """

    def __init__(self, tree: ModuleTree, span: list[Token]):
        self.tree = tree
        self.toks = [t for t in span if t.kind not in ("whitespace", "comment")]
        self.i = 0
        self.saw_mult = False

    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def estimate(self) -> int:
        w = self.expr()
        if self.peek() is not None:
            raise _NotEstimable
        return w

    def expr(self) -> int:
        w = self.term()
        while self.peek() is not None and self.peek().text == "+":
            self.i += 1
            w = max(w, self.term())
        return w

    def term(self) -> int:
        w = self.shift()
        while self.peek() is not None and self.peek().text == "*":
            self.i += 1
            self.saw_mult = True
            w = w + self.shift()
        return w

    def shift(self) -> int:
        w = self.primary()
        while self.peek() is not None and self.peek().text in ("<<", ">>", "<<<", ">>>"):
            op = self.toks[self.i].text
            self.i += 1
            t = self.peek()
            if t is not None and t.kind == "number" and "'" not in t.text:
                self.i += 1
                if op in ("<<", "<<<"):
                    w += int(t.text.replace("_", ""))
            else:
                raise _NotEstimable
        return w

    def primary(self) -> int:
        t = self.peek()
        if t is None:
            raise _NotEstimable
        if t.text == "(":
            self.i += 1
            w = self.expr()
            if self.peek() is None or self.peek().text != ")":
                raise _NotEstimable
            self.i += 1
            return w
        if t.kind == "number":
            self.i += 1
            return _number_width(t.text)
        if t.kind == "identifier" and not t.text.startswith(("$", "`")):
            self.i += 1
            nxt = self.peek()
            if nxt is not None and nxt.text == "[":
                raise _HasSelect
            w = self.tree.width_of(t.text)
            if w is not None:
                return w
            if any(d.name == t.text for d in self.tree.declarations) or \
               self.tree.port(t.text) is not None:
                raise _NotEstimable  # declared, but range was not constant
            return 1
        raise _NotEstimable


def _span_has_select(span: list[Token]) -> bool:
    """True when the span contains `[ ... : ... ]` (a part select)."""
    depth = 0
    for t in span:
        if t.text == "[":
            depth += 1
        elif t.text == "]":
            depth = max(0, depth - 1)
        elif t.text == ":" and t.kind == "punct" and depth > 0:
            return True
    return False


def _rule_width_risk(tree: ModuleTree) -> list[Diagnostic]:
    out = []
    assigns: list[ProcAssign | ContAssign] = []
    for blk in tree.always_blocks:
        assigns.extend(blk.assigns)
    assigns.extend(tree.assigns_continuous)
    for a in assigns:
        if a.lhs_select or _span_has_select(a.rhs):
            continue
        lhs_width = tree.width_of(a.lhs)
        if lhs_width is None:
            continue
        est = _WidthEstimator(tree, a.rhs)
        try:
            rhs_width = est.estimate()
        except (_NotEstimable, _HasSelect):
            continue
        if est.saw_mult and rhs_width > lhs_width:
            out.append(_d(tree, "NLS005", "warning", a.line, a.col,
                          f"multiplication result may need {rhs_width} bits "
                          f"but '{a.lhs}' holds {lhs_width}; truncate or "
                          f"select the intended bits explicitly"))
    return out


# -- NLS006 ------------------------------------------------------------------

def _rule_array_ports(tree: ModuleTree) -> list[Diagnostic]:
    out = []
    for p in tree.ports:
        if p.is_array_port:
            out.append(_d(tree, "NLS006", "error", p.line, p.col,
                          f"port '{p.name}' declares an unpacked array in the "
                          f"port list; Verilog ports must be scalars or "
                          f"packed vectors"))
    return out
