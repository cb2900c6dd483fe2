"""Lossless Verilog/SystemVerilog tokenizer.

Every byte of the input ends up in exactly one token, so concatenating
token texts reconstructs the source byte-for-byte. Comments, strings and
whitespace are real tokens; lexing never raises — bytes that fit no
pattern become single-character operator tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Verilog-2005 keywords that matter structurally, plus the SystemVerilog
# additions the rules look for. Not the full IEEE reserved-word list.
VERILOG_KEYWORDS = frozenset(
    """
    module endmodule macromodule primitive endprimitive
    input output inout
    reg wire integer real realtime time genvar
    tri tri0 tri1 triand trior wand wor supply0 supply1
    parameter localparam defparam specparam
    always initial assign deassign force release
    begin end fork join
    if else case casex casez endcase default
    for while repeat forever wait disable
    function endfunction task endtask
    generate endgenerate
    posedge negedge or and not
    signed unsigned scalared vectored
    specify endspecify
    event automatic
    """.split()
)

# The syntax forms NLS003 and the language classifier look for. Kept to
# the constructs that actually break Verilog-2005 tools.
SV_ONLY_KEYWORDS = frozenset(
    ["logic", "typedef", "always_ff", "always_comb", "enum", "interface"]
)

# Extra SV words recognised as keywords so SV sources parse sensibly.
SV_EXTRA_KEYWORDS = frozenset(
    """
    always_latch endinterface modport package endpackage
    bit byte shortint int longint var struct union packed
    unique priority final string void return
    """.split()
)

KEYWORDS = VERILOG_KEYWORDS | SV_ONLY_KEYWORDS | SV_EXTRA_KEYWORDS


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | number | operator | punct | string | comment | whitespace
    text: str
    line: int  # 1-based, position of first character
    col: int  # 1-based


_MULTI_OPS = [
    "<<<=", ">>>=",
    "===", "!==", "==?", "!=?", "<<<", ">>>", "<->",
    "<<=", ">>=",
    "**", "<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
    "~&", "~|", "~^", "^~", "+:", "-:", "->", "++", "--", "::",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
]

_TOKEN_RE = re.compile(
    r"""
      (?P<whitespace>\s+)
    | (?P<comment>//[^\n]*|/\*(?:[^*]|\*(?!/))*\*/|/\*(?:[^*]|\*(?!/))*)
    | (?P<string>"(?:\\.|[^"\\\n])*"|"(?:\\.|[^"\\\n])*)
    | (?P<number>
          [0-9][0-9_]*[ \t]*'[sS]?[bodhBODH][ \t]*[0-9a-fA-FxXzZ?_]+  # sized based
        | '[sS]?[bodhBODH][ \t]*[0-9a-fA-FxXzZ?_]+                    # unsized based
        | '[01xXzZ]                                                   # unbased unsized
        | [0-9][0-9_]*\.[0-9][0-9_]*(?:[eE][+-]?[0-9_]+)?             # real
        | [0-9][0-9_]*[eE][+-]?[0-9_]+
        | [0-9][0-9_]*
      )
    | (?P<identifier>
          [a-zA-Z_][a-zA-Z0-9_$]*
        | \$[a-zA-Z_][a-zA-Z0-9_$]*      # system tasks/functions
        | `[a-zA-Z_][a-zA-Z0-9_$]*       # compiler directives / macro uses
        | \\[^ \t\r\n]+                  # escaped identifiers
      )
    | (?P<operator>%s|[-+*/%%&|^~!<>=?])
    | (?P<punct>[()\[\]{};,.:#@'])
    | (?P<other>.)
    """ % "|".join(re.escape(op) for op in _MULTI_OPS),
    re.VERBOSE | re.DOTALL,
)


def tokenize(source: str) -> list[Token]:
    """Lex `source` into tokens. Never raises; lossless by construction."""
    tokens: list[Token] = []
    line = 1
    col = 1
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        kind = m.lastgroup
        text = m.group()
        if kind == "identifier" and text in KEYWORDS:
            kind = "keyword"
        elif kind == "other":
            kind = "operator"
        tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    return tokens


def significant(tokens: list[Token]) -> list[Token]:
    """Drop whitespace and comment tokens; what the parser walks."""
    return [t for t in tokens if t.kind not in ("whitespace", "comment")]
