"""Lightweight Verilog/SystemVerilog lint: tokenizer, structural parser,
and the NLS001..NLS006 rule catalog."""

from nls.hdl_lint.tokenizer import Token, tokenize, SV_ONLY_KEYWORDS
from nls.hdl_lint.parser import (
    ModuleTree,
    NoModuleHeaderError,
    parse_module,
    parse_source,
)
from nls.hdl_lint.rules import Diagnostic, RULE_IDS, lint
from nls.hdl_lint.report import exit_status, lint_report

__all__ = [
    "Token",
    "tokenize",
    "SV_ONLY_KEYWORDS",
    "ModuleTree",
    "NoModuleHeaderError",
    "parse_module",
    "parse_source",
    "Diagnostic",
    "RULE_IDS",
    "lint",
    "lint_report",
    "exit_status",
]
