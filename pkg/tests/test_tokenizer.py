from __future__ import annotations

from hypothesis import given, strategies as st

from nls.hdl_lint import tokenize
from tests.conftest import LINT_CLEAN, LINT_POSITIVE


def kinds(source):
    return [(t.kind, t.text) for t in tokenize(source)]


def test_simple_module_header():
    assert kinds("module m;") == [
        ("keyword", "module"),
        ("whitespace", " "),
        ("identifier", "m"),
        ("punct", ";"),
    ]


def test_empty_input():
    assert tokenize("") == []


def test_comments_and_strings_are_single_tokens():
    toks = tokenize('// line typedef\n/* block\nlogic */ "str logic"')
    assert [t.kind for t in toks if t.kind != "whitespace"] == [
        "comment", "comment", "string"]


def test_unterminated_comment_and_string_never_fail():
    toks = tokenize("/* never closed\nmodule m;")
    assert toks[0].kind == "comment"
    assert "".join(t.text for t in toks) == "/* never closed\nmodule m;"
    toks = tokenize('x = "oops\ny = 1;')
    assert any(t.kind == "string" for t in toks)


def test_based_literals():
    toks = [t for t in tokenize("8'hFF 4'b0101 'd42 '0 3.14 1e6") if t.kind == "number"]
    assert [t.text for t in toks] == ["8'hFF", "4'b0101", "'d42", "'0", "3.14", "1e6"]


def test_sv_keywords_classified():
    toks = {t.text: t.kind for t in tokenize("logic typedef always_ff foo")}
    assert toks["logic"] == "keyword"
    assert toks["typedef"] == "keyword"
    assert toks["always_ff"] == "keyword"
    assert toks["foo"] == "identifier"


def test_unknown_bytes_become_operator_tokens():
    toks = tokenize("a \x00 b £")
    assert "".join(t.text for t in toks) == "a \x00 b £"
    weird = [t for t in toks if t.text in ("\x00", "£")]
    assert all(t.kind == "operator" for t in weird)


def test_line_and_col_are_one_based():
    toks = tokenize("ab\n  cd")
    cd = [t for t in toks if t.text == "cd"][0]
    assert (cd.line, cd.col) == (2, 3)


def test_multichar_operators_stay_whole():
    texts = [t.text for t in tokenize("a <= b === c <<< 2") if t.kind == "operator"]
    assert texts == ["<=", "===", "<<<"]


def test_corpus_roundtrip():
    files = sorted(LINT_POSITIVE.glob("*.v")) + sorted(LINT_CLEAN.glob("*.v"))
    assert len(files) >= 20
    for path in files:
        text = path.read_text(encoding="utf-8")
        assert "".join(t.text for t in tokenize(text)) == text, path.name


@given(st.text(max_size=300))
def test_roundtrip_property(source):
    assert "".join(t.text for t in tokenize(source)) == source


@given(st.text(alphabet="moduleendw irg[]:;=<*/+()@#'\"\\\n0123456789ab_", max_size=200))
def test_roundtrip_property_hdl_alphabet(source):
    assert "".join(t.text for t in tokenize(source)) == source
