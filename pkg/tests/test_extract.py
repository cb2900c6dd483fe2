from __future__ import annotations

import hashlib
import zipfile

import pytest

from nls.extract import (
    CodeBlock,
    NoModuleFoundError,
    NothingToPackageError,
    UnbalancedModuleEndError,
    UnterminatedFenceError,
    extract_code_blocks,
    package_zip,
    split_modules,
    write_artifacts,
)


def test_single_fence_with_tag():
    blocks = extract_code_blocks("intro\n```verilog\nmodule m; endmodule\n```\nbye\n")
    assert len(blocks) == 1
    assert blocks[0].language_tag == "verilog"
    assert blocks[0].body == "module m; endmodule\n"


def test_no_fences_no_code():
    assert extract_code_blocks("Just prose, no code at all.") == []


def test_unterminated_fence():
    with pytest.raises(UnterminatedFenceError):
        extract_code_blocks("```verilog\nmodule m;\n")


def test_multiple_blocks_in_order():
    text = "a\n```v\nblock0\n```\nmid\n```python\nblock1\n```\n"
    blocks = extract_code_blocks(text)
    assert [(b.language_tag, b.body) for b in blocks] == [
        ("v", "block0\n"), ("python", "block1\n")]


def test_bare_module_response_is_implicit_block():
    blocks = extract_code_blocks("module m;\nendmodule\n")
    assert len(blocks) == 1 and blocks[0].language_tag == "verilog"


def test_split_two_modules_and_names():
    arts = split_modules("module pe; endmodule\nmodule systolic_array_3x3; endmodule\n")
    assert [a.module_name for a in arts] == ["pe", "systolic_array_3x3"]


def test_split_concatenation_identity():
    body = "// header\nmodule a;\n  wire w;\nendmodule\n\n// gap\nmodule b; endmodule\n"
    arts = split_modules(body)
    joined = "".join(a.text for a in arts)
    regions = body[body.index("module a"):body.index("endmodule") + len("endmodule")] \
        + body[body.index("module b"):body.rindex("endmodule") + len("endmodule")]
    assert joined == regions


def test_split_only_comments():
    with pytest.raises(NoModuleFoundError):
        split_modules("// nothing here\n/* still nothing */\n")


def test_split_unbalanced():
    with pytest.raises(UnbalancedModuleEndError):
        split_modules("module a;\n  wire w;\n")
    with pytest.raises(UnbalancedModuleEndError):
        split_modules("endmodule\n")


def test_module_keyword_in_comment_does_not_split():
    arts = split_modules("// module fake; endmodule\nmodule real_one; endmodule\n")
    assert [a.module_name for a in arts] == ["real_one"]


def test_language_classification():
    sv = CodeBlock(language_tag="", body="module m; logic x; endmodule")
    assert split_modules(sv)[0].language == "systemverilog"
    tagged = CodeBlock(language_tag="systemverilog", body="module m; endmodule")
    assert split_modules(tagged)[0].language == "systemverilog"
    plain = CodeBlock(language_tag="verilog", body="module m; endmodule")
    assert split_modules(plain)[0].language == "verilog"


def test_response_index_propagates():
    arts = split_modules("module m; endmodule", response_index=3)
    assert arts[0].response_index == 3


def test_write_artifacts_names_and_collisions(tmp_path):
    arts = split_modules("module pe; endmodule module pe; endmodule "
                         "module top; endmodule")
    paths = write_artifacts(arts, tmp_path)
    assert [p.name for p in paths] == ["pe.v", "pe_2.v", "top.v"]
    assert (tmp_path / "pe_2.v").read_text().startswith("module pe;")


def test_write_artifacts_sv_extension(tmp_path):
    arts = split_modules(CodeBlock("systemverilog", "module m; endmodule"))
    assert write_artifacts(arts, tmp_path)[0].name == "m.sv"


def test_package_zip_deterministic(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    (src / "top.v").write_text("module top; endmodule\n")
    (src / "pe.v").write_text("module pe; endmodule\n")
    (src / "notes.txt").write_text("not hdl\n")

    z1 = package_zip(src, tmp_path / "a.zip")
    z2 = package_zip(src, tmp_path / "b.zip")
    assert hashlib.sha256(z1.read_bytes()).hexdigest() == \
        hashlib.sha256(z2.read_bytes()).hexdigest()

    with zipfile.ZipFile(z1) as zf:
        infos = zf.infolist()
        assert [i.filename for i in infos] == ["pe.v", "top.v"]  # lexicographic
        assert all(i.date_time == (1980, 1, 1, 0, 0, 0) for i in infos)


def test_package_zip_nothing_to_package(tmp_path):
    src = tmp_path / "empty"
    src.mkdir()
    (src / "notes.txt").write_text("prose only\n")
    with pytest.raises(NothingToPackageError):
        package_zip(src, tmp_path / "out.zip")


def test_zip_roundtrip_identity(tmp_path):
    """Unpacking and repacking an archive reproduces it byte-for-byte."""
    src = tmp_path / "src"
    src.mkdir()
    (src / "a.v").write_text("module a; endmodule\n")
    (src / "b.sv").write_text("module b; logic l; endmodule\n")
    z1 = package_zip(src, tmp_path / "one.zip")

    unpacked = tmp_path / "unpacked"
    unpacked.mkdir()
    with zipfile.ZipFile(z1) as zf:
        zf.extractall(unpacked)
    z2 = package_zip(unpacked, tmp_path / "two.zip")
    assert z1.read_bytes() == z2.read_bytes()
