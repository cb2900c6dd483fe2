"""Turn raw assistant responses into HDL artifacts.

Fenced code blocks are pulled out of the response, split into one
artifact per top-level module, written as `.v`/`.sv` files, and packaged
into a byte-reproducible zip. Prose stays in the transcript; it is never
folded into the generated sources.
"""

from __future__ import annotations

import re
import zipfile
from dataclasses import dataclass
from pathlib import Path

from nls.errors import NlsError
from nls.hdl_lint.tokenizer import SV_ONLY_KEYWORDS, tokenize


class UnterminatedFenceError(NlsError):
    """A ``` fence was opened but never closed."""


class NoModuleFoundError(NlsError):
    """Code block contains no module declaration."""


class UnbalancedModuleEndError(NlsError):
    """`module` without a matching `endmodule`."""


class NothingToPackageError(NlsError):
    """Directory holds no `.v`/`.sv` files to archive."""


# Fence tags that mark (or may mark) HDL code.
HDL_TAGS = {"", "verilog", "systemverilog", "v", "sv"}


@dataclass
class CodeBlock:
    language_tag: str
    body: str


@dataclass
class HdlArtifact:
    module_name: str
    language: str  # verilog | systemverilog
    text: str
    response_index: int


_FENCE_RE = re.compile(r"^[ \t]*```([^\n`]*)\n?", re.MULTILINE)


def extract_code_blocks(response: str) -> list[CodeBlock]:
    """Fenced code blocks in document order.

    A response with no fences that nevertheless starts with a module
    declaration is treated as one implicit verilog block (models often
    answer with bare code).
    """
    blocks: list[CodeBlock] = []
    pos = 0
    while True:
        m = _FENCE_RE.search(response, pos)
        if m is None:
            break
        tag = m.group(1).strip().lower()
        body_start = m.end()
        close = re.compile(r"^[ \t]*```[ \t]*$", re.MULTILINE).search(response, body_start)
        if close is None:
            raise UnterminatedFenceError(
                f"code fence opened at offset {m.start()} is never closed")
        blocks.append(CodeBlock(language_tag=tag, body=response[body_start:close.start()]))
        pos = close.end()
    if not blocks and response.lstrip().startswith("module"):
        blocks.append(CodeBlock(language_tag="verilog", body=response))
    return blocks


def classify_block(block: CodeBlock) -> str:
    """verilog or systemverilog: the fence tag decides unless the body
    uses SystemVerilog-only keywords."""
    if block.language_tag in ("systemverilog", "sv"):
        return "systemverilog"
    for t in tokenize(block.body):
        if t.kind == "keyword" and t.text in SV_ONLY_KEYWORDS:
            return "systemverilog"
    return "verilog"


def split_modules(block: CodeBlock | str, response_index: int = 0) -> list[HdlArtifact]:
    """One artifact per top-level `module ... endmodule` region.

    Artifact text is the exact source slice, so concatenating the outputs
    reproduces the module regions byte-for-byte.
    """
    if isinstance(block, str):
        block = CodeBlock(language_tag="", body=block)
    language = classify_block(block)
    toks = tokenize(block.body)
    artifacts: list[HdlArtifact] = []
    offsets = _token_offsets(block.body, toks)

    depth = 0
    start_off = 0
    name = ""
    for i, t in enumerate(toks):
        if t.kind != "keyword":
            continue
        if t.text in ("module", "macromodule"):
            if depth == 0:
                start_off = offsets[i]
                name = _module_name(toks, i)
            depth += 1
        elif t.text == "endmodule":
            if depth == 0:
                raise UnbalancedModuleEndError(
                    f"endmodule without module at line {t.line}")
            depth -= 1
            if depth == 0:
                end_off = offsets[i] + len(t.text)
                artifacts.append(HdlArtifact(
                    module_name=name,
                    language=language,
                    text=block.body[start_off:end_off],
                    response_index=response_index,
                ))
    if depth != 0:
        raise UnbalancedModuleEndError("module without matching endmodule")
    if not artifacts:
        raise NoModuleFoundError("no module declaration in code block")
    return artifacts


def _token_offsets(source: str, toks) -> list[int]:
    offsets = []
    off = 0
    for t in toks:
        offsets.append(off)
        off += len(t.text)
    assert off == len(source)
    return offsets


def _module_name(toks, module_idx: int) -> str:
    for t in toks[module_idx + 1:]:
        if t.kind in ("whitespace", "comment"):
            continue
        if t.kind == "identifier":
            return t.text
        break
    return "unnamed"


def write_artifacts(artifacts: list[HdlArtifact], out_dir: str | Path) -> list[Path]:
    """Write each artifact as `<module_name>.v` (`.sv` for SystemVerilog).
    Name collisions get `_2`, `_3`, ... suffixes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    used: dict[str, int] = {}
    for art in artifacts:
        ext = ".sv" if art.language == "systemverilog" else ".v"
        count = used.get(art.module_name + ext, 0) + 1
        used[art.module_name + ext] = count
        stem = art.module_name if count == 1 else f"{art.module_name}_{count}"
        path = out_dir / f"{stem}{ext}"
        path.write_text(art.text if art.text.endswith("\n") else art.text + "\n",
                        encoding="utf-8")
        written.append(path)
    return written


# Oldest timestamp a zip entry can carry; fixed so identical inputs give
# byte-identical archives.
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def package_zip(dir: str | Path, zip_path: str | Path) -> Path:
    """Archive the `.v`/`.sv` files of a directory at the archive root.

    Entries are added in lexicographic name order with fixed timestamps
    and permissions, so the archive bytes depend only on the file names
    and contents.
    """
    dir = Path(dir)
    zip_path = Path(zip_path)
    files = sorted(
        [p for p in dir.iterdir() if p.is_file() and p.suffix in (".v", ".sv")],
        key=lambda p: p.name,
    )
    if not files:
        raise NothingToPackageError(f"no .v or .sv files in {dir}")
    zip_path.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(zip_path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for p in files:
            zi = zipfile.ZipInfo(filename=p.name, date_time=_ZIP_EPOCH)
            zi.compress_type = zipfile.ZIP_DEFLATED
            zi.create_system = 3  # unix, fixed regardless of host
            zi.external_attr = (0o644 & 0xFFFF) << 16
            zf.writestr(zi, p.read_bytes(), compresslevel=9)
    return zip_path
