"""The `nls` command: key entry, model selection, generation and
adjustment turns, prompt-ledger updates, packaging, lint, and the two
benchmark reports.

Exit codes: 0 success, 64 usage error, 78 generation attempted before
configuration, 1 operational failure. `lint` exits 0/1/2 for
clean/warnings/errors.
"""

from __future__ import annotations

import argparse
import getpass
import json
import os
import sys
from pathlib import Path

from nls import bench, extract, hdl_lint, ledger as ledger_mod, provider as provider_mod
from nls.errors import NlsError
from nls.session import (
    NotConfiguredError,
    SessionState,
    config_from_store,
    default_catalog,
    load_catalog,
    load_session,
    save_config_store,
    save_session,
    session_lock,
)

EX_OK = 0
EX_ERROR = 1
EX_USAGE = 64
EX_NOT_CONFIGURED = 78

_MISSING_STEP = {"api_key": "add-key", "model": "select-model"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    p = _Parser(prog="nls", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_config_dir(sp):
        sp.add_argument("--config-dir", default=None,
                        help="override the per-user config directory")

    sp = sub.add_parser("add-key", help="store the API key (read from "
                        "$NLS_API_KEY or an interactive prompt, never argv)")
    add_config_dir(sp)

    sp = sub.add_parser("select-model", help="choose model category and model")
    sp.add_argument("--category", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--catalog", default=None, help="model catalog JSON file")
    add_config_dir(sp)

    for name, help_text in (("generate", "start a generation turn"),
                            ("adjust", "send an adjustment turn")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--session", required=True, help="session file path")
        if name == "generate":
            sp.add_argument("--prompt-file", required=True)
        else:
            sp.add_argument("--note-file", required=True)
        sp.add_argument("--provider", choices=("live", "replay"), default="live")
        sp.add_argument("--fixtures", default=None,
                        help="fixture directory for the replay provider")
        sp.add_argument("--out-dir", default=None,
                        help="artifact output directory "
                             "(default: <session>_artifacts)")
        sp.add_argument("--ledger", default=None, help="prompt ledger file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        add_config_dir(sp)

    sp = sub.add_parser("update-prompt", help="append a rule to the prompt ledger")
    sp.add_argument("--text", required=True)
    sp.add_argument("--ledger", default=None, help="prompt ledger file")
    sp.add_argument("--session", default=None,
                    help="also record the update in this session's transcript")
    add_config_dir(sp)

    sp = sub.add_parser("package", help="zip a session's generated HDL files")
    sp.add_argument("--session", required=True)
    sp.add_argument("--out", required=True, help="zip file to write")
    sp.add_argument("--dir", default=None,
                    help="directory to package (default: <session>_artifacts)")

    sp = sub.add_parser("lint", help="lint Verilog/SystemVerilog files")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("bench-rde", help="design-effort metrics for a session")
    sp.add_argument("--session", required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("bench-ppa", help="resource deltas between two reports")
    sp.add_argument("--candidate", required=True,
                    help="CSV or vendor utilization report")
    sp.add_argument("--baseline", required=True)
    sp.add_argument("--candidate-design", default=None,
                    help="design name when the CSV holds several")
    sp.add_argument("--baseline-design", default=None)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("session", help="print a session transcript")
    sp.add_argument("--session", required=True)
    sp.add_argument("--format", choices=("json", "text"), default="json")

    return p


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


def run(argv: list[str]) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse exits for usage errors and --help
        return int(e.code or 0)
    handler = {
        "add-key": _cmd_add_key,
        "select-model": _cmd_select_model,
        "generate": _cmd_generate,
        "adjust": _cmd_adjust,
        "update-prompt": _cmd_update_prompt,
        "package": _cmd_package,
        "lint": _cmd_lint,
        "bench-rde": _cmd_bench_rde,
        "bench-ppa": _cmd_bench_ppa,
        "session": _cmd_session,
    }[args.command]
    try:
        return handler(args)
    except NotConfiguredError as e:
        steps = ", then ".join(f"'nls {_MISSING_STEP[m]}'" for m in e.missing)
        print(f"nls {args.command}: not configured: run {steps} first",
              file=sys.stderr)
        return EX_NOT_CONFIGURED
    except NlsError as e:
        print(f"nls {args.command}: {e}", file=sys.stderr)
        return EX_ERROR
    except OSError as e:
        print(f"nls {args.command}: {e}", file=sys.stderr)
        return EX_ERROR


# -- configuration commands ------------------------------------------------------

def _cmd_add_key(args) -> int:
    key = os.environ.get("NLS_API_KEY")
    if key is None:
        key = getpass.getpass("API key: ")
    if not key.strip():
        raise NlsError("API key is empty")
    path = save_config_store({"api_key": key.strip()}, args.config_dir)
    print(f"stored API key in {path}")
    return EX_OK


def _cmd_select_model(args) -> int:
    catalog = load_catalog(args.catalog) if args.catalog else default_catalog()
    # Validate through a scratch session so the catalog rules apply.
    scratch = SessionState()
    scratch.select_model(catalog, args.category, args.model)
    path = save_config_store(
        {"model_category": args.category, "model_id": args.model},
        args.config_dir)
    print(f"selected {args.model} ({args.category}); stored in {path}")
    return EX_OK


# -- generation pipeline -----------------------------------------------------------

def _artifacts_dir(session_path: Path, override: str | None) -> Path:
    if override:
        return Path(override)
    stem = session_path.name[:-len(session_path.suffix)] if session_path.suffix \
        else session_path.name
    return session_path.parent / f"{stem}_artifacts"


def _make_provider(args, state: SessionState):
    if args.provider == "replay":
        if not args.fixtures:
            raise NlsError("--provider replay requires --fixtures DIR")
        # Fixture k maps to the session's k-th turn, counting prior runs.
        return provider_mod.replay_provider(args.fixtures).skip(len(state.responses()))
    return provider_mod.LiveProvider()


def _load_ledger(path_arg: str | None, config_dir: str | None) -> tuple:
    from nls.session import config_dir as default_config_dir
    path = Path(path_arg) if path_arg else \
        Path(config_dir or default_config_dir()) / "ledger.json"
    if path.exists():
        return ledger_mod.load_ledger(path), path
    return ledger_mod.default_ledger(), path


def _extract_artifacts(entry_content: str, response_index: int):
    """Split a response into HDL artifacts; non-HDL blocks are ignored."""
    artifacts = []
    for block in extract.extract_code_blocks(entry_content):
        if block.language_tag not in extract.HDL_TAGS:
            continue
        try:
            artifacts.extend(extract.split_modules(block, response_index))
        except extract.NoModuleFoundError:
            continue  # HDL-tagged snippet without a full module
    return artifacts


def _run_turn(args, *, is_adjustment: bool) -> int:
    session_path = Path(args.session)
    cfg = config_from_store(args.config_dir)
    prompt_path = Path(args.prompt_file if not is_adjustment else args.note_file)
    text = prompt_path.read_text(encoding="utf-8")

    with session_lock(session_path):
        if session_path.exists():
            state = load_session(session_path)
            state.config = cfg
        else:
            state = SessionState(config=cfg)
        led, _ = _load_ledger(args.ledger, args.config_dir)
        system_prompt = ledger_mod.render_system_prompt(led)
        prov = _make_provider(args, state)
        if is_adjustment:
            entry = state.add_adjustment(text, prov, system_prompt)
        else:
            entry = state.begin_generation(text, prov, system_prompt)
        save_session(state, session_path)

        artifacts = _extract_artifacts(entry.content, entry.index)
        state.register_artifacts(artifacts)
        save_session(state, session_path)

        out_dir = _artifacts_dir(session_path, args.out_dir)
        written = extract.write_artifacts(artifacts, out_dir)

        diags = []
        for art, path in zip(artifacts, written):
            for tree in hdl_lint.parse_source(art.text, file=str(path)):
                diags.extend(hdl_lint.lint(tree, art.language))
        diags.sort(key=lambda d: d.sort_key())

    errors = sum(1 for d in diags if d.severity == "error")
    warnings = len(diags) - errors
    if args.format == "json":
        print(json.dumps({
            "session": str(session_path),
            "response_index": entry.index,
            "assistant": entry.content,
            "artifacts": [str(p) for p in written],
            "diagnostics": json.loads(hdl_lint.lint_report(diags, "json")),
            "lint_summary": {"errors": errors, "warnings": warnings},
        }, ensure_ascii=False))
    else:
        print(f"session: {session_path}")
        for p in written:
            print(f"wrote: {p}")
        print(f"lint: {errors} error(s), {warnings} warning(s)")
        sys.stdout.write(hdl_lint.lint_report(diags, "text"))
    return EX_OK


def _cmd_generate(args) -> int:
    return _run_turn(args, is_adjustment=False)


def _cmd_adjust(args) -> int:
    return _run_turn(args, is_adjustment=True)


def _cmd_update_prompt(args) -> int:
    led, path = _load_ledger(args.ledger, args.config_dir)
    led = ledger_mod.add_rule(led, args.text)
    path.parent.mkdir(parents=True, exist_ok=True)
    ledger_mod.save_ledger(led, path)
    if args.session:
        state = load_session(args.session)
        state.record_ledger_update(args.text)
        save_session(state, args.session)
    print(f"added rule {led.rules[-1].id} to {path}")
    return EX_OK


def _cmd_package(args) -> int:
    session_path = Path(args.session)
    if not session_path.exists():
        raise NlsError(f"no such session: {session_path}")
    directory = _artifacts_dir(session_path, args.dir)
    out = extract.package_zip(directory, args.out)
    print(f"packaged {directory} -> {out}")
    return EX_OK


# -- lint and benchmarks --------------------------------------------------------------

def _cmd_lint(args) -> int:
    diags = []
    for name in args.files:
        path = Path(name)
        text = path.read_text(encoding="utf-8")
        language = "systemverilog" if path.suffix == ".sv" else "verilog"
        trees = hdl_lint.parse_source(text, file=str(path))
        if not trees:
            print(f"nls lint: {path}: no modules found", file=sys.stderr)
            continue
        for tree in trees:
            diags.extend(hdl_lint.lint(tree, language))
    diags.sort(key=lambda d: d.sort_key())
    out = hdl_lint.lint_report(diags, args.format)
    if out:
        sys.stdout.write(out)
    return hdl_lint.exit_status(diags)


def _cmd_bench_rde(args) -> int:
    state = load_session(args.session)
    metrics = bench.compute_rde(state)
    sys.stdout.write(metrics.to_json() if args.format == "json"
                     else metrics.to_csv_row())
    return EX_OK


def _load_report(path_arg: str, design: str | None, which: str) -> bench.ResourceReport:
    path = Path(path_arg)
    if path.suffix.lower() == ".csv":
        reports = bench.parse_resource_csv(path)
        if design is not None:
            for rep in reports:
                if rep.design_name == design:
                    return rep
            raise NlsError(f"{which}: no design named {design!r} in {path}")
        if len(reports) == 1:
            return reports[0]
        names = ", ".join(r.design_name for r in reports)
        raise NlsError(
            f"{which}: {path} holds {len(reports)} designs ({names}); "
            f"pick one with --{which}-design")
    return bench.parse_vendor_utilization(
        path.read_text(encoding="utf-8"), design_name=design or path.stem)


def _cmd_bench_ppa(args) -> int:
    candidate = _load_report(args.candidate, args.candidate_design, "candidate")
    baseline = _load_report(args.baseline, args.baseline_design, "baseline")
    rows = bench.compare_reports(candidate, baseline)
    if args.format == "json":
        sys.stdout.write(bench.render_comparison_json(rows, candidate, baseline))
    else:
        sys.stdout.write(bench.render_comparison_text(rows, candidate, baseline))
    return EX_OK


def _cmd_session(args) -> int:
    state = load_session(args.session)
    if args.format == "json":
        print(json.dumps({
            "schema": "nls-session",
            "version": 1,
            "id": state.id,
            "created": state.created.isoformat(),
            "config": {
                "base_url": state.config.base_url,
                "model_category": state.config.model_category,
                "model_id": state.config.model_id,
            },
            "transcript": [
                {
                    "index": e.index,
                    "role": e.role,
                    "kind": e.kind,
                    "content": e.content,
                    "timestamp": e.timestamp.isoformat(),
                }
                for e in state.transcript
            ],
            "artifacts": [
                {
                    "module_name": a.module_name,
                    "language": a.language,
                    "response_index": a.response_index,
                }
                for a in state.artifacts
            ],
        }, ensure_ascii=False))
    else:
        print(f"session {state.id} ({len(state.transcript)} entries)")
        for e in state.transcript:
            first = e.content.splitlines()[0] if e.content else ""
            print(f"  [{e.index}] {e.role}/{e.kind}: {first[:70]}")
        for a in state.artifacts:
            print(f"  artifact: {a.module_name} ({a.language}) "
                  f"from entry {a.response_index}")
    return EX_OK


if __name__ == "__main__":
    sys.exit(main())
