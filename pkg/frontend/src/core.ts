/**
 * Subprocess bridge to the nls core CLI.
 *
 * Every mutation and every byte of data the extension shows comes from
 * the core's JSON output; this module owns spawning, exit-code mapping,
 * and JSON decoding, and nothing else.
 */

import { execFile } from "child_process";

export class CoreNotFoundError extends Error {
    constructor(command: string) {
        super(`nls core executable not found: '${command}'. Set the nls.corePath setting.`);
        this.name = "CoreNotFoundError";
    }
}

export class CoreError extends Error {
    constructor(message: string, public readonly exitCode: number, public readonly stderr: string) {
        super(message);
        this.name = "CoreError";
    }
}

export interface CoreOptions {
    /** Executable, e.g. "nls" or a Python interpreter. */
    command: string;
    /** Arguments placed before the subcommand, e.g. ["-m", "nls.cli"]. */
    prefixArgs?: string[];
    /** Forwarded as --config-dir where the CLI accepts it. */
    configDir?: string;
    /** Extra environment (merged over process.env). */
    env?: Record<string, string>;
}

export interface ExecResult {
    exitCode: number;
    stdout: string;
    stderr: string;
}

export interface LintDiagnostic {
    rule_id: string;
    severity: "error" | "warning";
    file: string;
    line: number;
    col: number;
    message: string;
}

export interface GenerateResult {
    session: string;
    response_index: number;
    assistant: string;
    artifacts: string[];
    diagnostics: LintDiagnostic[];
    lint_summary: { errors: number; warnings: number };
}

export interface TranscriptEntry {
    index: number;
    role: "system" | "user" | "assistant";
    kind: "initial_prompt" | "adjustment" | "response" | "ledger_update";
    content: string;
    timestamp: string;
}

export interface SessionView {
    schema: string;
    version: number;
    id: string;
    created: string;
    config: { base_url: string; model_category: string; model_id: string };
    transcript: TranscriptEntry[];
    artifacts: { module_name: string; language: string; response_index: number }[];
}

export class CoreClient {
    constructor(private readonly opts: CoreOptions) {}

    exec(args: string[], extraEnv?: Record<string, string>): Promise<ExecResult> {
        const argv = [...(this.opts.prefixArgs ?? []), ...args];
        const env = { ...process.env, ...this.opts.env, ...extraEnv };
        return new Promise((resolve, reject) => {
            execFile(this.opts.command, argv, { env, maxBuffer: 16 * 1024 * 1024 },
                (error, stdout, stderr) => {
                    const err = error as (NodeJS.ErrnoException & { code?: number | string }) | null;
                    if (err && err.code === "ENOENT") {
                        reject(new CoreNotFoundError(this.opts.command));
                        return;
                    }
                    const exitCode = err && typeof err.code === "number" ? err.code : 0;
                    resolve({ exitCode, stdout: String(stdout), stderr: String(stderr) });
                });
        });
    }

    private configArgs(): string[] {
        return this.opts.configDir ? ["--config-dir", this.opts.configDir] : [];
    }

    /** Run a subcommand that must exit 0, decoding stdout as JSON. */
    private async runJson<T>(args: string[], extraEnv?: Record<string, string>): Promise<T> {
        const res = await this.exec(args, extraEnv);
        if (res.exitCode !== 0) {
            throw new CoreError(res.stderr.trim() || `core exited ${res.exitCode}`,
                res.exitCode, res.stderr);
        }
        return JSON.parse(res.stdout) as T;
    }

    private async runPlain(args: string[], extraEnv?: Record<string, string>): Promise<string> {
        const res = await this.exec(args, extraEnv);
        if (res.exitCode !== 0) {
            throw new CoreError(res.stderr.trim() || `core exited ${res.exitCode}`,
                res.exitCode, res.stderr);
        }
        return res.stdout;
    }

    /** The key travels via the environment, never argv. */
    addKey(key: string): Promise<string> {
        return this.runPlain(["add-key", ...this.configArgs()], { NLS_API_KEY: key });
    }

    selectModel(category: string, model: string): Promise<string> {
        return this.runPlain([
            "select-model", "--category", category, "--model", model,
            ...this.configArgs(),
        ]);
    }

    generate(opts: {
        session: string; promptFile: string;
        provider?: string; fixtures?: string; outDir?: string;
    }): Promise<GenerateResult> {
        return this.runJson<GenerateResult>([
            "generate", "--session", opts.session, "--prompt-file", opts.promptFile,
            ...(opts.provider ? ["--provider", opts.provider] : []),
            ...(opts.fixtures ? ["--fixtures", opts.fixtures] : []),
            ...(opts.outDir ? ["--out-dir", opts.outDir] : []),
            "--format", "json",
            ...this.configArgs(),
        ]);
    }

    adjust(opts: {
        session: string; noteFile: string;
        provider?: string; fixtures?: string; outDir?: string;
    }): Promise<GenerateResult> {
        return this.runJson<GenerateResult>([
            "adjust", "--session", opts.session, "--note-file", opts.noteFile,
            ...(opts.provider ? ["--provider", opts.provider] : []),
            ...(opts.fixtures ? ["--fixtures", opts.fixtures] : []),
            ...(opts.outDir ? ["--out-dir", opts.outDir] : []),
            "--format", "json",
            ...this.configArgs(),
        ]);
    }

    updatePrompt(text: string, session?: string): Promise<string> {
        return this.runPlain([
            "update-prompt", "--text", text,
            ...(session ? ["--session", session] : []),
            ...this.configArgs(),
        ]);
    }

    packageSession(session: string, out: string): Promise<string> {
        return this.runPlain(["package", "--session", session, "--out", out]);
    }

    /** lint exits 0/1/2 for clean/warnings/errors; all three carry valid JSON. */
    async lint(files: string[]): Promise<LintDiagnostic[]> {
        const res = await this.exec(["lint", ...files, "--format", "json"]);
        if (res.exitCode > 2) {
            throw new CoreError(res.stderr.trim(), res.exitCode, res.stderr);
        }
        return res.stdout.trim() ? (JSON.parse(res.stdout) as LintDiagnostic[]) : [];
    }

    session(sessionPath: string): Promise<SessionView> {
        return this.runJson<SessionView>([
            "session", "--session", sessionPath, "--format", "json",
        ]);
    }
}
