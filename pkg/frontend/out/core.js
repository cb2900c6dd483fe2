"use strict";
/**
 * Subprocess bridge to the nls core CLI.
 *
 * Every mutation and every byte of data the extension shows comes from
 * the core's JSON output; this module owns spawning, exit-code mapping,
 * and JSON decoding, and nothing else.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.CoreClient = exports.CoreError = exports.CoreNotFoundError = void 0;
const child_process_1 = require("child_process");
class CoreNotFoundError extends Error {
    constructor(command) {
        super(`nls core executable not found: '${command}'. Set the nls.corePath setting.`);
        this.name = "CoreNotFoundError";
    }
}
exports.CoreNotFoundError = CoreNotFoundError;
class CoreError extends Error {
    exitCode;
    stderr;
    constructor(message, exitCode, stderr) {
        super(message);
        this.exitCode = exitCode;
        this.stderr = stderr;
        this.name = "CoreError";
    }
}
exports.CoreError = CoreError;
class CoreClient {
    opts;
    constructor(opts) {
        this.opts = opts;
    }
    exec(args, extraEnv) {
        const argv = [...(this.opts.prefixArgs ?? []), ...args];
        const env = { ...process.env, ...this.opts.env, ...extraEnv };
        return new Promise((resolve, reject) => {
            (0, child_process_1.execFile)(this.opts.command, argv, { env, maxBuffer: 16 * 1024 * 1024 }, (error, stdout, stderr) => {
                const err = error;
                if (err && err.code === "ENOENT") {
                    reject(new CoreNotFoundError(this.opts.command));
                    return;
                }
                const exitCode = err && typeof err.code === "number" ? err.code : 0;
                resolve({ exitCode, stdout: String(stdout), stderr: String(stderr) });
            });
        });
    }
    configArgs() {
        return this.opts.configDir ? ["--config-dir", this.opts.configDir] : [];
    }
    /** Run a subcommand that must exit 0, decoding stdout as JSON. */
    async runJson(args, extraEnv) {
        const res = await this.exec(args, extraEnv);
        if (res.exitCode !== 0) {
            throw new CoreError(res.stderr.trim() || `core exited ${res.exitCode}`, res.exitCode, res.stderr);
        }
        return JSON.parse(res.stdout);
    }
    async runPlain(args, extraEnv) {
        const res = await this.exec(args, extraEnv);
        if (res.exitCode !== 0) {
            throw new CoreError(res.stderr.trim() || `core exited ${res.exitCode}`, res.exitCode, res.stderr);
        }
        return res.stdout;
    }
    /** The key travels via the environment, never argv. */
    addKey(key) {
        return this.runPlain(["add-key", ...this.configArgs()], { NLS_API_KEY: key });
    }
    selectModel(category, model) {
        return this.runPlain([
            "select-model", "--category", category, "--model", model,
            ...this.configArgs(),
        ]);
    }
    generate(opts) {
        return this.runJson([
            "generate", "--session", opts.session, "--prompt-file", opts.promptFile,
            ...(opts.provider ? ["--provider", opts.provider] : []),
            ...(opts.fixtures ? ["--fixtures", opts.fixtures] : []),
            ...(opts.outDir ? ["--out-dir", opts.outDir] : []),
            "--format", "json",
            ...this.configArgs(),
        ]);
    }
    adjust(opts) {
        return this.runJson([
            "adjust", "--session", opts.session, "--note-file", opts.noteFile,
            ...(opts.provider ? ["--provider", opts.provider] : []),
            ...(opts.fixtures ? ["--fixtures", opts.fixtures] : []),
            ...(opts.outDir ? ["--out-dir", opts.outDir] : []),
            "--format", "json",
            ...this.configArgs(),
        ]);
    }
    updatePrompt(text, session) {
        return this.runPlain([
            "update-prompt", "--text", text,
            ...(session ? ["--session", session] : []),
            ...this.configArgs(),
        ]);
    }
    packageSession(session, out) {
        return this.runPlain(["package", "--session", session, "--out", out]);
    }
    /** lint exits 0/1/2 for clean/warnings/errors; all three carry valid JSON. */
    async lint(files) {
        const res = await this.exec(["lint", ...files, "--format", "json"]);
        if (res.exitCode > 2) {
            throw new CoreError(res.stderr.trim(), res.exitCode, res.stderr);
        }
        return res.stdout.trim() ? JSON.parse(res.stdout) : [];
    }
    session(sessionPath) {
        return this.runJson([
            "session", "--session", sessionPath, "--format", "json",
        ]);
    }
}
exports.CoreClient = CoreClient;
//# sourceMappingURL=core.js.map