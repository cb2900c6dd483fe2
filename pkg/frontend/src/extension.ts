import * as fs from "fs/promises";
import * as os from "os";
import * as path from "path";
import * as vscode from "vscode";

import { CoreClient, CoreError, CoreNotFoundError, GenerateResult } from "./core";
import { toEditorDiagnostics } from "./diagnostics";
import { ChatPanel, CommandQueue, PanelHost } from "./panel";

function config() {
    return vscode.workspace.getConfiguration("nls");
}

function makeCore(): CoreClient {
    const cfg = config();
    return new CoreClient({
        command: cfg.get<string>("corePath", "nls") || "nls",
        prefixArgs: cfg.get<string[]>("coreArgs", []),
        configDir: cfg.get<string>("configDir", "") || undefined,
    });
}

function sessionPath(): string {
    const configured = config().get<string>("sessionPath", "");
    if (configured) {
        return configured;
    }
    const folders = vscode.workspace.workspaceFolders;
    const base = folders && folders.length > 0 ? folders[0].uri.fsPath : os.tmpdir();
    return path.join(base, "nls-session.jsonl");
}

function providerArgs(): { provider?: string; fixtures?: string } {
    const cfg = config();
    const provider = cfg.get<string>("provider", "live");
    if (provider === "replay") {
        return { provider, fixtures: cfg.get<string>("fixturesDir", "") };
    }
    return {};
}

async function writeTempFile(prefix: string, content: string): Promise<string> {
    const dir = await fs.mkdtemp(path.join(os.tmpdir(), "nls-"));
    const file = path.join(dir, `${prefix}.txt`);
    await fs.writeFile(file, content, "utf-8");
    return file;
}

export class NlsExtension {
    private panel: ChatPanel | null = null;
    private webviewPanel: vscode.WebviewPanel | null = null;
    private readonly queue = new CommandQueue();
    readonly diagnostics: vscode.DiagnosticCollection;

    constructor() {
        this.diagnostics = vscode.languages.createDiagnosticCollection("nls");
    }

    private ensurePanel(core: CoreClient): ChatPanel {
        if (this.panel && this.webviewPanel) {
            this.webviewPanel.reveal();
            return this.panel;
        }
        const wv = vscode.window.createWebviewPanel(
            "nlsTranscript", "NLS Conversation",
            vscode.ViewColumn.Beside, { enableScripts: false });
        wv.onDidDispose(() => {
            this.panel = null;
            this.webviewPanel = null;
        });
        const host: PanelHost = {
            setHtml: (html) => { wv.webview.html = html; },
            reveal: () => wv.reveal(),
        };
        this.webviewPanel = wv;
        this.panel = new ChatPanel(host, core);
        return this.panel;
    }

    private surfaceError(err: unknown): void {
        const message = err instanceof Error ? err.message : String(err);
        if (this.panel) {
            this.panel.showError(message);
        }
        if (err instanceof CoreNotFoundError) {
            void vscode.window.showErrorMessage(message);
        } else if (err instanceof CoreError) {
            // quote the core's own wording (gating messages included)
            void vscode.window.showErrorMessage(message);
        } else {
            void vscode.window.showErrorMessage(`NLS: ${message}`);
        }
    }

    async addKey(): Promise<void> {
        const key = await vscode.window.showInputBox({
            prompt: "OpenAI API key (stored by the nls core, replaces any previous key)",
            password: true,
            ignoreFocusOut: true,
        });
        if (!key) {
            return;
        }
        try {
            await this.queue.run(() => makeCore().addKey(key));
            void vscode.window.showInformationMessage("NLS: API key stored.");
        } catch (err) {
            this.surfaceError(err);
        }
    }

    async selectModel(): Promise<void> {
        const cfg = config();
        const catalog = cfg.get<Record<string, string[]>>("modelCatalog", {});
        const categories = Object.keys(catalog);
        if (categories.length === 0) {
            void vscode.window.showErrorMessage("NLS: nls.modelCatalog is empty.");
            return;
        }
        const category = await vscode.window.showQuickPick(categories, {
            placeHolder: "Model category",
        });
        if (!category) {
            return;
        }
        const model = await vscode.window.showQuickPick(catalog[category] ?? [], {
            placeHolder: `Model in ${category}`,
        });
        if (!model) {
            return;
        }
        try {
            await this.queue.run(() => makeCore().selectModel(category, model));
            void vscode.window.showInformationMessage(`NLS: using ${model}.`);
        } catch (err) {
            this.surfaceError(err);
        }
    }

    async generate(): Promise<void> {
        const prompt = await vscode.window.showInputBox({
            prompt: "Describe the hardware to generate (initial prompt)",
            ignoreFocusOut: true,
        });
        if (!prompt) {
            return;
        }
        await this.runTurn("generate", prompt);
    }

    async adjust(): Promise<void> {
        const note = await vscode.window.showInputBox({
            prompt: "Adjustment to apply to the current design",
            ignoreFocusOut: true,
        });
        if (!note) {
            return;
        }
        await this.runTurn("adjust", note);
    }

    private async runTurn(kind: "generate" | "adjust", text: string): Promise<void> {
        const core = makeCore();
        const session = sessionPath();
        const panel = this.ensurePanel(core);
        panel.setPending(true);
        try {
            const result = await this.queue.run(async () => {
                const file = await writeTempFile(kind, text + "\n");
                const opts = { session, ...providerArgs() };
                return kind === "generate"
                    ? core.generate({ ...opts, promptFile: file })
                    : core.adjust({ ...opts, noteFile: file });
            });
            panel.setPending(false);
            await panel.refresh(session);
            panel.setDiagnostics(result.diagnostics);
            this.publishDiagnostics(result);
            await this.openArtifacts(result);
        } catch (err) {
            panel.setPending(false);
            this.surfaceError(err);
        }
    }

    private publishDiagnostics(result: GenerateResult): void {
        this.diagnostics.clear();
        for (const [file, diags] of toEditorDiagnostics(result.diagnostics)) {
            const mapped = diags.map((d) => {
                const range = new vscode.Range(d.line, d.col, d.line, d.col + 1);
                const severity = d.severity === "error"
                    ? vscode.DiagnosticSeverity.Error
                    : vscode.DiagnosticSeverity.Warning;
                const diag = new vscode.Diagnostic(range, d.message, severity);
                diag.source = d.source;
                diag.code = d.code;
                return diag;
            });
            this.diagnostics.set(vscode.Uri.file(file), mapped);
        }
    }

    private async openArtifacts(result: GenerateResult): Promise<void> {
        for (const artifact of result.artifacts) {
            const doc = await vscode.workspace.openTextDocument(vscode.Uri.file(artifact));
            await vscode.window.showTextDocument(doc, { preview: false });
        }
    }

    async updatePrompt(): Promise<void> {
        const text = await vscode.window.showInputBox({
            prompt: "Limitation or note to append to the system prompt",
            ignoreFocusOut: true,
        });
        if (!text) {
            return;
        }
        try {
            const session = sessionPath();
            const sessionExists = await fs.access(session).then(() => true, () => false);
            await this.queue.run(() =>
                makeCore().updatePrompt(text, sessionExists ? session : undefined));
            void vscode.window.showInformationMessage("NLS: system prompt updated.");
        } catch (err) {
            this.surfaceError(err);
        }
    }

    async packageCode(): Promise<void> {
        const session = sessionPath();
        const out = await vscode.window.showInputBox({
            prompt: "Zip file to write",
            value: session.replace(/\.jsonl$/, "") + ".zip",
            ignoreFocusOut: true,
        });
        if (!out) {
            return;
        }
        try {
            const message = await this.queue.run(() => makeCore().packageSession(session, out));
            void vscode.window.showInformationMessage(`NLS: ${message.trim()}`);
        } catch (err) {
            this.surfaceError(err);
        }
    }
}

export function activate(context: vscode.ExtensionContext): NlsExtension {
    const ext = new NlsExtension();
    context.subscriptions.push(
        ext.diagnostics,
        vscode.commands.registerCommand("nls.addKey", () => ext.addKey()),
        vscode.commands.registerCommand("nls.selectModel", () => ext.selectModel()),
        vscode.commands.registerCommand("nls.generate", () => ext.generate()),
        vscode.commands.registerCommand("nls.adjust", () => ext.adjust()),
        vscode.commands.registerCommand("nls.updatePrompt", () => ext.updatePrompt()),
        vscode.commands.registerCommand("nls.package", () => ext.packageCode()),
    );
    return ext;
}

export function deactivate(): void {
    // nothing to clean up: subprocesses are per-command
}
