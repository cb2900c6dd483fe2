"use strict";
var __createBinding = (this && this.__createBinding) || (Object.create ? (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    var desc = Object.getOwnPropertyDescriptor(m, k);
    if (!desc || ("get" in desc ? !m.__esModule : desc.writable || desc.configurable)) {
      desc = { enumerable: true, get: function() { return m[k]; } };
    }
    Object.defineProperty(o, k2, desc);
}) : (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    o[k2] = m[k];
}));
var __setModuleDefault = (this && this.__setModuleDefault) || (Object.create ? (function(o, v) {
    Object.defineProperty(o, "default", { enumerable: true, value: v });
}) : function(o, v) {
    o["default"] = v;
});
var __importStar = (this && this.__importStar) || (function () {
    var ownKeys = function(o) {
        ownKeys = Object.getOwnPropertyNames || function (o) {
            var ar = [];
            for (var k in o) if (Object.prototype.hasOwnProperty.call(o, k)) ar[ar.length] = k;
            return ar;
        };
        return ownKeys(o);
    };
    return function (mod) {
        if (mod && mod.__esModule) return mod;
        var result = {};
        if (mod != null) for (var k = ownKeys(mod), i = 0; i < k.length; i++) if (k[i] !== "default") __createBinding(result, mod, k[i]);
        __setModuleDefault(result, mod);
        return result;
    };
})();
Object.defineProperty(exports, "__esModule", { value: true });
exports.NlsExtension = void 0;
exports.activate = activate;
exports.deactivate = deactivate;
const fs = __importStar(require("fs/promises"));
const os = __importStar(require("os"));
const path = __importStar(require("path"));
const vscode = __importStar(require("vscode"));
const core_1 = require("./core");
const diagnostics_1 = require("./diagnostics");
const panel_1 = require("./panel");
function config() {
    return vscode.workspace.getConfiguration("nls");
}
function makeCore() {
    const cfg = config();
    return new core_1.CoreClient({
        command: cfg.get("corePath", "nls") || "nls",
        prefixArgs: cfg.get("coreArgs", []),
        configDir: cfg.get("configDir", "") || undefined,
    });
}
function sessionPath() {
    const configured = config().get("sessionPath", "");
    if (configured) {
        return configured;
    }
    const folders = vscode.workspace.workspaceFolders;
    const base = folders && folders.length > 0 ? folders[0].uri.fsPath : os.tmpdir();
    return path.join(base, "nls-session.jsonl");
}
function providerArgs() {
    const cfg = config();
    const provider = cfg.get("provider", "live");
    if (provider === "replay") {
        return { provider, fixtures: cfg.get("fixturesDir", "") };
    }
    return {};
}
async function writeTempFile(prefix, content) {
    const dir = await fs.mkdtemp(path.join(os.tmpdir(), "nls-"));
    const file = path.join(dir, `${prefix}.txt`);
    await fs.writeFile(file, content, "utf-8");
    return file;
}
class NlsExtension {
    panel = null;
    webviewPanel = null;
    queue = new panel_1.CommandQueue();
    diagnostics;
    constructor() {
        this.diagnostics = vscode.languages.createDiagnosticCollection("nls");
    }
    ensurePanel(core) {
        if (this.panel && this.webviewPanel) {
            this.webviewPanel.reveal();
            return this.panel;
        }
        const wv = vscode.window.createWebviewPanel("nlsTranscript", "NLS Conversation", vscode.ViewColumn.Beside, { enableScripts: false });
        wv.onDidDispose(() => {
            this.panel = null;
            this.webviewPanel = null;
        });
        const host = {
            setHtml: (html) => { wv.webview.html = html; },
            reveal: () => wv.reveal(),
        };
        this.webviewPanel = wv;
        this.panel = new panel_1.ChatPanel(host, core);
        return this.panel;
    }
    surfaceError(err) {
        const message = err instanceof Error ? err.message : String(err);
        if (this.panel) {
            this.panel.showError(message);
        }
        if (err instanceof core_1.CoreNotFoundError) {
            void vscode.window.showErrorMessage(message);
        }
        else if (err instanceof core_1.CoreError) {
            // quote the core's own wording (gating messages included)
            void vscode.window.showErrorMessage(message);
        }
        else {
            void vscode.window.showErrorMessage(`NLS: ${message}`);
        }
    }
    async addKey() {
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
        }
        catch (err) {
            this.surfaceError(err);
        }
    }
    async selectModel() {
        const cfg = config();
        const catalog = cfg.get("modelCatalog", {});
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
        }
        catch (err) {
            this.surfaceError(err);
        }
    }
    async generate() {
        const prompt = await vscode.window.showInputBox({
            prompt: "Describe the hardware to generate (initial prompt)",
            ignoreFocusOut: true,
        });
        if (!prompt) {
            return;
        }
        await this.runTurn("generate", prompt);
    }
    async adjust() {
        const note = await vscode.window.showInputBox({
            prompt: "Adjustment to apply to the current design",
            ignoreFocusOut: true,
        });
        if (!note) {
            return;
        }
        await this.runTurn("adjust", note);
    }
    async runTurn(kind, text) {
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
        }
        catch (err) {
            panel.setPending(false);
            this.surfaceError(err);
        }
    }
    publishDiagnostics(result) {
        this.diagnostics.clear();
        for (const [file, diags] of (0, diagnostics_1.toEditorDiagnostics)(result.diagnostics)) {
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
    async openArtifacts(result) {
        for (const artifact of result.artifacts) {
            const doc = await vscode.workspace.openTextDocument(vscode.Uri.file(artifact));
            await vscode.window.showTextDocument(doc, { preview: false });
        }
    }
    async updatePrompt() {
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
            await this.queue.run(() => makeCore().updatePrompt(text, sessionExists ? session : undefined));
            void vscode.window.showInformationMessage("NLS: system prompt updated.");
        }
        catch (err) {
            this.surfaceError(err);
        }
    }
    async packageCode() {
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
        }
        catch (err) {
            this.surfaceError(err);
        }
    }
}
exports.NlsExtension = NlsExtension;
function activate(context) {
    const ext = new NlsExtension();
    context.subscriptions.push(ext.diagnostics, vscode.commands.registerCommand("nls.addKey", () => ext.addKey()), vscode.commands.registerCommand("nls.selectModel", () => ext.selectModel()), vscode.commands.registerCommand("nls.generate", () => ext.generate()), vscode.commands.registerCommand("nls.adjust", () => ext.adjust()), vscode.commands.registerCommand("nls.updatePrompt", () => ext.updatePrompt()), vscode.commands.registerCommand("nls.package", () => ext.packageCode()));
    return ext;
}
function deactivate() {
    // nothing to clean up: subprocesses are per-command
}
//# sourceMappingURL=extension.js.map