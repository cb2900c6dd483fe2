/**
 * Panel state and its HTML rendering.
 *
 * The panel is a verbatim view over the session file (fetched through
 * the core's `session` subcommand); rendering is a pure function so the
 * same state always produces the same markup.
 */

import { LintDiagnostic, TranscriptEntry } from "./core";

export interface PanelState {
    sessionPath: string | null;
    entries: TranscriptEntry[];
    pending: boolean;
    lastDiagnostics: LintDiagnostic[];
    lastError: string | null;
}

export function emptyPanelState(): PanelState {
    return {
        sessionPath: null,
        entries: [],
        pending: false,
        lastDiagnostics: [],
        lastError: null,
    };
}

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

const KIND_LABEL: Record<TranscriptEntry["kind"], string> = {
    initial_prompt: "Input Question",
    adjustment: "Adjustment",
    response: "Output Code",
    ledger_update: "Updated Prompt",
};

function entryHtml(entry: TranscriptEntry): string {
    const label = KIND_LABEL[entry.kind] ?? entry.kind;
    const cls = entry.role === "assistant" ? "assistant" : "user";
    return [
        `<section class="turn ${cls}" data-index="${entry.index}" data-kind="${entry.kind}">`,
        `<header>#${entry.index} · ${escapeHtml(label)} · ${escapeHtml(entry.timestamp)}</header>`,
        `<pre>${escapeHtml(entry.content)}</pre>`,
        `</section>`,
    ].join("\n");
}

export function renderTranscriptHtml(state: PanelState): string {
    const body: string[] = [];
    if (state.sessionPath === null) {
        body.push(`<p class="hint">No session yet. Run <b>NLS: Generate Verilog Code</b> to start.</p>`);
    } else {
        body.push(`<p class="session">Session: ${escapeHtml(state.sessionPath)}</p>`);
        body.push(...state.entries.map(entryHtml));
    }
    if (state.pending) {
        body.push(`<p class="busy">Waiting for the model…</p>`);
    }
    if (state.lastError) {
        body.push(`<p class="error">${escapeHtml(state.lastError)}</p>`);
    }
    if (state.lastDiagnostics.length > 0) {
        const items = state.lastDiagnostics.map(
            (d) =>
                `<li>${escapeHtml(d.file)}:${d.line}:${d.col} [${escapeHtml(d.rule_id)}] ` +
                `${escapeHtml(d.severity)}: ${escapeHtml(d.message)}</li>`,
        );
        body.push(`<details open><summary>Lint findings (${items.length})</summary><ul>` +
            items.join("") + `</ul></details>`);
    }
    return `<!DOCTYPE html>
<html>
<head>
<meta charset="UTF-8">
<style>
  body { font-family: var(--vscode-font-family, sans-serif); padding: 0 1em; }
  .turn { border-left: 3px solid var(--vscode-panel-border, #888); margin: 0.8em 0; padding: 0.2em 0.8em; }
  .turn.assistant { border-left-color: var(--vscode-charts-blue, #4a90d9); }
  .turn header { font-size: 0.85em; opacity: 0.7; }
  pre { white-space: pre-wrap; word-break: break-word; }
  .busy { font-style: italic; }
  .error { color: var(--vscode-errorForeground, #c00); white-space: pre-wrap; }
</style>
</head>
<body>
${body.join("\n")}
</body>
</html>`;
}
