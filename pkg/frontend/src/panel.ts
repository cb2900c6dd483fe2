/**
 * Chat-style panel over one session.
 *
 * The panel never mutates session files; it re-reads the transcript
 * through the core after every command, so closing and reopening the
 * editor reproduces the identical view. Editor coupling is confined to
 * the small PanelHost interface.
 */

import { CoreClient, LintDiagnostic } from "./core";
import { PanelState, emptyPanelState, renderTranscriptHtml } from "./transcript";

export interface PanelHost {
    setHtml(html: string): void;
    reveal(): void;
}

export class ChatPanel {
    readonly state: PanelState = emptyPanelState();

    constructor(
        private readonly host: PanelHost,
        private readonly core: CoreClient,
    ) {
        this.render();
    }

    async refresh(sessionPath: string): Promise<void> {
        const view = await this.core.session(sessionPath);
        this.state.sessionPath = sessionPath;
        this.state.entries = view.transcript;
        this.state.lastError = null;
        this.render();
    }

    setPending(pending: boolean): void {
        this.state.pending = pending;
        this.render();
    }

    setDiagnostics(diags: LintDiagnostic[]): void {
        this.state.lastDiagnostics = diags;
        this.render();
    }

    showError(message: string): void {
        this.state.lastError = message;
        this.state.pending = false;
        this.render();
    }

    reveal(): void {
        this.host.reveal();
    }

    private render(): void {
        this.host.setHtml(renderTranscriptHtml(this.state));
    }
}

/** Serializes core invocations: one in flight, later commands queue. */
export class CommandQueue {
    private chain: Promise<unknown> = Promise.resolve();

    run<T>(task: () => Promise<T>): Promise<T> {
        const next = this.chain.then(task, task);
        this.chain = next.catch(() => undefined);
        return next;
    }
}
