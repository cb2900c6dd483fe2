"use strict";
/**
 * Chat-style panel over one session.
 *
 * The panel never mutates session files; it re-reads the transcript
 * through the core after every command, so closing and reopening the
 * editor reproduces the identical view. Editor coupling is confined to
 * the small PanelHost interface.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.CommandQueue = exports.ChatPanel = void 0;
const transcript_1 = require("./transcript");
class ChatPanel {
    host;
    core;
    state = (0, transcript_1.emptyPanelState)();
    constructor(host, core) {
        this.host = host;
        this.core = core;
        this.render();
    }
    async refresh(sessionPath) {
        const view = await this.core.session(sessionPath);
        this.state.sessionPath = sessionPath;
        this.state.entries = view.transcript;
        this.state.lastError = null;
        this.render();
    }
    setPending(pending) {
        this.state.pending = pending;
        this.render();
    }
    setDiagnostics(diags) {
        this.state.lastDiagnostics = diags;
        this.render();
    }
    showError(message) {
        this.state.lastError = message;
        this.state.pending = false;
        this.render();
    }
    reveal() {
        this.host.reveal();
    }
    render() {
        this.host.setHtml((0, transcript_1.renderTranscriptHtml)(this.state));
    }
}
exports.ChatPanel = ChatPanel;
/** Serializes core invocations: one in flight, later commands queue. */
class CommandQueue {
    chain = Promise.resolve();
    run(task) {
        const next = this.chain.then(task, task);
        this.chain = next.catch(() => undefined);
        return next;
    }
}
exports.CommandQueue = CommandQueue;
//# sourceMappingURL=panel.js.map