import { describe, expect, it } from "vitest";

import { TranscriptEntry } from "../src/core";
import { emptyPanelState, renderTranscriptHtml } from "../src/transcript";

function entry(index: number, kind: TranscriptEntry["kind"], content: string): TranscriptEntry {
    return {
        index,
        role: kind === "response" ? "assistant" : "user",
        kind,
        content,
        timestamp: "2026-03-01T10:00:00+00:00",
    };
}

describe("renderTranscriptHtml", () => {
    it("renders entries verbatim, in order", () => {
        const state = emptyPanelState();
        state.sessionPath = "/work/s.jsonl";
        state.entries = [
            entry(0, "initial_prompt", "design a systolic array"),
            entry(1, "response", "module systolic; endmodule"),
            entry(2, "adjustment", "flatten the ports"),
        ];
        const html = renderTranscriptHtml(state);
        const first = html.indexOf("design a systolic array");
        const second = html.indexOf("module systolic; endmodule");
        const third = html.indexOf("flatten the ports");
        expect(first).toBeGreaterThan(-1);
        expect(second).toBeGreaterThan(first);
        expect(third).toBeGreaterThan(second);
        expect(html).toContain("Output Code");
    });

    it("escapes HTML in model output", () => {
        const state = emptyPanelState();
        state.sessionPath = "/s.jsonl";
        state.entries = [entry(0, "response", "wire a; // a <b> & \"q\"")];
        const html = renderTranscriptHtml(state);
        expect(html).toContain("&lt;b&gt;");
        expect(html).toContain("&amp;");
        expect(html).not.toContain("<b> &");
    });

    it("is a pure function of the state", () => {
        const state = emptyPanelState();
        state.sessionPath = "/s.jsonl";
        state.entries = [entry(0, "initial_prompt", "p")];
        expect(renderTranscriptHtml(state)).toBe(renderTranscriptHtml(state));
    });

    it("shows busy and error states", () => {
        const state = emptyPanelState();
        state.pending = true;
        state.lastError = "not configured: run 'nls add-key' first";
        const html = renderTranscriptHtml(state);
        expect(html).toContain("Waiting for the model");
        expect(html).toContain("add-key");
    });

    it("lists lint findings when present", () => {
        const state = emptyPanelState();
        state.sessionPath = "/s.jsonl";
        state.lastDiagnostics = [{
            rule_id: "NLS006",
            severity: "error",
            file: "top.v",
            line: 4,
            col: 18,
            message: "array in port list",
        }];
        const html = renderTranscriptHtml(state);
        expect(html).toContain("top.v:4:18");
        expect(html).toContain("NLS006");
    });
});
