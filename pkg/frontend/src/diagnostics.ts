/**
 * Lint JSON → editor diagnostic mapping.
 *
 * The core reports 1-based line/col; editors want 0-based ranges. The
 * mapping stays in plain data so it can be tested without an editor.
 */

import { LintDiagnostic } from "./core";

export interface EditorDiagnostic {
    file: string;
    /** 0-based line. */
    line: number;
    /** 0-based start column. */
    col: number;
    severity: "error" | "warning";
    message: string;
    code: string;
    source: string;
}

export function toEditorDiagnostics(diags: LintDiagnostic[]): Map<string, EditorDiagnostic[]> {
    const byFile = new Map<string, EditorDiagnostic[]>();
    for (const d of diags) {
        const mapped: EditorDiagnostic = {
            file: d.file,
            line: Math.max(0, d.line - 1),
            col: Math.max(0, d.col - 1),
            severity: d.severity,
            message: d.message,
            code: d.rule_id,
            source: "nls",
        };
        const bucket = byFile.get(d.file);
        if (bucket) {
            bucket.push(mapped);
        } else {
            byFile.set(d.file, [mapped]);
        }
    }
    return byFile;
}
