"use strict";
/**
 * Lint JSON → editor diagnostic mapping.
 *
 * The core reports 1-based line/col; editors want 0-based ranges. The
 * mapping stays in plain data so it can be tested without an editor.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.toEditorDiagnostics = toEditorDiagnostics;
function toEditorDiagnostics(diags) {
    const byFile = new Map();
    for (const d of diags) {
        const mapped = {
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
        }
        else {
            byFile.set(d.file, [mapped]);
        }
    }
    return byFile;
}
//# sourceMappingURL=diagnostics.js.map