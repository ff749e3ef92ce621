/** Exec-report CSV: task,program,rows_per_sec,mismatches */

import { writeFileSync } from "node:fs";

import { ExecReport } from "./compare.js";

export const CSV_HEADER = "task,program,rows_per_sec,mismatches";

export function renderCsv(reports: ExecReport[]): string {
  const lines = [CSV_HEADER];
  for (const report of reports) {
    const mismatches = report.loadFailure !== null ? "load-failure" : String(report.mismatches.length);
    lines.push(
      [report.task, report.program, report.rowsPerSec.toFixed(1), mismatches].join(","),
    );
  }
  return lines.join("\n") + "\n";
}

export function writeCsv(reports: ExecReport[], path: string): void {
  writeFileSync(path, renderCsv(reports), "utf-8");
}

export function parseCsv(text: string): { task: string; program: string; rowsPerSec: number; mismatches: string }[] {
  const lines = text.trim().split("\n");
  if (lines[0] !== CSV_HEADER) throw new Error("unexpected exec-report header");
  return lines.slice(1).map((line) => {
    const [task, program, rowsPerSec, mismatches] = line.split(",");
    return { task, program, rowsPerSec: Number(rowsPerSec), mismatches };
  });
}
