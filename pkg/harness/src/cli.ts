/**
 * Harness entry point.
 *
 *   node dist/cli.js run --tasks ../tasks --artifacts ../out \
 *        [--primary textsynth] [--objective both] [--reps 5] [--out exec_report.csv]
 *
 * Runs every task's emitted p1 and p123 modules over the full corpus,
 * verifies them against the interpreter through the primary CLI, measures
 * throughput, and writes the exec-report CSV.
 *
 *   node dist/cli.js calibrate --report exec_report.csv --artifacts ../out \
 *        --out suggested_weights.cfg
 *
 * Fits per-node costs to the measured times and writes a weight file the
 * primary accepts via --weights.
 */

import { existsSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { UnderdeterminedFit, fitWeights, Measurement, renderWeightsFile } from "./calibrate.js";
import { ExecReport, execAndCompare } from "./compare.js";
import { interpreterOutputs } from "./interp.js";
import { parseCsv, writeCsv } from "./report.js";
import { countNodes } from "./sexpr.js";
import { loadSuite } from "./tasks.js";

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || argv[i + 1] === undefined) {
      throw new Error(`bad argument ${key}`);
    }
    args.set(key.slice(2), argv[i + 1]);
  }
  return args;
}

function cmdRun(args: Map<string, string>): number {
  const tasksDir = args.get("tasks");
  const artifacts = args.get("artifacts");
  if (!tasksDir || !artifacts) {
    console.error("run requires --tasks and --artifacts");
    return 1;
  }
  const primary = args.get("primary") ?? "textsynth";
  const objectiveArg = args.get("objective") ?? "both";
  const objectives = objectiveArg === "both" ? ["size", "perf"] : [objectiveArg];
  const reps = Number(args.get("reps") ?? "5");
  const measure = args.get("measure") !== "false";
  const outPath = args.get("out") ?? "exec_report.csv";

  const reports: ExecReport[] = [];
  let totalMismatches = 0;
  let faster = 0;
  let comparable = 0;

  for (const task of loadSuite(tasksDir)) {
    for (const objective of objectives) {
      const stem = `${task.name}__${objective}`;
      const byProgram = new Map<string, ExecReport>();
      for (const program of ["p1", "p123"]) {
        const emitted = join(artifacts, `${stem}__${program}.py`);
        const sexp = join(artifacts, `${stem}__${program}.sexp`);
        if (!existsSync(emitted) || !existsSync(sexp)) {
          console.error(`skipping ${stem} ${program}: artifacts missing`);
          continue;
        }
        const expected = interpreterOutputs(primary, sexp, task.corpus);
        const report = execAndCompare(stem, program, emitted, task.corpus, expected, {
          reps,
          measure,
        });
        reports.push(report);
        byProgram.set(program, report);
        totalMismatches += report.loadFailure === null ? report.mismatches.length : 1;
      }
      const p1 = byProgram.get("p1");
      const p123 = byProgram.get("p123");
      if (measure && p1 && p123 && p1.loadFailure === null && p123.loadFailure === null) {
        comparable += 1;
        if (p123.rowsPerSec >= p1.rowsPerSec) faster += 1;
      }
    }
  }

  writeCsv(reports, outPath);
  console.log(`wrote ${outPath} (${reports.length} rows)`);
  console.log(`mismatches: ${totalMismatches}`);
  if (measure && comparable > 0) {
    console.log(`p123 at least as fast as p1: ${faster}/${comparable}`);
  }
  return totalMismatches === 0 ? 0 : 2;
}

function cmdCalibrate(args: Map<string, string>): number {
  const reportPath = args.get("report");
  const artifacts = args.get("artifacts");
  const outPath = args.get("out") ?? "suggested_weights.cfg";
  if (!reportPath || !artifacts) {
    console.error("calibrate requires --report and --artifacts");
    return 1;
  }
  const rows = parseCsv(readFileSync(reportPath, "utf-8"));
  const measurements: Measurement[] = [];
  for (const row of rows) {
    if (row.mismatches !== "0" || row.rowsPerSec <= 0) continue;
    const sexp = join(artifacts, `${row.task}__${row.program}.sexp`);
    if (!existsSync(sexp)) continue;
    measurements.push({
      counts: countNodes(readFileSync(sexp, "utf-8")),
      usPerRow: 1e6 / row.rowsPerSec,
    });
  }
  try {
    const fit = fitWeights(measurements);
    writeFileSync(outPath, renderWeightsFile(fit), "utf-8");
    console.log(`wrote ${outPath} (fitted: ${fit.features.join(", ")})`);
    return 0;
  } catch (err) {
    if (err instanceof UnderdeterminedFit) {
      console.error(`under-determined fit, nothing written: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  try {
    const args = parseArgs(rest);
    if (command === "run") return cmdRun(args);
    if (command === "calibrate") return cmdCalibrate(args);
  } catch (err) {
    console.error(String(err));
    return 1;
  }
  console.error("usage: cli.js run|calibrate [options]");
  return 1;
}

process.exitCode = main();
