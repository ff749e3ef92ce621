/** End-to-end runs of the harness CLI against a two-task subset. */

import { spawnSync } from "node:child_process";
import { copyFileSync, mkdirSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { parseCsv } from "../src/report.js";

const PRIMARY = process.env.TEXTSYNTH_CLI ?? "textsynth";
const TASKS_DIR = resolve(__dirname, "..", "..", "tasks");
const CLI = resolve(__dirname, "..", "dist", "cli.js");

let work: string;
let suiteDir: string;
let artifacts: string;

beforeAll(() => {
  const build = spawnSync("npx", ["tsc", "-p", resolve(__dirname, "..", "tsconfig.json")], {
    encoding: "utf-8",
    timeout: 120_000,
  });
  expect(build.status, build.stderr).toBe(0);

  work = mkdtempSync(join(tmpdir(), "harness-cli-"));
  suiteDir = join(work, "tasks");
  artifacts = join(work, "out");
  mkdirSync(suiteDir);
  // chosen so the measured programs span every calibration feature:
  // pure-constant, pure-index, index+find, and boundary scans with both
  // one- and two-token patterns
  const subset = [
    "second_date.json",
    "after_dash_code.json",
    "log_level.json",
    "constant_answer.json",
  ];
  for (const name of subset) {
    copyFileSync(join(TASKS_DIR, name), join(suiteDir, name));
  }
  const bench = spawnSync(
    PRIMARY,
    ["bench", "--tasks", suiteDir, "--out", artifacts, "--metrics", join(work, "m.csv")],
    { encoding: "utf-8", timeout: 120_000 },
  );
  expect(bench.status, bench.stderr).toBe(0);
});

describe("harness cli", () => {
  it("run writes an exec report with zero mismatches and a speedup summary", () => {
    const reportPath = join(work, "exec_report.csv");
    const proc = spawnSync(
      "node",
      [
        CLI,
        "run",
        "--tasks",
        suiteDir,
        "--artifacts",
        artifacts,
        "--primary",
        PRIMARY,
        "--out",
        reportPath,
        "--reps",
        "3",
      ],
      { encoding: "utf-8", timeout: 240_000 },
    );
    expect(proc.status, proc.stderr).toBe(0);
    expect(proc.stdout).toContain("mismatches: 0");
    expect(proc.stdout).toContain("p123 at least as fast as p1:");

    const rows = parseCsv(readFileSync(reportPath, "utf-8"));
    expect(rows.length).toBe(16); // 4 tasks x 2 objectives x 2 programs
    expect(rows.every((r) => r.mismatches === "0")).toBe(true);
    expect(rows.every((r) => r.rowsPerSec > 0)).toBe(true);
  });

  it("calibrate writes a loadable weights file from the exec report", () => {
    const weightsPath = join(work, "suggested_weights.cfg");
    const proc = spawnSync(
      "node",
      [
        CLI,
        "calibrate",
        "--report",
        join(work, "exec_report.csv"),
        "--artifacts",
        artifacts,
        "--out",
        weightsPath,
      ],
      { encoding: "utf-8", timeout: 60_000 },
    );
    expect(proc.status, proc.stderr + proc.stdout).toBe(0);
    const text = readFileSync(weightsPath, "utf-8");
    expect(text).toContain("rpos = ");

    // the primary accepts the suggested file
    const synth = spawnSync(
      PRIMARY,
      [
        "synth",
        "--task",
        join(suiteDir, "second_date.json"),
        "--weights",
        weightsPath,
        "--out",
        join(work, "tuned"),
      ],
      { encoding: "utf-8", timeout: 120_000 },
    );
    expect(synth.status, synth.stderr).toBe(0);
  });
});
