/**
 * Bridge to the primary CLI: interpreter outputs for a serialized program.
 * The harness never imports the primary package; `eval --json` is the
 * contract (one JSON-encoded output per input line, null when the program
 * has no output for that input).
 */

import { spawnSync } from "node:child_process";

import type { Output } from "./runner.js";

export function interpreterOutputs(
  primary: string,
  programPath: string,
  inputs: string[],
  timeoutMs = 60_000,
): Output[] {
  for (const input of inputs) {
    if (input.includes("\n")) {
      throw new Error("eval bridge is line-oriented; inputs must not contain newlines");
    }
  }
  const [cmd, ...baseArgs] = primary.split(" ");
  const proc = spawnSync(cmd, [...baseArgs, "eval", "--program", programPath, "--json"], {
    input: inputs.map((line) => line + "\n").join(""),
    encoding: "utf-8",
    timeout: timeoutMs,
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) throw proc.error;
  if (proc.status !== 0) {
    throw new Error(`primary eval exited with ${proc.status}: ${proc.stderr.trim()}`);
  }
  const lines = proc.stdout.split("\n").filter((line) => line.length > 0);
  if (lines.length !== inputs.length) {
    throw new Error(`expected ${inputs.length} outputs, got ${lines.length}`);
  }
  return lines.map((line) => JSON.parse(line) as Output);
}
