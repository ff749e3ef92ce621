/**
 * Runs an emitted transform module in an isolated python subprocess, so a
 * crashing or hanging program cannot take the harness down with it.
 */

import { spawnSync } from "node:child_process";

export type Output = string | null;

export interface TimingSample {
  /** corpus passes per repetition (inner loop count) */
  loops: number;
  /** elapsed milliseconds per repetition, warm-up already discarded */
  repsMs: number[];
}

const DRIVER = `
import importlib.util, json, sys, time

path, mode = sys.argv[1], sys.argv[2]
try:
    spec = importlib.util.spec_from_file_location("emitted", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    transform = mod.transform
except Exception as exc:
    print(f"load failure: {exc}", file=sys.stderr)
    sys.exit(3)

data = json.loads(sys.stdin.read())

if mode == "outputs":
    outs = []
    for x in data:
        try:
            outs.append(transform(x))
        except Exception:
            outs.append(None)
    print(json.dumps(outs))
else:
    reps, loops = int(sys.argv[3]), int(sys.argv[4])
    times = []
    for _ in range(reps + 1):
        t0 = time.perf_counter_ns()
        for _ in range(loops):
            for x in data:
                try:
                    transform(x)
                except Exception:
                    pass
        times.append((time.perf_counter_ns() - t0) / 1e6)
    print(json.dumps(times[1:]))
`;

export class LoadFailure extends Error {}

function runDriver(args: string[], stdin: string, timeoutMs: number): string {
  const proc = spawnSync("python3", ["-c", DRIVER, ...args], {
    input: stdin,
    encoding: "utf-8",
    timeout: timeoutMs,
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) throw proc.error;
  if (proc.status === 3) throw new LoadFailure(proc.stderr.trim());
  if (proc.status !== 0) {
    throw new Error(`driver exited with ${proc.status}: ${proc.stderr.trim()}`);
  }
  return proc.stdout;
}

/** Outputs of the emitted module on every input (null where it failed). */
export function runOutputs(
  emittedPath: string,
  inputs: string[],
  timeoutMs = 60_000,
): Output[] {
  const stdout = runDriver([emittedPath, "outputs"], JSON.stringify(inputs), timeoutMs);
  return JSON.parse(stdout) as Output[];
}

/**
 * Timed corpus passes.  A repetition is `loops` passes over the corpus;
 * the loop count is auto-calibrated so one repetition is long enough to
 * measure, and an extra warm-up repetition is run and discarded.
 */
export function runTimed(
  emittedPath: string,
  inputs: string[],
  reps = 5,
  minRepMs = 25,
  timeoutMs = 120_000,
): TimingSample {
  const probe = JSON.parse(
    runDriver([emittedPath, "time", "1", "1"], JSON.stringify(inputs), timeoutMs),
  ) as number[];
  const perPass = Math.max(probe[0], 1e-4);
  const loops = Math.min(200_000, Math.max(1, Math.ceil(minRepMs / perPass)));
  const repsMs = JSON.parse(
    runDriver([emittedPath, "time", String(reps), String(loops)], JSON.stringify(inputs), timeoutMs),
  ) as number[];
  return { loops, repsMs };
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

export function rowsPerSecond(sample: TimingSample, corpusSize: number): number {
  const ms = median(sample.repsMs);
  return (corpusSize * sample.loops) / (ms / 1000);
}
