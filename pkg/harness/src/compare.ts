/**
 * Execute-and-compare: run an emitted module over a corpus, check every
 * output against the expected (interpreter) outputs, and measure median
 * throughput in corpus rows per second.
 */

import { createHash } from "node:crypto";

import {
  LoadFailure,
  Output,
  rowsPerSecond,
  runOutputs,
  runTimed,
} from "./runner.js";

export interface Mismatch {
  input: string;
  expected: Output;
  actual: Output;
}

export interface ExecReport {
  task: string;
  program: string;
  loadFailure: string | null;
  outputsDigest: string;
  rowsPerSec: number;
  mismatches: Mismatch[];
}

export function digestOutputs(outputs: Output[]): string {
  return createHash("sha256").update(JSON.stringify(outputs)).digest("hex");
}

export interface ExecOptions {
  reps?: number;
  measure?: boolean;
}

export function execAndCompare(
  task: string,
  program: string,
  emittedPath: string,
  corpus: string[],
  expected: Output[],
  options: ExecOptions = {},
): ExecReport {
  const { reps = 5, measure = true } = options;
  if (expected.length !== corpus.length) {
    throw new Error("expected outputs must cover the corpus");
  }
  try {
    const actual = runOutputs(emittedPath, corpus);
    const mismatches: Mismatch[] = [];
    corpus.forEach((input, i) => {
      if (actual[i] !== expected[i]) {
        mismatches.push({ input, expected: expected[i], actual: actual[i] });
      }
    });
    let rowsPerSec = 0;
    if (measure) {
      const sample = runTimed(emittedPath, corpus, reps);
      rowsPerSec = rowsPerSecond(sample, corpus.length);
    }
    return {
      task,
      program,
      loadFailure: null,
      outputsDigest: digestOutputs(actual),
      rowsPerSec,
      mismatches,
    };
  } catch (err) {
    if (err instanceof LoadFailure) {
      return {
        task,
        program,
        loadFailure: err.message,
        outputsDigest: "",
        rowsPerSec: 0,
        mismatches: [],
      };
    }
    throw err;
  }
}
