/**
 * Least-squares fit of per-node costs to measured execution times.
 *
 * Each measured program contributes one equation: its node-kind counts
 * dotted with the weight vector should approximate its measured time per
 * row.  The result is written as a weight file the primary CLI accepts
 * with --weights.  Advisory only: an under-determined system is reported
 * and nothing is written.
 */

import { NodeCounts } from "./sexpr.js";

export interface Measurement {
  counts: NodeCounts;
  /** microseconds per corpus row */
  usPerRow: number;
}

// Two collinearities are built into the language itself: every part is a
// constant or a substring (parts = conststr + substr) and every substring
// has exactly two positions (cpos + rpos + findpos = 2 * substr).  Those
// overheads therefore cannot be separated by any measurement set; they are
// folded into the atom/position weights and the emitted file zeroes the
// folded keys to avoid double counting.
const FEATURES: (keyof NodeCounts)[] = [
  "conststr",
  "cpos",
  "rpos",
  "token",
  "findpos",
];

const WEIGHT_KEYS: Record<string, string> = {
  conststr: "conststr_base",
  cpos: "cpos",
  rpos: "rpos",
  token: "token",
  findpos: "findpos",
};

export class UnderdeterminedFit extends Error {}

function solve(matrix: number[][], rhs: number[]): number[] {
  // Gaussian elimination with partial pivoting; throws on rank deficiency.
  const n = rhs.length;
  const a = matrix.map((row, i) => [...row, rhs[i]]);
  for (let col = 0; col < n; col += 1) {
    let pivot = col;
    for (let row = col + 1; row < n; row += 1) {
      if (Math.abs(a[row][col]) > Math.abs(a[pivot][col])) pivot = row;
    }
    if (Math.abs(a[pivot][col]) < 1e-9) {
      throw new UnderdeterminedFit(`feature system is rank-deficient at column ${col}`);
    }
    [a[col], a[pivot]] = [a[pivot], a[col]];
    for (let row = 0; row < n; row += 1) {
      if (row === col) continue;
      const factor = a[row][col] / a[col][col];
      for (let k = col; k <= n; k += 1) a[row][k] -= factor * a[col][k];
    }
  }
  return a.map((row, i) => row[n] / a[i][i]);
}

export interface FitResult {
  /** weight-file key -> fitted value (microseconds per node, clamped at 0) */
  weights: Map<string, number>;
  features: string[];
}

export function fitWeights(measurements: Measurement[]): FitResult {
  if (measurements.length < 2) {
    throw new UnderdeterminedFit("need at least two measured programs");
  }
  // Only fit features that actually vary across the measured programs.
  const active = FEATURES.filter((f) => {
    const values = measurements.map((m) => m.counts[f]);
    return new Set(values).size > 1 || values.some((v) => v > 0);
  });
  if (active.length === 0) {
    throw new UnderdeterminedFit("no varying features to fit");
  }
  if (measurements.length < active.length) {
    throw new UnderdeterminedFit(
      `${measurements.length} measurements cannot determine ${active.length} features`,
    );
  }
  // Normal equations: (X^T X) w = X^T y
  const n = active.length;
  const xtx = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  const xty = new Array<number>(n).fill(0);
  for (const m of measurements) {
    const row = active.map((f) => m.counts[f]);
    for (let i = 0; i < n; i += 1) {
      xty[i] += row[i] * m.usPerRow;
      for (let j = 0; j < n; j += 1) xtx[i][j] += row[i] * row[j];
    }
  }
  const solved = solve(xtx, xty);
  const weights = new Map<string, number>();
  active.forEach((feature, i) => {
    weights.set(WEIGHT_KEYS[feature], Math.max(0, solved[i]));
  });
  return { weights, features: active.map((f) => WEIGHT_KEYS[f]) };
}

export function renderWeightsFile(fit: FitResult): string {
  const lines = [
    "# Suggested performance weights fitted from measured execution times",
    "# (microseconds per node; advisory, load with --weights).",
    "# Per-part and per-substring overheads are folded into the atom and",
    "# position weights (they are structurally inseparable).",
    "concat_per_part = 0",
    "substr = 0",
  ];
  for (const [key, value] of [...fit.weights.entries()].sort()) {
    lines.push(`${key} = ${value.toFixed(4)}`);
  }
  return lines.join("\n") + "\n";
}
