/** Task-file loading (the primary's documented JSON schema). */

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

export interface Task {
  name: string;
  objective: "size" | "perf";
  examples: { in: string; out: string }[];
  corpus: string[];
  reference?: Record<string, string>;
}

export function loadTask(path: string): Task {
  const data = JSON.parse(readFileSync(path, "utf-8")) as Task;
  if (!data.name || !Array.isArray(data.corpus) || data.corpus.length === 0) {
    throw new Error(`${path}: not a valid task file`);
  }
  return data;
}

export function loadSuite(directory: string): Task[] {
  const names = readdirSync(directory)
    .filter((name) => name.endsWith(".json"))
    .sort();
  if (names.length === 0) throw new Error(`${directory}: no task files found`);
  return names.map((name) => loadTask(join(directory, name)));
}
