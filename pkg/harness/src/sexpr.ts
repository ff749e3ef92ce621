/**
 * Minimal reader for the primary's serialized program format, just enough
 * to count node kinds for the cost-model calibration features.
 */

export interface NodeCounts {
  parts: number;
  conststr: number;
  substr: number;
  cpos: number;
  rpos: number;
  findpos: number;
  token: number;
}

type Form = string | Form[];

function tokenize(text: string): string[] {
  const out: string[] = [];
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (ch === "(" || ch === ")") {
      out.push(ch);
      i += 1;
    } else if (/\s/.test(ch)) {
      i += 1;
    } else if (ch === '"') {
      let j = i + 1;
      while (j < text.length && text[j] !== '"') {
        j += text[j] === "\\" ? 2 : 1;
      }
      if (j >= text.length) throw new Error("unterminated string literal");
      out.push(text.slice(i, j + 1));
      i = j + 1;
    } else {
      let j = i;
      while (j < text.length && !/[\s()"]/.test(text[j])) j += 1;
      out.push(text.slice(i, j));
      i = j;
    }
  }
  return out;
}

function read(tokens: string[], pos: { i: number }): Form {
  const tok = tokens[pos.i];
  if (tok === undefined) throw new Error("unexpected end of program text");
  pos.i += 1;
  if (tok === "(") {
    const items: Form[] = [];
    while (tokens[pos.i] !== ")") {
      if (tokens[pos.i] === undefined) throw new Error("missing closing parenthesis");
      items.push(read(tokens, pos));
    }
    pos.i += 1;
    return items;
  }
  if (tok === ")") throw new Error("unexpected ')'");
  return tok;
}

export function parseForm(text: string): Form {
  const tokens = tokenize(text.trim());
  const pos = { i: 0 };
  const form = read(tokens, pos);
  if (pos.i !== tokens.length) throw new Error("trailing content after program");
  return form;
}

export function countNodes(programText: string): NodeCounts {
  const counts: NodeCounts = {
    parts: 0,
    conststr: 0,
    substr: 0,
    cpos: 0,
    rpos: 0,
    findpos: 0,
    token: 0,
  };

  function walk(form: Form): void {
    if (typeof form === "string") return;
    const head = form[0];
    if (typeof head !== "string") throw new Error("malformed form");
    switch (head) {
      case "concat":
        counts.parts += form.length - 1;
        break;
      case "conststr":
        counts.conststr += 1;
        break;
      case "substr":
        counts.substr += 1;
        break;
      case "cpos":
        counts.cpos += 1;
        break;
      case "rpos":
        counts.rpos += 1;
        break;
      case "findpos":
        counts.findpos += 1;
        break;
      case "tokens":
        counts.token += form.length - 1;
        return; // children are plain tokens or (lit "...") forms
      case "lit":
        return;
      default:
        throw new Error(`unknown form head '${head}'`);
    }
    for (const child of form.slice(1)) walk(child);
  }

  walk(parseForm(programText));
  return counts;
}
