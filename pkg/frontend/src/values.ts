/** Client-side mirrors of the engine's value, tuple and generator rules,
 * so drafts are checked before anything reaches the server. */

import { SemType } from "./types.js";

const IDENTIFIER_RE = /^[A-Za-z_][A-Za-z0-9_]*$/;

// Names the target-language runtime reserves; mirrors server validation.
const RESERVED = new Set([
  "False", "None", "True", "and", "as", "assert", "async", "await", "break",
  "class", "continue", "def", "del", "elif", "else", "except", "finally",
  "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
  "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
]);

const INT_RE = /^-?[0-9]+$/;
const FLOAT_RE = /^-?([0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?|inf|nan)$/;

export function isIdentifier(text: string): boolean {
  return IDENTIFIER_RE.test(text) && !RESERVED.has(text);
}

/** Does `text` parse as a value of `type`? Returns an error or null. */
export function checkValueText(text: string, type: SemType): string | null {
  switch (type) {
    case "int":
      return INT_RE.test(text) ? null : `"${text}" is not an int`;
    case "float":
      return FLOAT_RE.test(text) ? null : `"${text}" is not a float`;
    case "bool":
      return text === "true" || text === "false"
        ? null
        : `"${text}" is not a bool (true/false)`;
    case "str":
      return checkQuotedString(text);
  }
}

function checkQuotedString(text: string): string | null {
  if (text.length < 2 || !text.startsWith('"') || !text.endsWith('"')) {
    return `"${text}" is not a double-quoted string`;
  }
  let i = 1;
  const end = text.length - 1;
  while (i < end) {
    const ch = text[i];
    if (ch === "\\") {
      if (i + 1 >= end) return "dangling escape";
      if (!['\\', '"', "n", "t"].includes(text[i + 1])) {
        return `unknown escape \\${text[i + 1]}`;
      }
      i += 2;
    } else if (ch === '"') {
      return "unescaped quote inside string";
    } else {
      i += 1;
    }
  }
  return null;
}

/** Split "(10, 5)" into raw element texts, honouring quoted strings. */
export function splitTuple(text: string): string[] | string {
  const s = text.trim();
  if (!s.startsWith("(")) return "tuple must start with '('";
  if (!s.endsWith(")")) return "tuple must end with ')'";
  const inner = s.slice(1, -1);
  if (inner.trim() === "") return [];
  const elements: string[] = [];
  let current = "";
  let inString = false;
  for (let i = 0; i < inner.length; i++) {
    const ch = inner[i];
    if (inString) {
      current += ch;
      if (ch === "\\" && i + 1 < inner.length) {
        current += inner[i + 1];
        i += 1;
      } else if (ch === '"') {
        inString = false;
      }
    } else if (ch === '"') {
      inString = true;
      current += ch;
    } else if (ch === ",") {
      elements.push(current);
      current = "";
    } else {
      current += ch;
    }
  }
  if (inString) return "unterminated string";
  elements.push(current);
  return elements;
}

/** Validate a predefined-data tuple against declared types. */
export function checkTuple(text: string, types: SemType[]): string | null {
  const elements = splitTuple(text);
  if (typeof elements === "string") return elements;
  if (elements.length !== types.length) {
    return `${elements.length} elements for ${types.length} arguments`;
  }
  for (let i = 0; i < types.length; i++) {
    const error = checkValueText(elements[i].trim(), types[i]);
    if (error) return `element ${i}: ${error}`;
  }
  return null;
}

const GENERATOR_RE = /^\s*(int|float|bool|str)\s*\(\s*(.*?)\s*\)\s*$/s;

/** Validate one generator expression such as "int(-20,20)". */
export function checkGenerator(text: string, expected: SemType): string | null {
  const match = GENERATOR_RE.exec(text);
  if (!match) return `"${text}" is not a generator expression`;
  const [, kind, paramsText] = match;
  if (kind !== expected) {
    return `generator produces ${kind}, argument is ${expected}`;
  }
  const params = paramsText === "" ? [] : paramsText.split(",").map((p) => p.trim());
  if (kind === "bool") {
    return params.length === 0 ? null : "bool() takes no parameters";
  }
  if (params.length !== 2) return `${kind}(...) takes two parameters`;
  const [a, b] = params;
  if (kind === "int") {
    if (!INT_RE.test(a) || !INT_RE.test(b)) return "int bounds must be integers";
    return BigInt(a) <= BigInt(b) ? null : "empty range (lo > hi)";
  }
  if (kind === "float") {
    const lo = Number(a);
    const hi = Number(b);
    if (!/^-?[0-9]/.test(a) || Number.isNaN(lo) || Number.isNaN(hi)) {
      return "float bounds must be numbers";
    }
    return lo <= hi ? null : "empty range (lo > hi)";
  }
  // str(minlen,maxlen)
  if (!/^[0-9]+$/.test(a) || !/^[0-9]+$/.test(b)) {
    return "str lengths must be non-negative integers";
  }
  return Number(a) <= Number(b) ? null : "empty length range";
}
