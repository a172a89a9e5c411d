/** The authoring form's model: a draft that validates client-side and
 * emits exactly the configuration document the server expects. */

import { SemType, TaskConfigDoc, PredefinedTestDoc, RandomSpecDoc } from "./types.js";
import { checkGenerator, checkTuple, checkValueText, isIdentifier } from "./values.js";

export const WILDCARD_KEY = "**";

export interface FeedbackRow {
  key: string;
  message: string;
}

export interface PredefinedRow {
  data: string;
  feedback: FeedbackRow[];
}

export interface AuthoringDraft {
  name: string;
  args: { name: string; type: SemType }[];
  returnType: SemType;
  predefined: PredefinedRow[];
  randomCount: number;
  randomArgs: string[];
  randomSeed: number | null;
  solution: string;
  requestedId: string;
}

export function emptyDraft(): AuthoringDraft {
  return {
    name: "",
    args: [],
    returnType: "int",
    predefined: [],
    randomCount: 0,
    randomArgs: [],
    randomSeed: null,
    solution: "",
    requestedId: "",
  };
}

export interface DraftError {
  /** Field path, e.g. "args[0].name" or "predefined[1].feedback[0].key". */
  path: string;
  message: string;
}

export function validateDraft(draft: AuthoringDraft): DraftError[] {
  const errors: DraftError[] = [];
  const fail = (path: string, message: string) => errors.push({ path, message });

  if (!isIdentifier(draft.name)) {
    fail("name", "function name must be a usable identifier");
  }
  const seen = new Set<string>();
  draft.args.forEach((arg, i) => {
    if (!isIdentifier(arg.name)) {
      fail(`args[${i}].name`, "argument name must be a usable identifier");
    } else if (seen.has(arg.name)) {
      fail(`args[${i}].name`, `duplicate argument name "${arg.name}"`);
    }
    seen.add(arg.name);
  });

  const argTypes = draft.args.map((a) => a.type);
  draft.predefined.forEach((row, i) => {
    const tupleError = checkTuple(row.data, argTypes);
    if (tupleError) fail(`predefined[${i}].data`, tupleError);
    row.feedback.forEach((fb, j) => {
      if (fb.key !== WILDCARD_KEY) {
        const keyError = checkValueText(fb.key, draft.returnType);
        if (keyError) {
          fail(
            `predefined[${i}].feedback[${j}].key`,
            `key must be "${WILDCARD_KEY}" or a ${draft.returnType}`,
          );
        }
      }
      if (fb.message.trim() === "") {
        fail(`predefined[${i}].feedback[${j}].message`, "hint message is empty");
      }
    });
  });

  if (draft.randomCount < 0 || !Number.isInteger(draft.randomCount)) {
    fail("random.n", "random test count must be a non-negative integer");
  }
  if (draft.randomCount > 0) {
    if (draft.randomArgs.length !== draft.args.length) {
      fail("random.args", "one generator per argument is required");
    } else {
      draft.randomArgs.forEach((text, i) => {
        const generatorError = checkGenerator(text, draft.args[i].type);
        if (generatorError) fail(`random.args[${i}]`, generatorError);
      });
    }
  }
  if (draft.predefined.length === 0 && draft.randomCount === 0) {
    fail("test", "the task needs at least one test");
  }
  if (draft.solution.trim() === "") {
    fail("solution", "a reference solution is required");
  }
  return errors;
}

/** Emit the configuration document; shape matches the server exactly
 * (optional keys omitted, never null). */
export function buildConfig(draft: AuthoringDraft): TaskConfigDoc {
  const test: TaskConfigDoc["test"] = {};
  if (draft.predefined.length > 0) {
    test.predefined = draft.predefined.map((row): PredefinedTestDoc => {
      const doc: PredefinedTestDoc = { data: row.data };
      if (row.feedback.length > 0) {
        const feedback: Record<string, string> = {};
        for (const fb of row.feedback) feedback[fb.key] = fb.message;
        doc.feedback = feedback;
      }
      return doc;
    });
  }
  if (draft.randomCount > 0) {
    const random: RandomSpecDoc = {
      n: draft.randomCount,
      args: [...draft.randomArgs],
    };
    if (draft.randomSeed !== null) random.seed = draft.randomSeed;
    test.random = random;
  }
  return {
    spec: {
      name: draft.name,
      args: draft.args.map((a) => ({ name: a.name, type: a.type })),
      return: draft.returnType,
    },
    test,
    solution: { f1: draft.solution },
  };
}

/** Signature line shown as the statement surrogate on the solve page. */
export function signatureLine(name: string, argNames: string[]): string {
  return `def ${name}(${argNames.join(", ")}):`;
}
