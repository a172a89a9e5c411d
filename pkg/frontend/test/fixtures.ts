/** Recorded wire documents used as test fixtures. */

import { GradeOutputDoc, PublicTaskView, TaskConfigDoc } from "../src/types.js";

/** The canonical two-argument subtraction exercise configuration. */
export const SUB_CONFIG: TaskConfigDoc = {
  spec: {
    name: "sub",
    args: [
      { name: "a", type: "int" },
      { name: "b", type: "int" },
    ],
    return: "int",
  },
  test: {
    predefined: [
      { data: "(10, 5)", feedback: { "10": "Have you subtracted the 2nd parameter?" } },
      { data: "(7, 15)" },
      { data: "(-1, 2)", feedback: { "**": "Have you considered negative parameters?" } },
      { data: "(12, 0)" },
    ],
    random: { n: 10, args: ["int(-20,20)", "int(-20,20)"] },
  },
  solution: { f1: "return a - b" },
};

/** A recorded grading response for a submission that kept only the first
 * parameter: 2 of 14 tests passed, failing example (10,5). */
export const RECORDED_FAILED_OUTPUT: GradeOutputDoc = {
  tid: "s001",
  status: "failed",
  feedback: {
    example: { input: "(10,5)", expected: "5", actual: "10" },
    message: "Have you subtracted the 2nd parameter?",
    stats: { succeeded: 2, total: 14 },
    score: 0.14285715,
  },
};

export const RECORDED_SUCCESS_OUTPUT: GradeOutputDoc = {
  tid: "s002",
  status: "success",
  feedback: {
    stats: { succeeded: 14, total: 14 },
    score: 1.0,
  },
};

export const RECORDED_ERROR_OUTPUT: GradeOutputDoc = {
  tid: "",
  status: "error",
  error_detail: "submission is not well-formed JSON",
};

export const SUB_PUBLIC_VIEW: PublicTaskView = {
  task_id: "sub",
  language: "python",
  spec: SUB_CONFIG.spec,
  predefined: ["(10, 5)", "(7, 15)", "(-1, 2)", "(12, 0)"],
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
