/** Rendering of grading output: score, stats, failing example, hint. */

import { el } from "./dom.js";
import { GradeOutputDoc } from "./types.js";

export function parseGradeOutput(output: string): GradeOutputDoc {
  const doc = JSON.parse(output) as GradeOutputDoc;
  if (typeof doc.tid !== "string" || typeof doc.status !== "string") {
    throw new Error("malformed grading output");
  }
  return doc;
}

export function renderFeedback(doc: GradeOutputDoc): HTMLElement {
  const panel = el("div", { class: `feedback feedback-${doc.status}` });

  if (doc.status === "error") {
    panel.append(
      el("p", { class: "fb-error" },
         `The grader could not evaluate this submission: ${doc.error_detail ?? "unknown error"}`),
    );
    return panel;
  }

  const feedback = doc.feedback;
  if (!feedback) return panel;

  const percent = Math.round(feedback.score * 100);
  const scoreBox = el("div", { class: "fb-score" });
  const bar = el("progress", { max: "100", value: String(percent) });
  scoreBox.append(bar, el("span", {}, ` score ${(feedback.score).toFixed(2)}`));
  panel.append(scoreBox);

  panel.append(
    el("p", { class: "fb-stats" },
       `${feedback.stats.succeeded} of ${feedback.stats.total} tests passed`),
  );

  if (doc.status === "success") {
    panel.append(el("p", { class: "fb-success" }, "All tests passed. Well done!"));
  }

  if (feedback.example) {
    const table = el("table", { class: "fb-example" });
    const rows: [string, string][] = [
      ["input", feedback.example.input],
      ["expected", feedback.example.expected],
      ["actual", feedback.example.actual],
    ];
    for (const [label, value] of rows) {
      table.append(
        el("tr", {},
           el("th", {}, label),
           el("td", { class: `fb-example-${label}` }, el("code", {}, value))),
      );
    }
    panel.append(el("h4", {}, "A failing test"), table);
  }

  if (feedback.message) {
    panel.append(el("p", { class: "fb-message" }, feedback.message));
  }
  return panel;
}
