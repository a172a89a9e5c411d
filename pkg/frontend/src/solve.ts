/** The learner loop: show the task, accept a function body, grade it via
 * the API, render the feedback, and keep the attempt history so progress
 * between submissions stays visible. */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { signatureLine } from "./draft.js";
import { parseGradeOutput, renderFeedback } from "./feedback.js";
import { GradeOutputDoc, PublicTaskView } from "./types.js";

export interface Attempt {
  code: string;
  result: GradeOutputDoc;
}

export class SolvePage {
  /** Append-only within the session. */
  readonly history: Attempt[] = [];
  private inFlight = false;
  private counter = 0;
  private readonly sessionId: string;
  private root: HTMLElement = el("div");

  constructor(
    private readonly api: ApiClient,
    private readonly view: PublicTaskView,
    sessionId?: string,
  ) {
    this.sessionId = sessionId ?? `web-${Math.random().toString(36).slice(2, 10)}`;
  }

  mount(parent: HTMLElement): HTMLElement {
    this.root = el("div", { class: "solve" });
    const stub = signatureLine(this.view.spec.name, this.view.spec.args.map((a) => a.name));

    const statement = el("div", { class: "statement" },
      el("h2", {}, this.view.task_id),
      el("p", {}, "Complete the body of the function:"),
      el("pre", { class: "signature" }, stub),
    );
    if (this.view.predefined.length > 0) {
      statement.append(
        el("p", {}, "It will be tested on these inputs (and random ones):"),
        el("ul", { class: "predefined-inputs" },
          ...this.view.predefined.map((data) => el("li", {}, el("code", {}, data)))),
      );
    }
    this.root.append(statement);

    const editorBox = el("div", { class: "editor-box" },
      el("pre", { class: "signature" }, stub));
    const editor = el("textarea", {
      class: "editor", rows: "8", spellcheck: "false",
      placeholder: "    return ...",
    });
    editorBox.append(editor);
    const submit = el("button", { type: "button", class: "submit" }, "Submit");
    submit.addEventListener("click", () => void this.submit());
    editorBox.append(submit);
    this.root.append(editorBox);

    this.root.append(
      el("div", { class: "feedback-slot" }),
      el("div", { class: "history" }, el("h3", {}, "Attempts")),
    );
    parent.append(this.root);
    return this.root;
  }

  get editor(): HTMLTextAreaElement {
    return this.root.querySelector(".editor") as HTMLTextAreaElement;
  }

  get submitButton(): HTMLButtonElement {
    return this.root.querySelector(".submit") as HTMLButtonElement;
  }

  async submit(): Promise<void> {
    if (this.inFlight) return;
    const code = this.editor.value;
    this.inFlight = true;
    this.submitButton.disabled = true;
    try {
      this.counter += 1;
      const submissionId = `${this.sessionId}-${this.counter}`;
      const result = await this.api.execute(this.view.task_id, submissionId,
                                            { f1: code });
      const slot = this.root.querySelector(".feedback-slot") as HTMLElement;
      clear(slot);
      if (!result.ok || !result.body) {
        slot.append(el("p", { class: "outer-error" },
          `Grading request failed: ${result.error ?? "unknown error"}`));
        return;
      }
      let doc: GradeOutputDoc;
      try {
        doc = parseGradeOutput(result.body.output);
      } catch {
        slot.append(el("p", { class: "outer-error" },
          `Backend returned status ${result.body.status} with unreadable output`));
        return;
      }
      slot.append(renderFeedback(doc));
      this.history.push({ code, result: doc });
      this.renderHistory();
    } finally {
      this.inFlight = false;
      this.submitButton.disabled = false;
    }
  }

  private renderHistory(): void {
    const box = this.root.querySelector(".history") as HTMLElement;
    clear(box);
    box.append(el("h3", {}, "Attempts"));
    this.history.forEach((attempt, i) => {
      const score = attempt.result.feedback
        ? attempt.result.feedback.score.toFixed(2)
        : "error";
      box.append(
        el("div", { class: "attempt" },
          el("span", { class: "attempt-label" }, `#${i + 1} (score ${score}) `),
          el("code", { class: "attempt-code" }, attempt.code)),
      );
    });
  }
}
