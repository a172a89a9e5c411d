/** Task authoring: a form that mirrors the configuration schema, checks
 * drafts client-side, emits the JSON configuration document and posts it.
 * Server-side errors are surfaced inline at the offending field. */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import {
  AuthoringDraft,
  DraftError,
  buildConfig,
  emptyDraft,
  validateDraft,
} from "./draft.js";
import { ManifestDoc, SEM_TYPES, SemType } from "./types.js";

/** Map a server-side config path (e.g. "test.predefined[0].data") onto
 * the corresponding form field path. */
export function translateServerPath(path: string): string {
  if (path === "" || path === "solution" || path.startsWith("solution.")) {
    return path === "" ? "" : "solution";
  }
  if (path === "spec.name") return "name";
  const argMatch = /^spec\.args\[(\d+)\]/.exec(path);
  if (argMatch) return `args[${argMatch[1]}].name`;
  if (path.startsWith("test.predefined")) {
    const predefinedMatch = /^test\.(predefined\[\d+\])/.exec(path);
    if (predefinedMatch) {
      return path.includes(".feedback")
        ? `${predefinedMatch[1]}.feedback[0].key`
        : `${predefinedMatch[1]}.data`;
    }
  }
  if (path.startsWith("test.random")) {
    return path.replace(/^test\./, "");
  }
  if (path === "test") return "test";
  return "";
}

export class AuthoringPage {
  draft: AuthoringDraft = emptyDraft();
  private root: HTMLElement = el("div");

  constructor(
    private readonly api: ApiClient,
    private readonly onCreated: (manifest: ManifestDoc) => void,
  ) {}

  mount(parent: HTMLElement): HTMLElement {
    this.root = el("div", { class: "authoring" });
    parent.append(this.root);
    this.rebuild();
    return this.root;
  }

  /** Full re-render from the draft (structural changes only). */
  rebuild(): void {
    clear(this.root);
    const form = el("form", { class: "authoring-form" });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });

    form.append(el("h2", {}, "New exercise"));
    form.append(el("ul", { class: "form-errors" }));

    form.append(
      this.field("task id (optional)", "requestedId",
        this.textInput(this.draft.requestedId, (v) => (this.draft.requestedId = v))),
      this.field("function name", "name",
        this.textInput(this.draft.name, (v) => (this.draft.name = v))),
    );

    const argsBox = el("fieldset", { class: "args" },
      el("legend", {}, "arguments"));
    this.draft.args.forEach((arg, i) => {
      const row = el("div", { class: "arg-row" });
      row.append(
        this.field(`argument ${i} name`, `args[${i}].name`,
          this.textInput(arg.name, (v) => (this.draft.args[i].name = v))),
        this.field(`argument ${i} type`, `args[${i}].type`,
          this.typeSelect(arg.type, (v) => {
            this.draft.args[i].type = v;
          })),
        this.button(`remove argument ${i}`, "remove-arg", () => {
          this.draft.args.splice(i, 1);
          this.syncRandomArgs();
          this.rebuild();
        }),
      );
      argsBox.append(row);
    });
    argsBox.append(this.button("add argument", "add-arg", () => {
      this.draft.args.push({ name: "", type: "int" });
      this.syncRandomArgs();
      this.rebuild();
    }));
    form.append(argsBox);

    form.append(
      this.field("return type", "returnType",
        this.typeSelect(this.draft.returnType, (v) => (this.draft.returnType = v))),
    );

    const testsBox = el("fieldset", { class: "predefined" },
      el("legend", {}, "predefined tests"));
    this.draft.predefined.forEach((row, i) => {
      const rowBox = el("div", { class: "predefined-row" });
      rowBox.append(
        this.field(`test ${i} data`, `predefined[${i}].data`,
          this.textInput(row.data, (v) => (this.draft.predefined[i].data = v))),
      );
      row.feedback.forEach((fb, j) => {
        rowBox.append(
          this.field(`test ${i} hint ${j} answer key`, `predefined[${i}].feedback[${j}].key`,
            this.textInput(fb.key, (v) => (this.draft.predefined[i].feedback[j].key = v))),
          this.field(`test ${i} hint ${j} message`, `predefined[${i}].feedback[${j}].message`,
            this.textInput(fb.message, (v) => (this.draft.predefined[i].feedback[j].message = v))),
        );
      });
      rowBox.append(
        this.button(`add hint to test ${i}`, "add-feedback", () => {
          this.draft.predefined[i].feedback.push({ key: "", message: "" });
          this.rebuild();
        }),
        this.button(`remove test ${i}`, "remove-test", () => {
          this.draft.predefined.splice(i, 1);
          this.rebuild();
        }),
      );
      testsBox.append(rowBox);
    });
    testsBox.append(this.button("add predefined test", "add-test", () => {
      this.draft.predefined.push({ data: "", feedback: [] });
      this.rebuild();
    }));
    form.append(testsBox);

    const randomBox = el("fieldset", { class: "random" },
      el("legend", {}, "random tests"));
    randomBox.append(
      this.field("count", "random.n",
        this.numberInput(this.draft.randomCount, (v) => {
          this.draft.randomCount = v;
          this.syncRandomArgs();
          this.rebuild();
        })),
    );
    if (this.draft.randomCount > 0) {
      this.draft.randomArgs.forEach((text, i) => {
        const argName = this.draft.args[i]?.name || `argument ${i}`;
        randomBox.append(
          this.field(`generator for ${argName}`, `random.args[${i}]`,
            this.textInput(text, (v) => (this.draft.randomArgs[i] = v))),
        );
      });
    }
    form.append(randomBox);

    form.append(
      this.field("solution body", "solution",
        this.textArea(this.draft.solution, (v) => (this.draft.solution = v))),
    );

    form.append(el("button", { type: "submit", class: "create" }, "Create task"));
    this.root.append(form);
  }

  async submit(): Promise<void> {
    const errors = validateDraft(this.draft);
    this.renderErrors(errors);
    if (errors.length > 0) return;

    const result = await this.api.createTask(
      buildConfig(this.draft),
      "python",
      this.draft.requestedId || undefined,
    );
    if (result.ok && result.body) {
      this.onCreated(result.body);
      return;
    }
    const message = result.error ?? "creation failed";
    if (result.status === 409) {
      this.renderErrors([{ path: "requestedId", message }]);
    } else if (result.status === 422) {
      this.renderErrors([{ path: "solution", message }]);
    } else if (result.errorPath !== null) {
      this.renderErrors([{ path: translateServerPath(result.errorPath), message }]);
    } else {
      this.renderErrors([{ path: "", message }]);
    }
  }

  renderErrors(errors: DraftError[]): void {
    for (const span of Array.from(this.root.querySelectorAll(".field-error"))) {
      span.textContent = "";
    }
    const formLevel = this.root.querySelector(".form-errors");
    if (formLevel) clear(formLevel as HTMLElement);
    for (const error of errors) {
      const slot = this.root.querySelector(
        `[data-path="${error.path}"] .field-error`,
      );
      if (slot) {
        slot.textContent = error.message;
      } else if (formLevel) {
        formLevel.append(el("li", { class: "field-error" },
          error.path ? `${error.path}: ${error.message}` : error.message));
      }
    }
  }

  private field(labelText: string, path: string, input: HTMLElement): HTMLElement {
    return el("div", { class: "field", "data-path": path },
      el("label", {}, labelText),
      input,
      el("span", { class: "field-error" }),
    );
  }

  private textInput(value: string, write: (v: string) => void): HTMLInputElement {
    const input = el("input", { type: "text" });
    input.value = value;
    input.addEventListener("input", () => write(input.value));
    return input;
  }

  private numberInput(value: number, write: (v: number) => void): HTMLInputElement {
    const input = el("input", { type: "number", min: "0" });
    input.value = String(value);
    input.addEventListener("change", () => write(Number(input.value)));
    return input;
  }

  private textArea(value: string, write: (v: string) => void): HTMLTextAreaElement {
    const area = el("textarea", { rows: "6" });
    area.value = value;
    area.addEventListener("input", () => write(area.value));
    return area;
  }

  private typeSelect(value: SemType, write: (v: SemType) => void): HTMLSelectElement {
    const select = el("select");
    for (const semType of SEM_TYPES) {
      select.append(el("option", { value: semType }, semType));
    }
    select.value = value;
    select.addEventListener("change", () => write(select.value as SemType));
    return select;
  }

  private button(text: string, cls: string, onClick: () => void): HTMLButtonElement {
    const node = el("button", { type: "button", class: cls }, text);
    node.addEventListener("click", onClick);
    return node;
  }

  private syncRandomArgs(): void {
    const target = this.draft.args.length;
    while (this.draft.randomArgs.length < target) this.draft.randomArgs.push("");
    this.draft.randomArgs.length = target;
  }
}
