/** Hash-routed single page app: task list, authoring form, solve page. */

import { ApiClient } from "./api.js";
import { AuthoringPage } from "./authoring.js";
import { clear, el } from "./dom.js";
import { SolvePage } from "./solve.js";

async function renderList(root: HTMLElement, api: ApiClient): Promise<void> {
  const result = await api.listTasks();
  const box = el("div", { class: "task-list" },
    el("h2", {}, "Exercises"),
    el("p", {}, el("a", { href: "#/author" }, "Create a new exercise")));
  if (!result.ok || !result.body) {
    box.append(el("p", { class: "outer-error" }, result.error ?? "cannot load tasks"));
  } else if (result.body.length === 0) {
    box.append(el("p", {}, "No exercises yet."));
  } else {
    const list = el("ul");
    for (const manifest of result.body) {
      list.append(el("li", {},
        el("a", { href: `#/task/${encodeURIComponent(manifest.task_id)}` },
           manifest.task_id),
        ` (${manifest.language}, ${manifest.task_type})`));
    }
    box.append(list);
  }
  root.append(box);
}

async function renderSolve(root: HTMLElement, api: ApiClient, taskId: string): Promise<void> {
  const result = await api.getTask(taskId);
  if (!result.ok || !result.body) {
    root.append(el("p", { class: "outer-error" },
      result.error ?? `cannot load task ${taskId}`));
    return;
  }
  new SolvePage(api, result.body).mount(root);
}

export async function route(root: HTMLElement, api: ApiClient): Promise<void> {
  clear(root);
  root.append(el("p", { class: "nav" }, el("a", { href: "#/" }, "all exercises")));
  const hash = window.location.hash;
  if (hash === "#/author") {
    new AuthoringPage(api, (manifest) => {
      window.location.hash = `#/task/${encodeURIComponent(manifest.task_id)}`;
    }).mount(root);
  } else if (hash.startsWith("#/task/")) {
    await renderSolve(root, api, decodeURIComponent(hash.slice("#/task/".length)));
  } else {
    await renderList(root, api);
  }
}

export function startApp(root: HTMLElement, baseUrl = ""): void {
  const api = new ApiClient(baseUrl);
  const rerender = () => void route(root, api);
  window.addEventListener("hashchange", rerender);
  rerender();
}

const appRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (appRoot) {
  startApp(appRoot, (window as { GRADER_API_BASE?: string }).GRADER_API_BASE ?? "");
}
