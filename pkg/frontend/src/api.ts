/** Thin typed client for the grading API.  Bodies are shaped exactly as
 * the server documents them; non-2xx responses come back as data so the
 * pages can surface field-level errors. */

import {
  ExecuteEnvelope,
  ManifestDoc,
  PublicTaskView,
  TaskConfigDoc,
} from "./types.js";

export interface ApiResult<T> {
  ok: boolean;
  status: number;
  body: T | null;
  error: string | null;
  /** Path-addressed server-side validation error, when provided. */
  errorPath: string | null;
}

async function asResult<T>(response: Response): Promise<ApiResult<T>> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    body = null;
  }
  if (response.ok) {
    return { ok: true, status: response.status, body: body as T,
             error: null, errorPath: null };
  }
  const doc = (body ?? {}) as { error?: string; path?: string };
  return {
    ok: false,
    status: response.status,
    body: null,
    error: doc.error ?? `request failed with status ${response.status}`,
    errorPath: doc.path ?? null,
  };
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async listTasks(): Promise<ApiResult<ManifestDoc[]>> {
    return asResult(await fetch(this.url("/api/tasks")));
  }

  async getTask(taskId: string): Promise<ApiResult<PublicTaskView>> {
    return asResult(await fetch(this.url(`/api/tasks/${encodeURIComponent(taskId)}`)));
  }

  async createTask(
    config: TaskConfigDoc,
    language: string,
    requestedId?: string,
  ): Promise<ApiResult<ManifestDoc>> {
    const body: Record<string, unknown> = {
      type: "unit-testing",
      language,
      config,
    };
    if (requestedId) body.id = requestedId;
    const response = await fetch(this.url("/api/tasks"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return asResult(response);
  }

  /** Wrap the editor content as the inner submission document and post it. */
  async execute(
    taskId: string,
    submissionId: string,
    fields: Record<string, string>,
  ): Promise<ApiResult<ExecuteEnvelope>> {
    const inner = JSON.stringify({ tid: submissionId, fields });
    const response = await fetch(this.url("/api/execute"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ tid: taskId, input: inner }),
    });
    return asResult(response);
  }
}
