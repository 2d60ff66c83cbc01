/**
 * Typed client for the annotation service API.
 *
 * The service keeps the comparison blind: a task carries an opaque id and
 * two texts, nothing else, and this client never requests anything more.
 */

export interface Task {
  task_id: string;
  left_text: string;
  right_text: string;
}

export interface Progress {
  global: { judged: number; total: number };
  annotator?: { judged: number; total: number };
}

export type Verdict = "left" | "right" | "tie";

/** The task was already judged (HTTP 409); advance the queue. */
export class ConflictError extends Error {
  constructor(taskId: string) {
    super(`task ${taskId} already judged`);
    this.name = "ConflictError";
  }
}

/** Bad or missing annotator token (HTTP 401/403). */
export class AuthError extends Error {
  constructor(status: number) {
    super(`not authorized (HTTP ${status})`);
    this.name = "AuthError";
  }
}

const TOKEN_HEADER = "X-Annotator-Token";

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
  ) {}

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = { [TOKEN_HEADER]: this.token };
    if (json) headers["Content-Type"] = "application/json";
    return headers;
  }

  /** Next pending task, or null when the queue is exhausted. */
  async nextTask(): Promise<Task | null> {
    const response = await fetch(`${this.baseUrl}/api/tasks/next`, {
      headers: this.headers(false),
    });
    if (response.status === 204) return null;
    if (response.status === 401 || response.status === 403) {
      throw new AuthError(response.status);
    }
    if (!response.ok) throw new Error(`tasks/next failed: HTTP ${response.status}`);
    return (await response.json()) as Task;
  }

  async submitJudgment(taskId: string, verdict: Verdict): Promise<void> {
    const response = await fetch(`${this.baseUrl}/api/judgments`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ task_id: taskId, verdict }),
    });
    if (response.status === 409) throw new ConflictError(taskId);
    if (response.status === 401 || response.status === 403) {
      throw new AuthError(response.status);
    }
    if (!response.ok) throw new Error(`judgments failed: HTTP ${response.status}`);
  }

  async progress(): Promise<Progress> {
    const response = await fetch(`${this.baseUrl}/api/progress`, {
      headers: this.headers(false),
    });
    if (!response.ok) throw new Error(`progress failed: HTTP ${response.status}`);
    return (await response.json()) as Progress;
  }

  async guidelines(): Promise<string> {
    const response = await fetch(`${this.baseUrl}/api/guidelines`);
    if (!response.ok) throw new Error(`guidelines failed: HTTP ${response.status}`);
    return await response.text();
  }
}
