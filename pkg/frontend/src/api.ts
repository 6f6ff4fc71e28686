// Typed client for the annotation service. This module is the only place
// that knows about URLs and status codes; everything above it works with
// Task objects and thrown ApiErrors.

export interface Task {
  output_id: string;
  display_kind: "token_list" | "extended";
  display_text: string;
  remaining_count: number;
}

export interface Ratings {
  quality: number;
  usefulness: number;
  efficiency: number;
}

export type TaskResult = { kind: "task"; task: Task } | { kind: "exhausted" };

/** A structured error the server produced (as opposed to a network failure). */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let code = "error";
  let message = `request failed (${response.status})`;
  try {
    const body = await response.json();
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(code, message, response.status);
}

export class AnnotationApi {
  /**
   * @param annotator forwarded as ?annotator= when present; by default the
   *   client sends no identity at all and the server derives one.
   */
  constructor(
    private readonly baseUrl = "",
    private readonly annotator: string | null = null,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private url(path: string): string {
    const full = this.baseUrl + path;
    if (!this.annotator) return full;
    const sep = full.includes("?") ? "&" : "?";
    return `${full}${sep}annotator=${encodeURIComponent(this.annotator)}`;
  }

  async fetchTask(): Promise<TaskResult> {
    const response = await this.fetchFn(this.url("/api/task"));
    if (response.status === 204) return { kind: "exhausted" };
    if (!response.ok) throw await toApiError(response);
    const task = (await response.json()) as Task;
    return { kind: "task", task };
  }

  async submit(outputId: string, ratings: Ratings): Promise<void> {
    const response = await this.fetchFn(this.url("/api/annotation"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ output_id: outputId, ...ratings }),
    });
    if (!response.ok) throw await toApiError(response);
  }
}
