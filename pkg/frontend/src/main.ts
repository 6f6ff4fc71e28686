// Controller: owns the current state, talks to the server through
// AnnotationApi, and re-renders after every transition.

import { AnnotationApi, ApiError } from "./api.js";
import type { AppState, Metric } from "./state.js";
import {
  choose,
  completedRatings,
  exhausted,
  initialState,
  loadFailed,
  loading,
  readyToSubmit,
  submitFailed,
  submitStarted,
  taskLoaded,
} from "./state.js";
import type { Handlers } from "./view.js";
import { render } from "./view.js";

function messageFor(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return "Could not reach the server. Check your connection and try again.";
}

export interface App {
  state(): AppState;
  /** Resolves once any in-flight load/submit settles; for tests. */
  idle(): Promise<void>;
}

export function mountApp(root: HTMLElement, api: AnnotationApi): App {
  let current = initialState();
  let rated = 0;
  let pending: Promise<void> = Promise.resolve();

  function update(next: AppState): void {
    current = next;
    render(root, current, handlers);
  }

  async function loadNext(notice: string | null = null): Promise<void> {
    update(loading(rated));
    try {
      const result = await api.fetchTask();
      if (result.kind === "exhausted") {
        update(exhausted(rated));
      } else {
        update(taskLoaded(rated, result.task, notice));
      }
    } catch (err) {
      update(loadFailed(rated, messageFor(err)));
    }
  }

  async function submit(): Promise<void> {
    const before = current;
    if (before.screen !== "task") return;
    const ratings = completedRatings(before);
    const started = submitStarted(before);
    if (ratings === null || started === before) return; // incomplete or in flight
    update(started);
    try {
      await api.submit(before.task.output_id, ratings);
      rated += 1;
      await loadNext();
    } catch (err) {
      if (
        err instanceof ApiError &&
        ["duplicate", "exhausted", "unknown_output"].includes(err.code)
      ) {
        // this output cannot take the rating any more; move on, but say why
        await loadNext(`Skipped one output: ${err.message}`);
      } else {
        update(submitFailed(current, messageFor(err)));
      }
    }
  }

  const handlers: Handlers = {
    onStart: () => {
      pending = loadNext();
    },
    onChoose: (metric: Metric, value: number) => {
      update(choose(current, metric, value));
    },
    onSubmit: () => {
      if (!readyToSubmit(current)) return;
      pending = submit();
    },
    onRetry: () => {
      pending = loadNext();
    },
  };

  render(root, current, handlers);
  return {
    state: () => current,
    idle: () => pending,
  };
}

// In the browser the page provides #app; under test the module is imported
// and mounted explicitly, so this does nothing there.
const rootElement = document.getElementById("app");
if (rootElement) {
  const annotator = new URLSearchParams(window.location.search).get("annotator");
  mountApp(rootElement, new AnnotationApi("", annotator));
}
