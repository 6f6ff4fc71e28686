// Pure state machine for the annotation session. Every transition returns a
// new state object; nothing here touches the DOM or the network, which is
// what keeps the flow testable against a scripted server.

import type { Ratings, Task } from "./api.js";

export const METRICS = ["quality", "usefulness", "efficiency"] as const;
export type Metric = (typeof METRICS)[number];

export const SCALE_MAX = 4;

// Endpoint captions shown under the 0 and 4 buttons of each scale.
export const CAPTIONS: Record<Metric, { low: string; high: string }> = {
  quality: { low: "poor quality", high: "excellent quality" },
  usefulness: { low: "no usefulness", high: "very useful" },
  efficiency: { low: "not an efficient task", high: "very efficient task" },
};

export interface Selection {
  quality: number | null;
  usefulness: number | null;
  efficiency: number | null;
}

export type AppState =
  | { screen: "instructions" }
  | { screen: "loading"; rated: number }
  | {
      screen: "task";
      task: Task;
      selection: Selection;
      submitting: boolean;
      notice: string | null;
      rated: number;
    }
  | { screen: "done"; rated: number }
  | { screen: "error"; message: string; rated: number };

export function initialState(): AppState {
  return { screen: "instructions" };
}

export function loading(rated: number): AppState {
  return { screen: "loading", rated };
}

export function taskLoaded(rated: number, task: Task, notice: string | null = null): AppState {
  return {
    screen: "task",
    task,
    selection: { quality: null, usefulness: null, efficiency: null },
    submitting: false,
    notice,
    rated,
  };
}

export function exhausted(rated: number): AppState {
  return { screen: "done", rated };
}

export function loadFailed(rated: number, message: string): AppState {
  return { screen: "error", message, rated };
}

/** Record one selector value. Ignored off the task screen, while a
 *  submission is in flight, or for values outside the 0..4 scale. */
export function choose(state: AppState, metric: Metric, value: number): AppState {
  if (state.screen !== "task" || state.submitting) return state;
  if (!Number.isInteger(value) || value < 0 || value > SCALE_MAX) return state;
  return {
    ...state,
    selection: { ...state.selection, [metric]: value },
    notice: state.notice,
  };
}

export function readyToSubmit(state: AppState): boolean {
  return (
    state.screen === "task" &&
    !state.submitting &&
    METRICS.every((m) => state.selection[m] !== null)
  );
}

/** Enter the in-flight phase. A no-op unless every selector has a value and
 *  nothing is already in flight — the single-submission guard. */
export function submitStarted(state: AppState): AppState {
  if (!readyToSubmit(state) || state.screen !== "task") return state;
  return { ...state, submitting: true, notice: null };
}

/** The submission never reached the server; keep everything the annotator
 *  chose so a retry is one click. */
export function submitFailed(state: AppState, message: string): AppState {
  if (state.screen !== "task") return state;
  return { ...state, submitting: false, notice: message };
}

/** Extract a complete payload, or null when one cannot be built. The only
 *  path to a POST body runs through here, so an incomplete or out-of-range
 *  payload is unrepresentable. */
export function completedRatings(state: AppState): Ratings | null {
  if (state.screen !== "task") return null;
  const { quality, usefulness, efficiency } = state.selection;
  if (quality === null || usefulness === null || efficiency === null) {
    return null;
  }
  return { quality, usefulness, efficiency };
}
