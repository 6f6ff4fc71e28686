// DOM rendering. The whole app re-renders from state on every change; at
// this size that is simpler and safer than incremental updates.

import type { AppState, Metric } from "./state.js";
import { CAPTIONS, METRICS, SCALE_MAX, readyToSubmit } from "./state.js";

export interface Handlers {
  onStart(): void;
  onChoose(metric: Metric, value: number): void;
  onSubmit(): void;
  onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

const KIND_LABELS: Record<string, string> = {
  token_list: "Topic keywords",
  extended: "Topic descriptor",
};

function renderInstructions(handlers: Handlers): HTMLElement {
  const pane = el("section", "pane instructions-pane");
  pane.appendChild(el("h1", "", "Rating topic summaries"));
  const steps = el("ol", "instructions");
  for (const text of [
    "You will be shown a series of automatically generated topic summaries, " +
      "one at a time. Some are lists of keywords, others are short phrases.",
    "Rate each one on three scales from 0 to 4: quality, usefulness, and " +
      "how efficiently you could work with it.",
    "All three ratings are needed before you can submit. There are no " +
      "right answers — judge each summary on its own.",
  ]) {
    steps.appendChild(el("li", "", text));
  }
  pane.appendChild(steps);
  const start = el("button", "primary", "Start");
  start.id = "start";
  start.addEventListener("click", () => handlers.onStart());
  pane.appendChild(start);
  return pane;
}

function renderScale(
  metric: Metric,
  selected: number | null,
  disabled: boolean,
  handlers: Handlers,
): HTMLElement {
  const group = el("fieldset", "scale");
  group.dataset.metric = metric;
  group.appendChild(el("legend", "", metric));

  const buttons = el("div", "scale-buttons");
  for (let value = 0; value <= SCALE_MAX; value++) {
    const button = el("button", "scale-value", String(value));
    button.type = "button";
    button.dataset.value = String(value);
    button.disabled = disabled;
    if (selected === value) button.classList.add("selected");
    button.setAttribute("aria-pressed", selected === value ? "true" : "false");
    button.addEventListener("click", () => handlers.onChoose(metric, value));
    buttons.appendChild(button);
  }
  group.appendChild(buttons);

  const captions = el("div", "scale-captions");
  captions.appendChild(el("span", "caption-low", CAPTIONS[metric].low));
  captions.appendChild(el("span", "caption-high", CAPTIONS[metric].high));
  group.appendChild(captions);
  return group;
}

function renderTask(
  state: Extract<AppState, { screen: "task" }>,
  handlers: Handlers,
): HTMLElement {
  const pane = el("section", "pane task-pane");

  const progress = el("p", "progress");
  progress.textContent =
    `${state.rated} rated · ${state.task.remaining_count} remaining`;
  pane.appendChild(progress);

  const output = el("div", "output");
  output.appendChild(
    el("p", "output-kind", KIND_LABELS[state.task.display_kind] ?? "Output"),
  );
  output.appendChild(el("p", "output-text", state.task.display_text));
  pane.appendChild(output);

  if (state.notice) {
    const notice = el("p", "notice", state.notice);
    notice.setAttribute("role", "alert");
    pane.appendChild(notice);
  }

  for (const metric of METRICS) {
    pane.appendChild(
      renderScale(metric, state.selection[metric], state.submitting, handlers),
    );
  }

  const submit = el(
    "button",
    "primary",
    state.submitting ? "Submitting…" : "Submit ratings",
  );
  submit.id = "submit";
  submit.disabled = !readyToSubmit(state);
  submit.addEventListener("click", () => handlers.onSubmit());
  pane.appendChild(submit);
  return pane;
}

function renderDone(rated: number): HTMLElement {
  const pane = el("section", "pane done-pane");
  pane.appendChild(el("h1", "", "All done"));
  pane.appendChild(
    el(
      "p",
      "",
      rated === 1
        ? "You rated 1 output. There is nothing left for you to rate — thank you."
        : `You rated ${rated} outputs. There is nothing left for you to rate — thank you.`,
    ),
  );
  return pane;
}

function renderError(message: string, handlers: Handlers): HTMLElement {
  const pane = el("section", "pane error-pane");
  pane.appendChild(el("h1", "", "Something went wrong"));
  const detail = el("p", "notice", message);
  detail.setAttribute("role", "alert");
  pane.appendChild(detail);
  const retry = el("button", "primary", "Retry");
  retry.id = "retry";
  retry.addEventListener("click", () => handlers.onRetry());
  pane.appendChild(retry);
  return pane;
}

export function render(root: HTMLElement, state: AppState, handlers: Handlers): void {
  root.textContent = "";
  switch (state.screen) {
    case "instructions":
      root.appendChild(renderInstructions(handlers));
      break;
    case "loading": {
      const pane = el("section", "pane loading-pane");
      pane.appendChild(el("p", "", "Loading…"));
      root.appendChild(pane);
      break;
    }
    case "task":
      root.appendChild(renderTask(state, handlers));
      break;
    case "done":
      root.appendChild(renderDone(state.rated));
      break;
    case "error":
      root.appendChild(renderError(state.message, handlers));
      break;
  }
}
