// Full annotation flow against a scripted server stub: instructions, task,
// three-selector submission, next task, and the exhausted screen, plus the
// failure paths (network retry with no data loss, duplicate skip, in-flight
// submission guard).

import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationApi } from "../src/api.js";
import { mountApp } from "../src/main.js";

interface Recorded {
  url: string;
  method: string;
  body?: unknown;
}

type Reply =
  | { status: number; body?: unknown }
  | "network-down"
  | { hold: Promise<{ status: number; body?: unknown }> };

function scriptedServer(script: Reply[]) {
  const requests: Recorded[] = [];
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    requests.push({
      url: String(input),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const reply = script.shift();
    if (reply === undefined) throw new Error("stub script exhausted");
    if (reply === "network-down") throw new TypeError("fetch failed");
    const resolved = "hold" in reply ? await reply.hold : reply;
    return new Response(
      resolved.body === undefined ? null : JSON.stringify(resolved.body),
      { status: resolved.status, headers: { "Content-Type": "application/json" } },
    );
  }) as typeof fetch;
  return { fetchFn, requests };
}

function task(id: number, remaining: number) {
  return {
    output_id: `survey:extended:${id}`,
    display_kind: "extended",
    display_text: `Descriptor ${id}`,
    remaining_count: remaining,
  };
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.appendChild(root);
});

function mount(script: Reply[]) {
  const { fetchFn, requests } = scriptedServer(script);
  const app = mountApp(root, new AnnotationApi("", null, fetchFn));
  return { app, requests };
}

function click(selector: string) {
  const node = root.querySelector<HTMLButtonElement>(selector);
  if (!node) throw new Error(`no element matches ${selector}`);
  node.click();
}

function submitButton(): HTMLButtonElement {
  const node = root.querySelector<HTMLButtonElement>("#submit");
  if (!node) throw new Error("no submit button on screen");
  return node;
}

function chooseAll(quality: number, usefulness: number, efficiency: number) {
  click(`[data-metric="quality"] [data-value="${quality}"]`);
  click(`[data-metric="usefulness"] [data-value="${usefulness}"]`);
  click(`[data-metric="efficiency"] [data-value="${efficiency}"]`);
}

describe("annotation flow", () => {
  it("walks instructions -> task -> submission -> next task -> done", async () => {
    const { app, requests } = mount([
      { status: 200, body: task(0, 2) },
      { status: 201, body: { status: "accepted" } },
      { status: 200, body: task(1, 1) },
      { status: 201, body: { status: "accepted" } },
      { status: 204 },
    ]);

    // instructions screen first, no server traffic yet
    expect(root.querySelector(".instructions-pane")).toBeTruthy();
    expect(requests).toHaveLength(0);

    click("#start");
    await app.idle();
    expect(root.querySelector(".output-text")!.textContent).toBe("Descriptor 0");
    expect(root.querySelector(".progress")!.textContent).toContain("2 remaining");

    // the submit button only arms once all three scales have a value
    expect(submitButton().disabled).toBe(true);
    click('[data-metric="quality"] [data-value="4"]');
    click('[data-metric="usefulness"] [data-value="3"]');
    expect(submitButton().disabled).toBe(true);
    click('[data-metric="efficiency"] [data-value="2"]');
    expect(submitButton().disabled).toBe(false);

    click("#submit");
    await app.idle();
    // exactly one complete payload went out
    expect(requests[1]).toEqual({
      url: "/api/annotation",
      method: "POST",
      body: {
        output_id: "survey:extended:0",
        quality: 4,
        usefulness: 3,
        efficiency: 2,
      },
    });
    // next task rendered with cleared selectors
    expect(root.querySelector(".output-text")!.textContent).toBe("Descriptor 1");
    expect(root.querySelectorAll(".scale-value.selected")).toHaveLength(0);
    expect(submitButton().disabled).toBe(true);

    chooseAll(0, 0, 0);
    click("#submit");
    await app.idle();

    // server said 204: exhausted screen with the session tally
    expect(root.querySelector(".done-pane")).toBeTruthy();
    expect(root.textContent).toContain("You rated 2 outputs");
    expect(app.state()).toEqual({ screen: "done", rated: 2 });
  });

  it("keeps selections and offers retry when the submission never arrives", async () => {
    const { app } = mount([
      { status: 200, body: task(0, 1) },
      "network-down",
      { status: 201, body: { status: "accepted" } },
      { status: 204 },
    ]);
    click("#start");
    await app.idle();
    chooseAll(3, 3, 3);
    click("#submit");
    await app.idle();

    // still on the task, values intact, notice shown
    expect(root.querySelector(".notice")).toBeTruthy();
    expect(root.querySelectorAll(".scale-value.selected")).toHaveLength(3);
    expect(submitButton().disabled).toBe(false);

    click("#submit");
    await app.idle();
    expect(root.querySelector(".done-pane")).toBeTruthy();
  });

  it("shows the error screen with retry when the first fetch fails", async () => {
    const { app } = mount(["network-down", { status: 200, body: task(5, 9) }]);
    click("#start");
    await app.idle();
    expect(root.querySelector(".error-pane")).toBeTruthy();

    click("#retry");
    await app.idle();
    expect(root.querySelector(".output-text")!.textContent).toBe("Descriptor 5");
  });

  it("skips to the next task with a notice when the server says duplicate", async () => {
    const { app } = mount([
      { status: 200, body: task(0, 2) },
      { status: 409, body: { code: "duplicate", message: "already rated this output" } },
      { status: 200, body: task(1, 1) },
    ]);
    click("#start");
    await app.idle();
    chooseAll(1, 2, 3);
    click("#submit");
    await app.idle();

    expect(root.querySelector(".output-text")!.textContent).toBe("Descriptor 1");
    expect(root.querySelector(".notice")!.textContent).toContain(
      "already rated this output",
    );
  });

  it("lets at most one submission be in flight", async () => {
    let release!: (value: { status: number; body?: unknown }) => void;
    const hold = new Promise<{ status: number; body?: unknown }>((resolve) => {
      release = resolve;
    });
    const { app, requests } = mount([
      { status: 200, body: task(0, 1) },
      { hold },
      { status: 204 },
    ]);
    click("#start");
    await app.idle();
    chooseAll(2, 2, 2);

    click("#submit");
    // the response has not arrived; hammering the button must do nothing
    expect(submitButton().disabled).toBe(true);
    click("#submit");
    click("#submit");
    expect(requests.filter((r) => r.method === "POST")).toHaveLength(1);
    // ... and the scales are frozen while waiting
    click('[data-metric="quality"] [data-value="0"]');
    expect(
      root.querySelector('[data-metric="quality"] [data-value="2"]')!.classList
        .contains("selected"),
    ).toBe(true);

    release({ status: 201, body: { status: "accepted" } });
    await app.idle();
    expect(root.querySelector(".done-pane")).toBeTruthy();
    expect(requests.filter((r) => r.method === "POST")).toHaveLength(1);
  });
});
