// End-to-end: boot the real service, mount the real UI in a DOM, click
// through sessions, and check that what the UI showed is exactly what the
// server recorded.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, type ChildProcess } from "node:child_process";
import { existsSync } from "node:fs";
import { createServer } from "node:net";
import type { AddressInfo } from "node:net";
import { resolve } from "node:path";
import { ApiError, Client } from "../src/api.js";
import { createApp, type App } from "../src/app.js";

// vitest runs with the frontend directory as its cwd
const REPO_ROOT = resolve("..");
const DIST_DIR = resolve("dist");

let server: ChildProcess;
let baseUrl: string;
let client: Client;

async function freePort(): Promise<number> {
  return await new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as AddressInfo).port;
      probe.close(() => resolve(port));
    });
  });
}

async function startServe(args: string[]): Promise<{ proc: ChildProcess; url: string }> {
  const port = await freePort();
  const proc = spawn(
    "python3",
    ["-m", "querycore.cli", "serve", "--port", String(port), ...args],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  const url = `http://127.0.0.1:${port}`;
  const probe = new Client(url);
  const deadline = Date.now() + 30000;
  for (;;) {
    try {
      await probe.healthz();
      return { proc, url };
    } catch {
      if (Date.now() > deadline) {
        proc.kill();
        throw new Error("service never came up");
      }
      await new Promise((r) => setTimeout(r, 150));
    }
  }
}

beforeAll(async () => {
  const started = await startServe(["--no-ui"]);
  server = started.proc;
  baseUrl = started.url;
  client = new Client(baseUrl);
});

afterAll(() => {
  server?.kill();
});

function mountApp(apiBase: string): { root: HTMLElement; app: App } {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = createApp(root, new Client(apiBase));
  return { root, app };
}

async function until(cond: () => boolean, what: string, ms = 10000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!cond()) {
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((r) => setTimeout(r, 10));
  }
}

function controlButtons(root: HTMLElement): HTMLButtonElement[] {
  return Array.from(root.querySelectorAll<HTMLButtonElement>("#controls button"));
}

function clickAnswer(root: HTMLElement, label: string): void {
  const btn = controlButtons(root).find((b) => b.textContent === label);
  if (!btn) {
    throw new Error(`no answer button labeled ${label}`);
  }
  btn.click();
}

function agentBubbles(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll(".bubble.agent")).map((n) => n.textContent ?? "");
}

async function startSession(
  root: HTMLElement,
  app: App,
  catalog: string,
  opts: { policy?: string; mode?: string; kMax?: string } = {},
): Promise<void> {
  await app.refreshCatalogs();
  (root.querySelector("#catalog") as HTMLSelectElement).value = catalog;
  (root.querySelector("#policy") as HTMLSelectElement).value = opts.policy ?? "core";
  (root.querySelector("#mode") as HTMLSelectElement).value = opts.mode ?? "catalog";
  (root.querySelector("#kmax") as HTMLInputElement).value = opts.kMax ?? "5";
  (root.querySelector("#start") as HTMLButtonElement).click();
  await until(() => app.state().phase === "chat", "session start");
}

describe("round trip on the demo catalog", () => {
  it("walks start, answers and recommendation, and mirrors the server transcript", async () => {
    const { root, app } = mountApp(baseUrl);
    await startSession(root, app, "s2", { mode: "value" });

    expect(agentBubbles(root)).toEqual(["Do you want color = r?"]);
    expect(controlButtons(root).map((b) => b.textContent)).toEqual(["Yes", "No", "Not care"]);
    const before = app.state().view!.remaining;
    expect(before).toBe(4);

    clickAnswer(root, "Yes");
    await until(() => app.state().view!.observed.length === 1, "first answer");
    // a yes to a value query strictly shrinks the candidate count
    expect(app.state().view!.remaining).toBeLessThan(before);
    expect(agentBubbles(root).at(-1)).toBe("Do you want v1?");
    expect(controlButtons(root).map((b) => b.textContent)).toEqual(["Yes", "No"]);

    clickAnswer(root, "Yes");
    await until(() => app.state().view!.status === "success", "success");

    const view = app.state().view!;
    expect(root.querySelector("#outcome")?.textContent).toBe("Recommended: v1 (turn 2)");
    expect(controlButtons(root)).toHaveLength(0);
    expect(view.remaining).toBe(0);

    // the transcript the UI assembled from its own screen must equal the
    // transcript the server kept
    const serverSide = await client.getSession(view.sessionId);
    expect(serverSide.status).toBe("success");
    expect(view.observed).toEqual(serverSide.events);
    expect(view.outcome).toEqual(serverSide.outcome);
  });

  it("sends nothing once the session is over", async () => {
    const { root, app } = mountApp(baseUrl);
    await startSession(root, app, "s2", { mode: "value" });
    clickAnswer(root, "Yes");
    await until(() => app.state().view!.observed.length === 1, "first answer");
    clickAnswer(root, "Yes");
    await until(() => app.state().view!.status === "success", "success");

    const turnsBefore = app.state().view!.turn;
    const realFetch = globalThis.fetch;
    let calls = 0;
    globalThis.fetch = ((...args: Parameters<typeof fetch>) => {
      calls += 1;
      return realFetch(...args);
    }) as typeof fetch;
    try {
      await app.submit({ kind: "no" });
    } finally {
      globalThis.fetch = realFetch;
    }
    expect(calls).toBe(0);
    const serverSide = await client.getSession(app.state().view!.sessionId);
    expect(serverSide.turn).toBe(turnsBefore);
  });
});

describe("not care handling", () => {
  it("drops an attribute for the rest of the session without shrinking the count", async () => {
    const { root, app } = mountApp(baseUrl);
    await startSession(root, app, "hotels");

    const notCared = new Set<string>();
    while (app.state().view!.status === "active") {
      const view = app.state().view!;
      const q = view.pending!;
      if (q.attr) {
        expect(notCared.has(q.attr)).toBe(false);
      }
      const labels = controlButtons(root).map((b) => b.textContent);
      const turns = view.observed.length;
      expect(turns).toBeLessThan(8);
      if (q.kind === "item") {
        expect(labels).toEqual(["Yes", "No"]);
        clickAnswer(root, "No");
      } else {
        if (q.kind === "attribute") {
          const declared = app
            .state()
            .detail!.attributes.find((a) => a.name === q.attr)!
            .values!.map(String);
          expect(labels).toEqual([...declared, "Not care"]);
        } else {
          expect(labels).toEqual(["Yes", "No", "Not care"]);
        }
        notCared.add(q.attr!);
        const before = view.remaining;
        clickAnswer(root, "Not care");
        await until(() => app.state().view!.observed.length === turns + 1, "not care answer");
        // not care never removes candidates
        expect(app.state().view!.remaining).toBe(before);
        continue;
      }
      await until(() => app.state().view!.observed.length === turns + 1, "item answer");
    }

    const view = app.state().view!;
    expect(notCared.size).toBeGreaterThan(0);
    expect(view.status).toBe("exhausted");
    expect(view.outcome!.recommendation).toBeTruthy();
    expect(root.querySelector("#outcome")?.textContent).toContain(view.outcome!.recommendation!);
    expect(controlButtons(root)).toHaveLength(0);

    const serverSide = await client.getSession(view.sessionId);
    expect(view.observed).toEqual(serverSide.events);
    expect(view.outcome).toEqual(serverSide.outcome);
  });
});

describe("guard rails", () => {
  it("shows an error banner with a retry button when the service is down", async () => {
    const { root, app } = mountApp("http://127.0.0.1:1");
    await app.refreshCatalogs();
    expect(app.state().banner).toContain("Cannot reach the service");
    expect(root.querySelector(".banner.error")).not.toBeNull();
    expect(root.querySelector("#retry")).not.toBeNull();
  });

  it("rejects a zero turn budget before any request goes out", async () => {
    const { root, app } = mountApp(baseUrl);
    await app.refreshCatalogs();
    (root.querySelector("#catalog") as HTMLSelectElement).value = "s2";
    (root.querySelector("#kmax") as HTMLInputElement).value = "0";

    const realFetch = globalThis.fetch;
    let calls = 0;
    globalThis.fetch = ((...args: Parameters<typeof fetch>) => {
      calls += 1;
      return realFetch(...args);
    }) as typeof fetch;
    try {
      (root.querySelector("#start") as HTMLButtonElement).click();
      await until(() => app.state().setupError !== null, "client-side rejection");
    } finally {
      globalThis.fetch = realFetch;
    }
    expect(calls).toBe(0);
    expect(app.state().phase).toBe("setup");
    expect(root.querySelector("#setup-error")?.textContent).toContain("positive");
  });

  it("maps service errors onto ApiError", async () => {
    const err = await client.getCatalog("ghost").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).code).toBe("not_found");
  });
});

describe.skipIf(!existsSync(DIST_DIR))("static bundle", () => {
  it("is served by the python service", async () => {
    const ui = await startServe(["--ui-dir", DIST_DIR]);
    try {
      const page = await fetch(ui.url + "/");
      expect(page.status).toBe(200);
      expect(await page.text()).toContain('<div id="app">');
      const js = await fetch(ui.url + "/main.js");
      expect(js.status).toBe(200);
      expect(await js.text()).toContain("DOMContentLoaded");
    } finally {
      ui.proc.kill();
    }
  });
});
