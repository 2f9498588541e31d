// DOM rendering. The whole app redraws from AppState on every change; at
// chat scale (a dozen bubbles) that is simpler and safer than patching.

import type { AnswerBody, AnswerKind, StartRequest } from "./api.js";
import {
  answerKindsFor,
  describeQuery,
  gaugePercent,
  terminalText,
  type AppState,
} from "./state.js";

export interface Handlers {
  onStart: (req: StartRequest) => void;
  onAnswer: (a: AnswerBody) => void;
  onRetry: () => void;
}

const POLICIES = ["core", "core-d", "me", "ag"];
const MODES = ["catalog", "attr", "value"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function answerButton(label: string, answer: AnswerBody, handlers: Handlers): HTMLButtonElement {
  const btn = el("button", "answer", label);
  btn.dataset.kind = answer.kind;
  if (answer.kind === "value") {
    btn.dataset.value = String(answer.value);
  }
  btn.addEventListener("click", () => handlers.onAnswer(answer));
  return btn;
}

const LABELS: Record<AnswerKind, string> = {
  yes: "Yes",
  no: "No",
  not_care: "Not care",
  value: "",
};

function renderSetup(root: HTMLElement, app: AppState, handlers: Handlers): void {
  const box = el("div", "setup");
  box.appendChild(el("h1", undefined, "querycore chat"));

  if (app.banner) {
    const banner = el("div", "banner error", app.banner + " ");
    const retry = el("button", "retry", "Retry");
    retry.id = "retry";
    retry.addEventListener("click", () => handlers.onRetry());
    banner.appendChild(retry);
    box.appendChild(banner);
  }

  const form = el("div", "setup-form");

  const catalogSel = el("select");
  catalogSel.id = "catalog";
  for (const row of app.catalogs) {
    const opt = el("option", undefined, `${row.catalog_id} (${row.n_items} items)`);
    opt.value = row.catalog_id;
    catalogSel.appendChild(opt);
  }

  const policySel = el("select");
  policySel.id = "policy";
  for (const p of POLICIES) {
    const opt = el("option", undefined, p);
    opt.value = p;
    policySel.appendChild(opt);
  }

  const modeSel = el("select");
  modeSel.id = "mode";
  for (const m of MODES) {
    const opt = el("option", undefined, m);
    opt.value = m;
    modeSel.appendChild(opt);
  }

  const kmax = el("input");
  kmax.id = "kmax";
  kmax.type = "number";
  kmax.min = "1";
  kmax.value = "5";

  const field = (label: string, control: HTMLElement) => {
    const wrap = el("label", "field", label + " ");
    wrap.appendChild(control);
    form.appendChild(wrap);
  };
  field("Catalog", catalogSel);
  field("Policy", policySel);
  field("Mode", modeSel);
  field("Turn budget", kmax);

  if (app.setupError) {
    const msg = el("div", "field-error", app.setupError);
    msg.id = "setup-error";
    form.appendChild(msg);
  }

  const start = el("button", "start", app.busy ? "Starting..." : "Start session");
  start.id = "start";
  start.disabled = app.busy || app.catalogs.length === 0;
  start.addEventListener("click", () => {
    handlers.onStart({
      catalog_id: catalogSel.value,
      policy: policySel.value,
      mode: modeSel.value,
      k_max: Number(kmax.value),
    });
  });
  form.appendChild(start);
  box.appendChild(form);
  root.appendChild(box);
}

function renderChat(root: HTMLElement, app: AppState, handlers: Handlers): void {
  const view = app.view;
  if (!view) {
    return;
  }
  const box = el("div", "chat");

  const pct = gaugePercent(view);
  const bar = el("div", "status-bar");
  const remaining = el("span", "remaining", `${view.remaining} candidates`);
  remaining.id = "remaining";
  bar.appendChild(remaining);
  const gauge = el("div", "gauge");
  const fill = el("div", "gauge-fill");
  fill.id = "gauge-fill";
  fill.style.width = `${pct}%`;
  gauge.appendChild(fill);
  bar.appendChild(gauge);
  const label = el("span", "gauge-label", `${pct.toFixed(0)}% uncertainty left`);
  label.id = "gauge-label";
  bar.appendChild(label);
  bar.appendChild(el("span", "turns", `turn ${view.turn} / ${view.kMax}`));
  box.appendChild(bar);

  const log = el("div", "messages");
  log.id = "messages";
  for (const msg of view.messages) {
    log.appendChild(el("p", `bubble ${msg.role}`, msg.text));
  }
  box.appendChild(log);

  if (view.outcome) {
    const ok = view.outcome.status === "success";
    const banner = el("div", `banner ${ok ? "success" : "fail"}`, terminalText(view.outcome));
    banner.id = "outcome";
    box.appendChild(banner);
  }

  if (app.banner) {
    box.appendChild(el("div", "banner error", app.banner));
  }

  // answer affordances: exactly the admissible kinds for the pending query,
  // nothing at all once the session is terminal
  const controls = el("div", "controls");
  controls.id = "controls";
  if (view.pending && view.status === "active") {
    const q = view.pending;
    for (const kind of answerKindsFor(q)) {
      if (kind === "value") {
        for (const w of valuesFor(app, q.attr)) {
          controls.appendChild(answerButton(String(w), { kind: "value", value: w }, handlers));
        }
      } else {
        controls.appendChild(answerButton(LABELS[kind], { kind }, handlers));
      }
    }
    const prompt = el("div", "prompt", describeQuery(q));
    prompt.id = "prompt";
    box.appendChild(prompt);
  }
  box.appendChild(controls);
  root.appendChild(box);
}

function valuesFor(app: AppState, attr: string | undefined): (string | number)[] {
  if (!attr || !app.detail) {
    return [];
  }
  const def = app.detail.attributes.find((a) => a.name === attr);
  return def?.values ?? [];
}

export function render(root: HTMLElement, app: AppState, handlers: Handlers): void {
  root.textContent = "";
  if (app.phase === "setup") {
    renderSetup(root, app, handlers);
  } else {
    renderChat(root, app, handlers);
  }
}
