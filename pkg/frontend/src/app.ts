// App controller: owns the state, talks to the service, redraws after every
// confirmed response. No optimistic updates; a click either turns into a
// server-confirmed transition or into an error notice.

import { ApiError, type AnswerBody, type Client, type StartRequest } from "./api.js";
import { applyAnswer, initialAppState, startView, type AppState } from "./state.js";
import { render, type Handlers } from "./view.js";

export interface App {
  state(): AppState;
  refreshCatalogs(): Promise<void>;
  start(req: StartRequest): Promise<void>;
  submit(answer: AnswerBody): Promise<void>;
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export function createApp(root: HTMLElement, client: Client): App {
  const state = initialAppState();

  const handlers: Handlers = {
    onStart: (req) => void app.start(req),
    onAnswer: (a) => void app.submit(a),
    onRetry: () => void app.refreshCatalogs(),
  };

  const draw = () => render(root, state, handlers);

  const app: App = {
    state: () => state,

    async refreshCatalogs(): Promise<void> {
      state.banner = null;
      draw();
      try {
        const body = await client.listCatalogs();
        state.catalogs = body.catalogs;
      } catch (err) {
        state.banner = `Cannot reach the service: ${message(err)}`;
      }
      draw();
    },

    async start(req: StartRequest): Promise<void> {
      if (!Number.isInteger(req.k_max) || req.k_max < 1) {
        // rejected here, before any request goes out
        state.setupError = "Turn budget must be a positive whole number.";
        draw();
        return;
      }
      if (state.busy) {
        return;
      }
      state.setupError = null;
      state.banner = null;
      state.busy = true;
      draw();
      try {
        const detail = await client.getCatalog(req.catalog_id);
        const snap = await client.openSession(req);
        state.detail = detail;
        state.view = startView(snap);
        state.phase = "chat";
      } catch (err) {
        state.banner = `Could not start the session: ${message(err)}`;
      }
      state.busy = false;
      draw();
    },

    async submit(answer: AnswerBody): Promise<void> {
      const view = state.view;
      // terminal or idle: nothing is clickable and nothing is sent
      if (!view || !view.pending || view.status !== "active" || state.busy) {
        return;
      }
      state.busy = true;
      try {
        const snap = await client.postAnswer(view.sessionId, answer);
        state.view = applyAnswer(view, answer, snap);
      } catch (err) {
        if (err instanceof ApiError && (err.status === 409 || err.status === 410)) {
          view.messages.push({ role: "notice", text: err.message });
        } else {
          state.banner = `Lost the service: ${message(err)}`;
        }
      }
      state.busy = false;
      draw();
    },
  };

  draw();
  return app;
}
