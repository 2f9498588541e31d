import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        // in production the bundle is served from the service's own origin;
        // the test DOM lives on about:blank, so same-origin checks would
        // block what is a same-origin request in real life
        settings: { fetch: { disableSameOriginPolicy: true } },
      },
    },
    // the round-trip suite boots a real server process
    hookTimeout: 60000,
    testTimeout: 30000,
  },
});
