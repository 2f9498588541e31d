import { Client } from "./api.js";
import { createApp } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  // served from the same origin as the api, so no base url needed
  const app = createApp(root, new Client(""));
  void app.refreshCatalogs();
});
