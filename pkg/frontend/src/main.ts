import { ApiClient, ApiError } from "./api.js";
import { SessionStore } from "./store.js";
import { h, renderApp } from "./view.js";

// Served from the same origin as the API (the service mounts dist/ at /ui);
// override with ?api=http://host:port when developing against another host.
function apiBase(params: URLSearchParams): string {
  return params.get("api") ?? "";
}

function renderPicker(root: HTMLElement, api: ApiClient): void {
  root.replaceChildren(h("div", { class: "status" }, "loading sessions…"));
  void api
    .listSessions()
    .then(({ sessions }) => {
      const rows = sessions.map((s) =>
        h(
          "li",
          {},
          h("a", { href: `?session=${encodeURIComponent(s.id)}` },
            `${s.id} · ${s.workflow} · ${s.annotated}/${s.size}`),
        ),
      );
      const sizeInput = h("input", { type: "number", value: "200", min: "1" }) as HTMLInputElement;
      const examplesInput = h("input", { type: "number", value: "20", min: "1" }) as HTMLInputElement;
      const workflowSelect = h("select", {},
        h("option", { value: "expert_no_labels" }, "expert, no labels"),
        h("option", { value: "expert_with_labels" }, "expert with labels"),
      ) as HTMLSelectElement;
      const seedInput = h("input", { type: "number", value: "0" }) as HTMLInputElement;
      const form = h(
        "form",
        {
          class: "create-form",
          onsubmit: (event: Event) => {
            event.preventDefault();
            void api
              .createSession({
                workflow: workflowSelect.value as "expert_no_labels" | "expert_with_labels",
                session_size: Number(sizeInput.value),
                examples_per_item: Number(examplesInput.value),
                seed: Number(seedInput.value),
              })
              .then((session) => {
                window.location.search = `?session=${encodeURIComponent(session.id)}`;
              })
              .catch((error: unknown) => {
                const message =
                  error instanceof ApiError ? `${error.message} [${error.code}]` : String(error);
                form.append(h("div", { class: "banner banner-error" }, message));
              });
          },
        },
        h("label", {}, "workflow ", workflowSelect),
        h("label", {}, "items ", sizeInput),
        h("label", {}, "examples/item ", examplesInput),
        h("label", {}, "seed ", seedInput),
        h("button", { type: "submit" }, "Start session"),
      );
      root.replaceChildren(
        h("header", { class: "app-head" }, h("h1", {}, "Annotation sessions")),
        h("ul", { class: "session-list" }, ...rows),
        form,
      );
    })
    .catch((error: unknown) => {
      root.replaceChildren(
        h(
          "div",
          { class: "banner banner-error" },
          `cannot reach the annotation service: ${String(error)}`,
          h("button", { onclick: () => renderPicker(root, api) }, "Retry"),
        ),
      );
    });
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(apiBase(params));
  const sessionId = params.get("session");
  if (!sessionId) {
    renderPicker(root, api);
    return;
  }
  const store = new SessionStore(api, sessionId);
  renderApp(root, store);
  void store.load();
}

boot();
