/** Framework-free DOM rendering for the annotation session view. */

import { parseDisplay, parseKey, type Segment } from "./highlight.js";
import { focusDeltaForKey, verdictForKey } from "./keyboard.js";
import { formatMsp } from "./msp.js";
import type { SessionStore } from "./store.js";
import type { Example, QueueItem, VerdictValue } from "./types.js";

type Child = Node | string | null | undefined;

export function h(
  tag: string,
  attrs: Record<string, string | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElement {
  const el = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      el.addEventListener(name.replace(/^on/, ""), value);
    } else {
      el.setAttribute(name, value);
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    el.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return el;
}

function segmentsNode(segments: Segment[]): HTMLElement {
  const span = h("span", { class: "segments" });
  segments.forEach((segment, i) => {
    if (i > 0) span.append(" ");
    span.append(h("span", { class: `seg seg-${segment.kind}` }, segment.text));
  });
  return span;
}

function exampleNode(example: Example, placeholders: string[]): HTMLElement {
  const [text, display] = example;
  const parsed = parseDisplay(display, placeholders);
  const annotationChips = parsed.annotations.map((a) =>
    h("span", { class: `chip chip-${a.label}` }, `${a.label}: ${a.words.join(", ")}`),
  );
  return h(
    "li",
    { class: "example" },
    h("div", { class: "example-text" }, text),
    h("div", { class: "example-display" }, segmentsNode(parsed.segments), ...annotationChips),
  );
}

const VERDICT_VALUES: VerdictValue[] = ["Yes", "No", "Maybe"];

function itemCard(
  item: QueueItem,
  store: SessionStore,
  placeholders: string[],
  focused: boolean,
): HTMLElement {
  const badges: HTMLElement[] = [
    h("span", { class: "badge" }, `${item.pair_count} pairs`),
  ];
  if (item.precision_s !== undefined) {
    badges.push(h("span", { class: "badge badge-metric" }, `P ${item.precision_s.toFixed(3)}`));
  }
  if (item.recall_s !== undefined) {
    badges.push(h("span", { class: "badge badge-metric" }, `R ${item.recall_s.toFixed(3)}`));
  }
  const buttons = VERDICT_VALUES.map((value) =>
    h(
      "button",
      {
        class: `verdict verdict-${value.toLowerCase()}${item.verdict === value ? " active" : ""}`,
        onclick: () => void store.submit(item.key, value),
      },
      value,
    ),
  );
  const examples = store.cachedExamples(item.key);
  let examplesNode: HTMLElement;
  if (!focused) {
    examplesNode = h("div", { class: "examples-hint" }, "focus to load example sentences");
  } else if (examples === undefined) {
    void store.examplesFor(item.key).catch(() => undefined);
    examplesNode = h("div", { class: "examples-hint" }, "loading examples…");
  } else {
    examplesNode = h("ul", { class: "examples" }, ...examples.map((e) => exampleNode(e, placeholders)));
  }
  return h(
    "section",
    {
      class: `item${focused ? " focused" : ""}${item.verdict ? " annotated" : ""}`,
      "data-position": String(item.position),
      onclick: () => store.focusPosition(item.position),
    },
    h(
      "header",
      { class: "item-head" },
      h("span", { class: "position" }, `#${item.position + 1}`),
      segmentsNode(parseKey(item.key, placeholders)),
      ...badges,
    ),
    h("div", { class: "item-actions" }, ...buttons),
    examplesNode,
  );
}

/** Mounts the session view; returns a disposer that detaches the store
 * subscription and the document-level keyboard handler. */
export function renderApp(root: HTMLElement, store: SessionStore): () => void {
  const render = () => {
    const state = store.getState();
    root.replaceChildren();

    if (state.phase === "loading" || state.phase === "idle") {
      root.append(h("div", { class: "status" }, "loading session…"));
      return;
    }
    if (state.phase === "failed" || !state.session) {
      root.append(
        h(
          "div",
          { class: "banner banner-error" },
          state.banner ?? "failed to load the session",
          h("button", { onclick: () => void store.load() }, "Retry"),
        ),
      );
      return;
    }

    const session = state.session;
    const placeholders = session.types;
    const header = h(
      "header",
      { class: "app-head" },
      h("h1", {}, `Session ${session.id}`),
      h("span", { class: "workflow" }, session.workflow),
      h("span", { class: "progress" }, `${session.annotated} / ${session.size}`),
      h("span", { class: "msp", title: "running fraction of Yes verdicts" },
        `MSP ${formatMsp(session.msp)}`),
      h(
        "button",
        {
          class: "export",
          ...(store.isComplete() ? {} : { disabled: "disabled", title: "finish the session first" }),
          onclick: () => {
            void exportFiles(store);
          },
        },
        "Export",
      ),
    );
    root.append(header);

    if (state.banner) {
      root.append(
        h(
          "div",
          { class: "banner banner-error" },
          state.banner,
          h("button", { onclick: () => store.dismissBanner() }, "Dismiss"),
          h("button", { onclick: () => void store.load() }, "Reload"),
        ),
      );
    }

    if (state.queue.length === 0) {
      root.append(h("div", { class: "status" }, "this session has no items"));
      return;
    }

    const list = h("main", { class: "queue" });
    for (const item of state.queue) {
      list.append(itemCard(item, store, placeholders, item.position === state.focus));
    }
    root.append(list);
    const focusedEl = list.querySelector(".item.focused") as HTMLElement | null;
    if (focusedEl && typeof focusedEl.scrollIntoView === "function") {
      focusedEl.scrollIntoView({ block: "nearest" });
    }
  };

  const unsubscribe = store.subscribe(render);
  render();

  const onKeydown = (event: KeyboardEvent) => {
    if (event.target instanceof HTMLInputElement) return;
    const state = store.getState();
    if (state.phase !== "ready") return;
    const verdict = verdictForKey(event.key);
    if (verdict) {
      const focusedItem = state.queue[state.focus];
      if (focusedItem) void store.submit(focusedItem.key, verdict);
      event.preventDefault();
      return;
    }
    const delta = focusDeltaForKey(event.key);
    if (delta !== 0) {
      store.focusDelta(delta);
      event.preventDefault();
    }
  };
  document.addEventListener("keydown", onKeydown);

  return () => {
    unsubscribe();
    document.removeEventListener("keydown", onKeydown);
  };
}

function saveBlob(name: string, lines: string[]): void {
  const blob = new Blob([lines.map((l) => l + "\n").join("")], {
    type: "application/x-ndjson",
  });
  const url = URL.createObjectURL(blob);
  const anchor = h("a", { href: url, download: name }) as HTMLAnchorElement;
  document.body.append(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}

export async function exportFiles(store: SessionStore): Promise<void> {
  const payload = await store.api.exportSession(store.sessionId);
  saveBlob(
    `${store.sessionId}.verdicts.ndjson`,
    payload.verdicts.map((v) => JSON.stringify(v)),
  );
  saveBlob(
    `${store.sessionId}.pairs.ndjson`,
    payload.pairs.map((p) => JSON.stringify(p)),
  );
}
