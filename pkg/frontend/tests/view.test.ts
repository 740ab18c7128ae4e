// @vitest-environment happy-dom
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/store.js";
import { renderApp } from "../src/view.js";
import { MockService, mockItems } from "./mock_service.js";

let service: MockService;
let store: SessionStore;
let root: HTMLElement;
let dispose: () => void;

function text(selector: string): string {
  return root.querySelector(selector)?.textContent ?? "";
}

async function settle() {
  // let queued promise callbacks run
  await new Promise((resolve) => setTimeout(resolve, 0));
}

beforeEach(async () => {
  service = new MockService("s0001", mockItems(5));
  vi.stubGlobal("fetch", service.fetch);
  store = new SessionStore(new ApiClient(""), "s0001");
  root = document.createElement("div");
  document.body.replaceChildren(root);
  dispose = renderApp(root, store);
  await store.load();
  await settle();
});

afterEach(() => {
  dispose();
  vi.unstubAllGlobals();
  document.body.replaceChildren();
});

describe("session view", () => {
  it("shows progress and a dash MSP before any verdict", () => {
    expect(text(".progress")).toBe("0 / 5");
    expect(text(".msp")).toBe("MSP —");
    expect(root.querySelectorAll(".item")).toHaveLength(5);
  });

  it("highlights exactly the key's placeholders", () => {
    const heads = root.querySelectorAll(".item-head");
    for (const head of heads) {
      const key = service.items.find(
        (i) => i.key === head.querySelector(".segments")?.textContent,
      );
      expect(key).toBeDefined();
      const rendered = head.querySelectorAll(".seg-placeholder").length;
      const inKey = key!.key.split(" ").filter((w) => w === "GENE" || w === "DISEASE").length;
      expect(rendered).toBe(inKey);
    }
  });

  it("updates progress and MSP after clicking a verdict", async () => {
    const yes = root.querySelector(".item.focused .verdict-yes") as HTMLButtonElement;
    yes.click();
    await settle();
    expect(text(".progress")).toBe("1 / 5");
    expect(text(".msp")).toBe("MSP 1.00");
    expect(root.querySelector(".item .verdict-yes.active")).not.toBeNull();
  });

  it("submits via keyboard shortcuts and auto-advances", async () => {
    const focusedKey = text(".item.focused .segments");
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "n", bubbles: true }));
    await settle();
    expect(service.latest.get(focusedKey)).toBe("No");
    expect(text(".item.focused .segments")).not.toBe(focusedKey);
  });

  it("shows a rejection banner and reverts", async () => {
    service.rejectNext = "invalid_verdict";
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "y", bubbles: true }));
    await settle();
    expect(text(".banner-error")).toContain("rejected");
    expect(text(".progress")).toBe("0 / 5");
  });

  it("loads examples lazily for the focused item only", async () => {
    await settle();
    const calls = service.requests.filter((r) => r.includes("/examples"));
    expect(calls).toHaveLength(1);
    expect(root.querySelector(".item.focused .examples")).not.toBeNull();
    expect(root.querySelectorAll(".examples-hint").length).toBeGreaterThan(0);
  });

  it("keeps the export button disabled until the session is complete", async () => {
    const button = root.querySelector(".export") as HTMLButtonElement;
    expect(button.hasAttribute("disabled")).toBe(true);
    for (const item of service.items) {
      await store.submit(item.key, "Yes");
    }
    await settle();
    const after = root.querySelector(".export") as HTMLButtonElement;
    expect(after.hasAttribute("disabled")).toBe(false);
  });

  it("renders an empty-state message for empty sessions", async () => {
    const empty = new MockService("s0002", []);
    vi.stubGlobal("fetch", empty.fetch);
    const emptyStore = new SessionStore(new ApiClient(""), "s0002");
    const emptyRoot = document.createElement("div");
    document.body.append(emptyRoot);
    const disposeEmpty = renderApp(emptyRoot, emptyStore);
    await emptyStore.load();
    await settle();
    expect(emptyRoot.querySelector(".status")?.textContent).toContain("no items");
    disposeEmpty();
  });
});
