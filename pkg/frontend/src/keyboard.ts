import type { VerdictValue } from "./types.js";

/** y/n/m submit a verdict for the focused item. */
export function verdictForKey(key: string): VerdictValue | null {
  switch (key.toLowerCase()) {
    case "y":
      return "Yes";
    case "n":
      return "No";
    case "m":
      return "Maybe";
    default:
      return null;
  }
}

/** Arrow keys (and j/k) move the focus. */
export function focusDeltaForKey(key: string): number {
  switch (key) {
    case "ArrowDown":
    case "j":
      return 1;
    case "ArrowUp":
    case "k":
      return -1;
    default:
      return 0;
  }
}
