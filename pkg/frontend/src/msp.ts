import type { VerdictValue } from "./types.js";

/** Fraction of Yes verdicts among all submitted verdicts; null when none. */
export function runningMsp(verdicts: Iterable<VerdictValue>): number | null {
  let yes = 0;
  let total = 0;
  for (const value of verdicts) {
    total += 1;
    if (value === "Yes") yes += 1;
  }
  return total === 0 ? null : yes / total;
}

/** "0.33"-style rendering; an em dash before the first verdict. */
export function formatMsp(msp: number | null): string {
  return msp === null ? "—" : msp.toFixed(2);
}
