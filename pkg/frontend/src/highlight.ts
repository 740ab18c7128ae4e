/** Parsing of simplification keys and display strings into typed segments,
 * so the view can emphasize entity placeholders, words merged from outside
 * the dependency path (~word~), and trailing hedging/negation annotations.
 */

export type SegmentKind = "word" | "placeholder" | "merged";

export interface Segment {
  text: string;
  kind: SegmentKind;
}

export interface Annotation {
  label: string; // "hedging" | "negation"
  words: string[];
}

export interface DisplayParts {
  segments: Segment[];
  annotations: Annotation[];
}

const ANNOTATION_RE = /\s\+\s(\w+):\[([^\]]*)\]/g;

function classify(token: string, placeholders: ReadonlySet<string>): Segment {
  const marked = token.length > 2 && token.startsWith("~") && token.endsWith("~");
  if (marked) return { text: token.slice(1, -1), kind: "merged" };
  if (placeholders.has(token)) return { text: token, kind: "placeholder" };
  return { text: token, kind: "word" };
}

export function parseKey(key: string, placeholderLabels: string[]): Segment[] {
  const placeholders = new Set(placeholderLabels);
  return key
    .split(" ")
    .filter((t) => t.length > 0)
    .map((t) => classify(t, placeholders));
}

export function parseDisplay(display: string, placeholderLabels: string[]): DisplayParts {
  const annotations: Annotation[] = [];
  const body = display.replace(ANNOTATION_RE, (_match, label: string, words: string) => {
    annotations.push({
      label,
      words: words.split(",").map((w) => w.trim()).filter((w) => w.length > 0),
    });
    return "";
  });
  return { segments: parseKey(body, placeholderLabels), annotations };
}

export function placeholderCount(segments: Segment[]): number {
  return segments.filter((s) => s.kind === "placeholder").length;
}
