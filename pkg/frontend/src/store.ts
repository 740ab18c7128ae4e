/** Client-side session state.
 *
 * The server is the source of truth: every verdict submission is applied
 * optimistically, then reconciled with the acknowledgment (or rolled back
 * if the server rejects it). A full reload (`load`) rebuilds the state from
 * GET /sessions/{id} + /queue, so nothing is lost on refresh or network
 * failure.
 */

import { ApiClient, ApiError } from "./api.js";
import { runningMsp } from "./msp.js";
import type { Example, QueueItem, SessionInfo, VerdictAck, VerdictValue } from "./types.js";

export type Phase = "idle" | "loading" | "ready" | "failed";

export interface StoreState {
  phase: Phase;
  session: SessionInfo | null;
  queue: QueueItem[];
  focus: number; // queue position currently focused
  banner: string | null; // transient error shown to the user
  pending: number; // in-flight verdict submissions
  lastAck: VerdictAck | null;
}

type Listener = (state: StoreState) => void;

export class SessionStore {
  private state: StoreState = {
    phase: "idle",
    session: null,
    queue: [],
    focus: 0,
    banner: null,
    pending: 0,
    lastAck: null,
  };
  private listeners: Listener[] = [];
  private examples = new Map<string, Example[]>();
  private examplesInFlight = new Map<string, Promise<Example[]>>();

  constructor(
    readonly api: ApiClient,
    readonly sessionId: string,
  ) {}

  getState(): StoreState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<StoreState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** (Re)build the whole state from the server. Safe to call after errors. */
  async load(): Promise<void> {
    this.update({ phase: "loading", banner: null });
    try {
      const [session, queue] = await Promise.all([
        this.api.getSession(this.sessionId),
        this.api.getQueue(this.sessionId),
      ]);
      const focus = firstUnannotated(queue.items);
      this.update({ phase: "ready", session, queue: queue.items, focus });
    } catch (error) {
      this.update({ phase: "failed", banner: describe(error) });
    }
  }

  /** Example sentences for one key, fetched lazily and cached. */
  async examplesFor(key: string): Promise<Example[]> {
    const cached = this.examples.get(key);
    if (cached) return cached;
    const inFlight = this.examplesInFlight.get(key);
    if (inFlight) return inFlight;
    const promise = this.api
      .getExamples(this.sessionId, key)
      .then((got) => {
        this.examples.set(key, got.examples);
        this.examplesInFlight.delete(key);
        this.update({}); // examples affect rendering
        return got.examples;
      })
      .catch((error) => {
        this.examplesInFlight.delete(key);
        throw error;
      });
    this.examplesInFlight.set(key, promise);
    return promise;
  }

  cachedExamples(key: string): Example[] | undefined {
    return this.examples.get(key);
  }

  /** Optimistic verdict submission with rollback on rejection. */
  async submit(key: string, value: VerdictValue): Promise<VerdictAck | null> {
    const { session, queue } = this.state;
    if (!session) throw new Error("store not loaded");
    const position = queue.findIndex((item) => item.key === key);
    if (position < 0) throw new Error(`key not in queue: ${key}`);

    const previousQueue = queue;
    const previousSession = session;
    const optimisticQueue = queue.map((item) =>
      item.key === key ? { ...item, verdict: value } : item,
    );
    const optimisticVerdicts = { ...session.verdicts, [key]: value };
    this.update({
      queue: optimisticQueue,
      session: {
        ...session,
        verdicts: optimisticVerdicts,
        annotated: Object.keys(optimisticVerdicts).length,
        msp: runningMsp(Object.values(optimisticVerdicts)),
      },
      focus: nextUnannotated(optimisticQueue, position),
      pending: this.state.pending + 1,
      banner: null,
    });

    try {
      const ack = await this.api.submitVerdict(this.sessionId, key, value);
      // the acknowledgment is authoritative for the aggregates
      const current = this.state.session!;
      this.update({
        pending: this.state.pending - 1,
        lastAck: ack,
        session: {
          ...current,
          annotated: ack.annotated,
          cursor: ack.cursor,
          msp: ack.msp,
        },
      });
      return ack;
    } catch (error) {
      this.update({
        queue: previousQueue,
        session: previousSession,
        focus: position,
        pending: this.state.pending - 1,
        banner: `Verdict for "${key}" was rejected: ${describe(error)}`,
      });
      return null;
    }
  }

  focusDelta(delta: number): void {
    const size = this.state.queue.length;
    if (size === 0) return;
    const focus = Math.min(size - 1, Math.max(0, this.state.focus + delta));
    this.update({ focus });
  }

  focusPosition(position: number): void {
    if (position >= 0 && position < this.state.queue.length) {
      this.update({ focus: position });
    }
  }

  dismissBanner(): void {
    this.update({ banner: null });
  }

  isComplete(): boolean {
    const { session } = this.state;
    return session !== null && session.annotated >= session.size && session.size > 0;
  }
}

function firstUnannotated(queue: QueueItem[]): number {
  const index = queue.findIndex((item) => item.verdict === null);
  return index < 0 ? 0 : index;
}

/** The next unannotated position at or after `from`, wrapping backwards. */
function nextUnannotated(queue: QueueItem[], from: number): number {
  for (let i = from + 1; i < queue.length; i++) {
    if (queue[i]!.verdict === null) return i;
  }
  for (let i = 0; i < queue.length; i++) {
    if (queue[i]!.verdict === null) return i;
  }
  return from;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.message} [${error.code}]`;
  if (error instanceof Error) return error.message;
  return String(error);
}
