export type VerdictValue = "Yes" | "No" | "Maybe";

export interface SessionInfo {
  id: string;
  workflow: "expert_no_labels" | "expert_with_labels";
  size: number;
  cursor: number;
  annotated: number;
  msp: number | null;
  types: string[];
  params: Record<string, unknown>;
  verdicts: Record<string, VerdictValue>;
}

/** One queue entry as served by GET /sessions/{id}/queue (no examples). */
export interface QueueItem {
  position: number;
  key: string;
  pair_count: number;
  verdict: VerdictValue | null;
  precision_s?: number;
  recall_s?: number;
  tp?: number;
  fp?: number;
}

/** [sentence text, display form] */
export type Example = [string, string];

export interface SessionStats {
  size: number;
  annotated: number;
  remaining: number;
  cursor: number;
  msp: number | null;
  counts: Record<VerdictValue, number>;
}

export interface VerdictAck extends SessionStats {
  ok: boolean;
}

export interface ExportedVerdict {
  key: string;
  value: VerdictValue;
  annotator: string;
  ts: number;
}

export interface ExportPayload {
  verdicts: ExportedVerdict[];
  pairs: Array<{
    pair: { a_id: string; b_id: string; a_type: string; b_type: string };
    keys: string[];
    sentences: Array<[string, string]>;
    novel: boolean;
  }>;
  summary: Record<string, number>;
}

export interface CreateSessionRequest {
  workflow: SessionInfo["workflow"];
  session_size?: number;
  examples_per_item?: number;
  precision_threshold?: number;
  recall_threshold?: number;
  min_words?: number;
  min_pair_count?: number;
  seed?: number;
}
