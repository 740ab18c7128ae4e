import type {
  CreateSessionRequest,
  Example,
  ExportPayload,
  QueueItem,
  SessionInfo,
  SessionStats,
  VerdictAck,
  VerdictValue,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    } else if (body?.detail) {
      // validation errors from the framework
      code = "invalid_request";
      message = JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON body: keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly token?: string,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = {
      ...(init?.headers as Record<string, string> | undefined),
    };
    if (init?.body) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(`${this.baseUrl}${path}`, { ...init, headers });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  health(): Promise<{ ok: boolean; keys: number; records: number }> {
    return this.request("/health");
  }

  createSession(body: CreateSessionRequest): Promise<SessionInfo> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify(body) });
  }

  listSessions(): Promise<{ sessions: SessionInfo[] }> {
    return this.request("/sessions");
  }

  getSession(id: string): Promise<SessionInfo> {
    return this.request(`/sessions/${encodeURIComponent(id)}`);
  }

  getQueue(id: string): Promise<{ items: QueueItem[] }> {
    return this.request(`/sessions/${encodeURIComponent(id)}/queue`);
  }

  getExamples(id: string, key: string): Promise<{ key: string; examples: Example[] }> {
    const query = new URLSearchParams({ key }).toString();
    return this.request(`/sessions/${encodeURIComponent(id)}/examples?${query}`);
  }

  submitVerdict(id: string, key: string, value: VerdictValue, annotator = "expert"): Promise<VerdictAck> {
    return this.request(`/sessions/${encodeURIComponent(id)}/verdicts`, {
      method: "POST",
      body: JSON.stringify({ key, value, annotator }),
    });
  }

  getStats(id: string): Promise<SessionStats> {
    return this.request(`/sessions/${encodeURIComponent(id)}/stats`);
  }

  exportSession(id: string): Promise<ExportPayload> {
    return this.request(`/sessions/${encodeURIComponent(id)}/export`);
  }
}
