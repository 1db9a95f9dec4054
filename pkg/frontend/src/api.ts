import type {
  Choice,
  ComparisonCard,
  CreateSessionRequest,
  ModelPayload,
  SessionDescriptor,
} from "./types.js";

/** Error carrying the HTTP status so callers can branch on 409/404. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = String(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Thin typed client over the documented session endpoints. */
export class PreferenceApi {
  constructor(readonly baseUrl: string = "") {}

  createSession(body: CreateSessionRequest): Promise<SessionDescriptor> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(sessionId: string): Promise<SessionDescriptor> {
    return request(`${this.baseUrl}/sessions/${sessionId}`);
  }

  getComparison(sessionId: string): Promise<ComparisonCard> {
    return request(`${this.baseUrl}/sessions/${sessionId}/comparison`);
  }

  submitPreference(
    sessionId: string,
    queryId: string,
    choice: Choice,
  ): Promise<SessionDescriptor> {
    return request(`${this.baseUrl}/sessions/${sessionId}/preference`, {
      method: "POST",
      body: JSON.stringify({ query_id: queryId, choice }),
    });
  }

  getModel(sessionId: string): Promise<ModelPayload> {
    return request(`${this.baseUrl}/sessions/${sessionId}/model`);
  }

  async getExport(sessionId: string): Promise<unknown> {
    return request(`${this.baseUrl}/sessions/${sessionId}/export`);
  }
}
