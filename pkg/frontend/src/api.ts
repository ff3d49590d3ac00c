/** Thin HTTP client for the documented session API. */

import type { SessionView, SummaryInfo, Turn } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, text.slice(0, 300));
    }
    return JSON.parse(text) as T;
  }

  createSession(customerLanguage: string, agentLanguage: string): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions", {
      customer_language: customerLanguage,
      agent_language: agentLanguage,
    });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  postMessage(
    sessionId: string,
    sender: string,
    text: string,
  ): Promise<{ turn: Turn; summary_after: SummaryInfo }> {
    return this.request("POST", `/sessions/${sessionId}/messages`, { sender, text });
  }

  retryTurn(sessionId: string, turnIndex: number): Promise<{ turn: Turn }> {
    return this.request("POST", `/sessions/${sessionId}/turns/${turnIndex}/retry`);
  }

  eventsUrl(sessionId: string, after = 0): string {
    return `${this.baseUrl}/sessions/${sessionId}/events?after=${after}`;
  }
}
