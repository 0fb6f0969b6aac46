import type { Command, CommandResponse, RuleSetJson, SessionState } from './types.js';

export class GatewayError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the session gateway; all state lives server-side. */
export class GatewayClient {
  constructor(
    private baseUrl = '',
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let code = 'HttpError';
      let detail = `${response.status}`;
      try {
        const body = (await response.json()) as { error?: string; detail?: string };
        code = body.error ?? code;
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new GatewayError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }

  createSession(a: Blob, b: Blob, sessionId?: string): Promise<SessionState> {
    const form = new FormData();
    form.append('a', a, 'a.svg');
    form.append('b', b, 'b.svg');
    if (sessionId) form.append('sessionId', sessionId);
    return this.request('/sessions', { method: 'POST', body: form });
  }

  getSession(id: string): Promise<SessionState> {
    return this.request(`/sessions/${id}`);
  }

  getRules(id: string, selection: string[], canvas: 'output' | 'source' = 'output'): Promise<RuleSetJson> {
    const params = new URLSearchParams({ selection: selection.join(','), canvas });
    return this.request(`/sessions/${id}/rules?${params}`);
  }

  sendCommand(id: string, command: Command): Promise<CommandResponse> {
    return this.request(`/sessions/${id}/commands`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(command),
    });
  }

  undo(id: string): Promise<CommandResponse> {
    return this.request(`/sessions/${id}/undo`, { method: 'POST' });
  }

  overrideMatch(id: string, a: string, b: string | null): Promise<CommandResponse> {
    return this.request(`/sessions/${id}/match/override`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ a, b }),
    });
  }

  optimize(id: string, budget: number, seed: number, selection?: string[]): Promise<CommandResponse> {
    return this.request(`/sessions/${id}/optimize`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ budget, seed, selection }),
    });
  }

  exportUrl(id: string): string {
    return `${this.baseUrl}/sessions/${id}/export.svg`;
  }
}
