/** Thin client over the session service's HTTP/JSON + SSE contract. */

import type { SessionEvent, Snapshot } from './types.js';

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function jsonOrThrow(resp: Response): Promise<any> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* body was not JSON */
    }
    throw new ApiError(resp.status, detail);
  }
  return resp.json();
}

export class Client {
  constructor(public baseUrl: string = '') {}

  async createSession(personality: [number, number, number], speaking: boolean,
                      seed = 0): Promise<string> {
    const body = { personality, speaking, seed };
    const resp = await fetch(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    return (await jsonOrThrow(resp)).id as string;
  }

  async getState(id: string): Promise<Snapshot> {
    return jsonOrThrow(await fetch(`${this.baseUrl}/sessions/${id}`));
  }

  async postMove(id: string, row: number, col: number): Promise<void> {
    await jsonOrThrow(
      await fetch(`${this.baseUrl}/sessions/${id}/move`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ row, col }),
      }),
    );
  }

  async postPerception(id: string, emotion: string, attentive: boolean): Promise<void> {
    await jsonOrThrow(
      await fetch(`${this.baseUrl}/sessions/${id}/perception`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ emotion, attentive }),
      }),
    );
  }

  async advance(id: string): Promise<{ status: string; events: SessionEvent[] }> {
    return jsonOrThrow(await fetch(`${this.baseUrl}/sessions/${id}/advance`, { method: 'POST' }));
  }

  async exportEvents(id: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/sessions/${id}/export?format=events-jsonl`);
    if (!resp.ok) throw new ApiError(resp.status, resp.statusText);
    return resp.text();
  }

  async exportTrajectories(id: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/sessions/${id}/export?format=trajectory-csv`);
    if (!resp.ok) throw new ApiError(resp.status, resp.statusText);
    return resp.text();
  }

  /** Subscribe to the SSE stream; replays from tick 0, then follows. The
   * returned function cancels the subscription. */
  streamEvents(id: string, onEvent: (ev: SessionEvent) => void,
               onDone?: () => void): () => void {
    const controller = new AbortController();
    (async () => {
      const resp = await fetch(`${this.baseUrl}/sessions/${id}/events`, {
        signal: controller.signal,
      });
      if (!resp.ok || !resp.body) throw new ApiError(resp.status, resp.statusText);
      const reader = resp.body.getReader();
      const decoder = new TextDecoder();
      let buffer = '';
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let idx: number;
        while ((idx = buffer.indexOf('\n\n')) >= 0) {
          const frame = buffer.slice(0, idx);
          buffer = buffer.slice(idx + 2);
          for (const line of frame.split('\n')) {
            if (line.startsWith('data: ')) onEvent(JSON.parse(line.slice(6)));
          }
        }
      }
      onDone?.();
    })().catch((err) => {
      if ((err as Error).name !== 'AbortError') throw err;
    });
    return () => controller.abort();
  }
}
