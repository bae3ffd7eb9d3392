import type {
  MapGeometry,
  PopulationPayload,
  PushMessage,
  RunRecordJson,
} from "./types.js";

/** Non-2xx response, carrying the service's detail string. */
export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ServiceError";
  }
}

/** The WebSocket surface the client needs; satisfied by browser and ws. */
export interface WebSocketLike {
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event?: unknown) => void) | null;
  close(): void;
}

export interface EventChannel {
  /** Resolves once the socket is open (or after a grace period). Waiting on
   * this before issuing operations guarantees no completion push is lost. */
  ready: Promise<void>;
  close(): void;
}

export interface ClientDeps {
  fetchFn?: typeof fetch;
  wsFactory?: (url: string) => WebSocketLike;
}

export class ServiceClient {
  private readonly fetchFn: typeof fetch;
  private readonly wsFactory: (url: string) => WebSocketLike;

  constructor(
    private readonly baseUrl: string,
    deps: ClientDeps = {},
  ) {
    this.fetchFn = deps.fetchFn ?? fetch.bind(globalThis);
    this.wsFactory =
      deps.wsFactory ??
      ((url) => new WebSocket(url) as unknown as WebSocketLike);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      try {
        const data = (await response.json()) as { detail?: unknown };
        if (typeof data.detail === "string") {
          detail = data.detail;
        }
      } catch {
        // body was not JSON; keep the status line
      }
      throw new ServiceError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(options: {
    map?: string;
    seed?: number;
    budget?: number;
  }): Promise<PopulationPayload> {
    return this.request("POST", "/sessions", options);
  }

  population(sessionId: string): Promise<PopulationPayload> {
    return this.request("GET", `/sessions/${sessionId}/population`);
  }

  select(sessionId: string, ids: number[]): Promise<PopulationPayload> {
    return this.request("POST", `/sessions/${sessionId}/select`, { ids });
  }

  step(sessionId: string): Promise<PopulationPayload> {
    return this.request("POST", `/sessions/${sessionId}/step`);
  }

  novelty(sessionId: string): Promise<{ session: string; status: string }> {
    return this.request("POST", `/sessions/${sessionId}/novelty`);
  }

  optimize(sessionId: string): Promise<{ session: string; status: string }> {
    return this.request("POST", `/sessions/${sessionId}/optimize`);
  }

  cancel(
    sessionId: string,
  ): Promise<{ session: string; cancelled: boolean; status: string }> {
    return this.request("POST", `/sessions/${sessionId}/cancel`);
  }

  restart(sessionId: string): Promise<PopulationPayload> {
    return this.request("POST", `/sessions/${sessionId}/restart`);
  }

  publish(sessionId: string): Promise<RunRecordJson> {
    return this.request("POST", `/sessions/${sessionId}/publish`);
  }

  async maps(): Promise<string[]> {
    const data = await this.request<{ maps: string[] }>("GET", "/maps");
    return data.maps;
  }

  mapGeometry(name: string): Promise<MapGeometry> {
    return this.request("GET", `/maps/${name}`);
  }

  /** Subscribe to the session's push channel. */
  events(
    sessionId: string,
    onMessage: (message: PushMessage) => void,
    onClose?: () => void,
  ): EventChannel {
    const wsBase = this.baseUrl.replace(/^http/, "ws");
    const socket = this.wsFactory(`${wsBase}/sessions/${sessionId}/events`);
    const ready = new Promise<void>((resolve) => {
      let settled = false;
      const settle = () => {
        if (!settled) {
          settled = true;
          clearTimeout(timer);
          resolve();
        }
      };
      const timer = setTimeout(settle, 3000);
      socket.onopen = settle;
    });
    socket.onmessage = (event) => {
      onMessage(JSON.parse(String(event.data)) as PushMessage);
    };
    socket.onclose = () => {
      if (onClose) {
        onClose();
      }
    };
    return { ready, close: () => socket.close() };
  }
}
