import type {
  MapGeometry,
  PopulationPayload,
  PushMessage,
  RunRecordJson,
} from "./types.js";

/** What the controller needs from a service client; ServiceClient satisfies it. */
export interface SessionApi {
  createSession(options: {
    map?: string;
    seed?: number;
    budget?: number;
  }): Promise<PopulationPayload>;
  population(sessionId: string): Promise<PopulationPayload>;
  select(sessionId: string, ids: number[]): Promise<PopulationPayload>;
  step(sessionId: string): Promise<PopulationPayload>;
  novelty(sessionId: string): Promise<{ session: string; status: string }>;
  optimize(sessionId: string): Promise<{ session: string; status: string }>;
  cancel(
    sessionId: string,
  ): Promise<{ session: string; cancelled: boolean; status: string }>;
  restart(sessionId: string): Promise<PopulationPayload>;
  publish(sessionId: string): Promise<RunRecordJson>;
  mapGeometry(name: string): Promise<MapGeometry>;
  events(
    sessionId: string,
    onMessage: (message: PushMessage) => void,
    onClose?: () => void,
  ): { ready: Promise<void>; close(): void };
}

export type Operation = "step" | "novelty" | "optimize";

export interface ControllerState {
  sessionId: string | null;
  payload: PopulationPayload | null;
  geometry: MapGeometry | null;
  /** Local selection; diverges from payload.selected until an op is issued. */
  selection: number[];
  /** Operation in flight, if any. The server owns all other session state. */
  busy: Operation | null;
  /** Evaluations consumed, updated live from progress pushes. */
  progress: number | null;
  /** Last rejection or transport failure, cleared on the next operation. */
  message: string | null;
  record: RunRecordJson | null;
}

/**
 * Drives one session. All state shown to the user comes from service
 * payloads; the only local piece is the pending selection. One operation
 * may be in flight at a time, and push messages apply in arrival order.
 */
export class SessionController {
  readonly state: ControllerState = {
    sessionId: null,
    payload: null,
    geometry: null,
    selection: [],
    busy: null,
    progress: null,
    message: null,
    record: null,
  };
  private unsubscribe: (() => void) | null = null;

  constructor(
    private readonly client: SessionApi,
    private readonly onChange: (state: ControllerState) => void = () => {},
  ) {}

  private notify(): void {
    this.onChange(this.state);
  }

  private apply(payload: PopulationPayload): void {
    this.state.payload = payload;
    this.state.selection = [...payload.selected];
    this.state.busy = payload.status.startsWith("running-")
      ? (payload.status.slice("running-".length) as Operation)
      : null;
    if (this.state.busy === null) {
      this.state.progress = null;
    }
    if (payload.error) {
      this.state.message = payload.error;
    }
  }

  async create(options: {
    map?: string;
    seed?: number;
    budget?: number;
  }): Promise<void> {
    if (this.unsubscribe) {
      this.unsubscribe();
      this.unsubscribe = null;
    }
    const payload = await this.client.createSession(options);
    this.state.sessionId = payload.session;
    this.state.record = null;
    this.state.message = null;
    this.apply(payload);
    this.state.geometry = await this.client.mapGeometry(payload.map);
    const channel = this.client.events(payload.session, (message) =>
      this.handleMessage(message),
    );
    this.unsubscribe = () => channel.close();
    // Operations finish through this channel; do not return before it can
    // deliver, or a fast op's completion push would be lost.
    await channel.ready;
    this.notify();
  }

  /** Push handler; messages must be applied in arrival order. */
  handleMessage(message: PushMessage): void {
    if (message.session !== this.state.sessionId) {
      return;
    }
    if (message.type === "progress") {
      this.state.progress = message.evals;
    } else if (message.payload) {
      this.apply(message.payload);
    }
    this.notify();
  }

  /** Toggle a card in the pending selection. Local until an op is issued. */
  toggle(id: number): void {
    if (this.state.busy !== null) {
      return;
    }
    const at = this.state.selection.indexOf(id);
    if (at >= 0) {
      this.state.selection.splice(at, 1);
    } else {
      this.state.selection.push(id);
    }
    this.notify();
  }

  canRun(operation: Operation): boolean {
    void operation;
    return (
      this.state.sessionId !== null &&
      this.state.busy === null &&
      this.state.selection.length > 0
    );
  }

  canCancel(): boolean {
    return this.state.busy === "novelty" || this.state.busy === "optimize";
  }

  /**
   * Issue one operation: commit the pending selection, then start the op.
   * Step completes synchronously; novelty and optimize finish through the
   * push channel. Rejections surface as a message and force a resync.
   */
  async run(operation: Operation): Promise<void> {
    if (!this.canRun(operation)) {
      return;
    }
    const sessionId = this.state.sessionId!;
    this.state.busy = operation;
    this.state.message = null;
    this.state.progress = null;
    this.notify();
    try {
      await this.client.select(sessionId, this.state.selection);
      if (operation === "step") {
        this.apply(await this.client.step(sessionId));
      } else if (operation === "novelty") {
        await this.client.novelty(sessionId);
      } else {
        await this.client.optimize(sessionId);
      }
    } catch (error) {
      this.state.message = describeError(error);
      await this.resync();
    }
    this.notify();
  }

  /** Stop the running operation. Allowed at any point while one runs. */
  async cancel(): Promise<void> {
    if (!this.canCancel()) {
      return;
    }
    const sessionId = this.state.sessionId!;
    try {
      await this.client.cancel(sessionId);
      await this.resync();
    } catch (error) {
      this.state.message = describeError(error);
      await this.resync();
    }
    this.notify();
  }

  async restart(): Promise<void> {
    if (this.state.sessionId === null || this.state.busy !== null) {
      return;
    }
    this.state.message = null;
    this.state.record = null;
    try {
      this.apply(await this.client.restart(this.state.sessionId));
    } catch (error) {
      this.state.message = describeError(error);
      await this.resync();
    }
    this.notify();
  }

  async publish(): Promise<RunRecordJson | null> {
    if (this.state.sessionId === null || this.state.busy !== null) {
      return null;
    }
    try {
      this.state.record = await this.client.publish(this.state.sessionId);
    } catch (error) {
      this.state.message = describeError(error);
      await this.resync();
    }
    this.notify();
    return this.state.record;
  }

  /** Pull the authoritative session state after a rejection or hiccup. */
  async resync(): Promise<void> {
    if (this.state.sessionId === null) {
      return;
    }
    try {
      this.apply(await this.client.population(this.state.sessionId));
    } catch {
      // service unreachable; keep the last known state and message
    }
  }

  dispose(): void {
    if (this.unsubscribe) {
      this.unsubscribe();
      this.unsubscribe = null;
    }
  }
}

function describeError(error: unknown): string {
  if (error instanceof Error) {
    return error.message;
  }
  return String(error);
}
