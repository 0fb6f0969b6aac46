import { GatewayClient, GatewayError } from './api.js';
import type { Command, GeometryJson, RuleJson, SessionState } from './types.js';

export interface PendingDrag {
  id: string;
  geometry: GeometryJson;
}

/**
 * Client view of one session. The server is the single source of truth:
 * every change goes through a gateway command and the view re-renders
 * from the response; the only local-only bits are selection, the canvas
 * toggle, and the optimistic drag preview.
 */
export interface ViewState {
  session: SessionState | null;
  selection: ReadonlySet<string>;
  canvasToggle: 'output' | 'target';
  pendingDrag: PendingDrag | null;
  panelRules: RuleJson[];
  notice: string | null;
  busy: boolean;
}

type Listener = (state: ViewState) => void;

export class SessionStore {
  private listeners = new Set<Listener>();
  private queueTail: Promise<unknown> = Promise.resolve();

  state: ViewState = {
    session: null,
    selection: new Set(),
    canvasToggle: 'output',
    pendingDrag: null,
    panelRules: [],
    notice: null,
    busy: false,
  };

  constructor(readonly client: GatewayClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Serialize actions: at most one gateway mutation in flight. */
  private enqueue<T>(action: () => Promise<T>): Promise<T> {
    const next = this.queueTail.then(action, action);
    this.queueTail = next.catch(() => undefined);
    return next;
  }

  /** Resolves once every queued action has settled. */
  idle(): Promise<void> {
    return this.queueTail.then(
      () => undefined,
      () => undefined,
    );
  }

  async load(sessionId: string): Promise<void> {
    const session = await this.client.getSession(sessionId);
    this.emit({ session, selection: new Set(), pendingDrag: null, notice: null });
    await this.enqueue(() => this.refreshPanel());
  }

  adopt(session: SessionState): Promise<void> {
    this.emit({ session, selection: new Set(), pendingDrag: null, notice: null });
    return this.enqueue(() => this.refreshPanel());
  }

  setSelection(ids: Iterable<string>): Promise<void> {
    const design = this.state.session?.aStar;
    const known = new Set(design ? design.elements.map((e) => e.id) : []);
    const selection = new Set([...ids].filter((id) => known.has(id)));
    this.emit({ selection });
    return this.enqueue(() => this.refreshPanel());
  }

  toggleCanvas(): void {
    this.emit({ canvasToggle: this.state.canvasToggle === 'output' ? 'target' : 'output' });
  }

  /** The rule panel always shows the gateway's own filtered rule list. */
  private async refreshPanel(): Promise<void> {
    const session = this.state.session;
    if (!session) {
      this.emit({ panelRules: [] });
      return;
    }
    const rules = await this.client.getRules(session.id, [...this.state.selection]);
    this.emit({ panelRules: rules.rules });
  }

  dispatch(command: Command): Promise<void> {
    return this.enqueue(async () => {
      const session = this.state.session;
      if (!session) return;
      this.emit({ busy: true });
      try {
        const response = await this.client.sendCommand(session.id, command);
        this.emit({ session: response.state, notice: null, pendingDrag: null, busy: false });
        await this.refreshPanel();
      } catch (error) {
        // authoritative state wins: drop the optimistic preview and surface
        // the gateway's complaint without losing the selection
        const notice = error instanceof GatewayError ? `${error.code}: ${error.message}` : String(error);
        this.emit({ notice, pendingDrag: null, busy: false });
      }
    });
  }

  // --- drag lifecycle ---------------------------------------------------------

  beginDrag(id: string, geometry: GeometryJson): void {
    this.emit({ pendingDrag: { id, geometry } });
  }

  updateDrag(geometry: GeometryJson): void {
    const drag = this.state.pendingDrag;
    if (drag) this.emit({ pendingDrag: { id: drag.id, geometry } });
  }

  /** Commit the drag as one set-geometry command; no-op drags are dropped. */
  commitDrag(): Promise<void> {
    const drag = this.state.pendingDrag;
    const session = this.state.session;
    if (!drag || !session) return Promise.resolve();
    const element = session.aStar.elements.find((e) => e.id === drag.id);
    if (!element) {
      this.emit({ pendingDrag: null });
      return Promise.resolve();
    }
    const before = element.geometry;
    const after = drag.geometry;
    const moved =
      before.x !== after.x ||
      before.y !== after.y ||
      before.z !== after.z ||
      before.w !== after.w ||
      before.h !== after.h;
    if (!moved) {
      this.emit({ pendingDrag: null });
      return Promise.resolve();
    }
    return this.dispatch({ type: 'set-geometry', id: drag.id, geometry: after });
  }
}
