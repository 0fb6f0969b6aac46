import type {
  Command,
  DesignJson,
  ElementJson,
  GeometryJson,
  RuleJson,
  SessionState,
} from '../src/types.js';

export function element(id: string, x: number, y: number, w: number, h: number, z: number): ElementJson {
  return {
    id,
    geometry: { x, y, z, w, h },
    kind: 'rect',
    'style-digest': 'fill=red',
    'text-content': null,
    'locked-properties': [],
  };
}

function design(elements: ElementJson[]): DesignJson {
  return { 'canvas-width': 200, 'canvas-height': 200, elements };
}

/** Exact-equality rule detector standing in for the gateway's inference. */
export function computeRules(d: DesignJson): RuleJson[] {
  const rules: RuleJson[] = [];
  const groups = (key: (e: ElementJson) => number, variant: string, params: Record<string, unknown>) => {
    const byValue = new Map<number, string[]>();
    for (const e of d.elements) {
      const v = key(e);
      byValue.set(v, [...(byValue.get(v) ?? []), e.id]);
    }
    for (const [value, members] of byValue) {
      if (members.length >= 2) {
        rules.push({
          id: `${variant}-${params.mode ?? ''}-${members.join('.')}`,
          variant,
          params,
          members: members.sort(),
          weight: 1.0,
        });
      }
    }
  };
  groups((e) => e.geometry.x, 'HAlign', { mode: 'left' });
  groups((e) => e.geometry.y, 'VAlign', { mode: 'top' });
  groups((e) => e.geometry.w, 'SameWidth', {});
  groups((e) => e.geometry.h, 'SameHeight', {});
  return rules;
}

export function makeState(): SessionState {
  const aStar = design([
    element('a1', 10, 10, 20, 20, 0),
    element('a2', 10, 40, 20, 20, 1),
    element('a3', 60, 10, 20, 20, 2),
  ]);
  const rules = computeRules(aStar);
  return {
    id: 'sess',
    a: JSON.parse(JSON.stringify(aStar)) as DesignJson,
    b: design([element('b1', 100, 10, 20, 20, 0), element('b2', 100, 40, 20, 20, 1)]),
    aStar,
    t: { entries: {} },
    mapping: {
      pairs: [
        { a: 'a1', b: 'b1', score: 0.9, overridden: false },
        { a: 'a2', b: 'b2', score: 0.9, overridden: false },
      ],
      unmatchedA: ['a3'],
      unmatchedB: [],
    },
    rulesA: { rules, config: {} },
    rulesB: { rules: [], config: {} },
    rulesAStar: { rules, config: {} },
    weights: { rules: {}, off: 1, con: 1, sigma: 2 },
    locks: {},
    reward: {
      'r-rule': 1.0,
      'r-off': 0.0,
      'r-con': 0.25,
      total: 1.25,
      't-non-overlap': 0,
      'e-unique-prop': 4,
      'per-rule': [],
    },
    undoDepth: 0,
  };
}

/**
 * In-memory gateway double: serves state, filters rules by selection the
 * way the server does, applies set-geometry commands, and re-infers the
 * fake rule set so panel refreshes observe recomputed rules.
 */
export class FakeGateway {
  state: SessionState;
  commands: Command[] = [];
  requests: string[] = [];
  failNextCommand: { status: number; error: string; detail: string } | null = null;

  constructor(state: SessionState = makeState()) {
    this.state = state;
  }

  private json(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { 'content-type': 'application/json' },
    });
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? 'GET';
    const u = new URL(url, 'http://fake');
    this.requests.push(`${method} ${u.pathname}${u.search}`);

    if (method === 'GET' && u.pathname === `/sessions/${this.state.id}`) {
      return this.json(this.state);
    }
    if (method === 'GET' && u.pathname === `/sessions/${this.state.id}/rules`) {
      const selection = (u.searchParams.get('selection') ?? '').split(',').filter(Boolean);
      const all = this.state.rulesAStar.rules;
      const rules = selection.length
        ? all.filter((r) => r.members.some((m) => selection.includes(m)))
        : all;
      return this.json({ rules, config: {} });
    }
    if (method === 'POST' && u.pathname === `/sessions/${this.state.id}/commands`) {
      if (this.failNextCommand) {
        const failure = this.failNextCommand;
        this.failNextCommand = null;
        return this.json({ error: failure.error, detail: failure.detail }, failure.status);
      }
      const command = JSON.parse(String(init?.body)) as Command;
      this.commands.push(command);
      const changed: string[] = [];
      if (command.type === 'set-geometry') {
        const id = command.id as string;
        const geometry = command.geometry as GeometryJson;
        const target = this.state.aStar.elements.find((e) => e.id === id);
        if (target) {
          target.geometry = geometry;
          changed.push(id);
        }
        this.state.rulesAStar = { rules: computeRules(this.state.aStar), config: {} };
      }
      return this.json({ state: this.state, changed });
    }
    return this.json({ error: 'UnknownRoute', detail: u.pathname }, 404);
  };

  commandRequestCount(): number {
    return this.requests.filter((r) => r.startsWith('POST') && r.includes('/commands')).length;
  }

  rulesRequestCount(): number {
    return this.requests.filter((r) => r.startsWith('GET') && r.includes('/rules')).length;
  }
}
