/** Wire types mirroring the gateway's JSON formats. */

export interface GeometryJson {
  x: number;
  y: number;
  z: number;
  w: number;
  h: number;
}

export interface ElementJson {
  id: string;
  geometry: GeometryJson;
  kind: string;
  'style-digest': string;
  'text-content': string | null;
  'locked-properties': string[];
}

export interface DesignJson {
  'canvas-width': number;
  'canvas-height': number;
  elements: ElementJson[];
}

export interface RuleJson {
  id: string;
  variant: string;
  params: Record<string, unknown>;
  members: string[];
  weight: number;
}

export interface RuleSetJson {
  rules: RuleJson[];
  config: Record<string, number>;
}

export interface MatchPairJson {
  a: string;
  b: string;
  score: number;
  overridden: boolean;
}

export interface CorrespondenceJson {
  pairs: MatchPairJson[];
  unmatchedA: string[];
  unmatchedB: string[];
}

export interface RewardEntryJson {
  id: string;
  members: number;
  residual: number;
  contribution: number;
}

export interface RewardJson {
  'r-rule': number;
  'r-off': number;
  'r-con': number;
  total: number;
  't-non-overlap': number;
  'e-unique-prop': number;
  'per-rule': RewardEntryJson[];
}

export interface SessionState {
  id: string;
  a: DesignJson;
  b: DesignJson;
  aStar: DesignJson;
  t: { entries: Record<string, number[]> };
  mapping: CorrespondenceJson;
  rulesA: RuleSetJson;
  rulesB: RuleSetJson;
  rulesAStar: RuleSetJson;
  weights: { rules: Record<string, number>; off: number; con: number; sigma: number };
  locks: Record<string, string[]>;
  reward: RewardJson;
  undoDepth: number;
}

export interface Command {
  type: string;
  [key: string]: unknown;
}

export interface CommandResponse {
  state: SessionState;
  changed: string[];
  trace?: Array<Record<string, unknown>>;
}

export const GEOMETRY_PROPS = ['x', 'y', 'z', 'w', 'h'] as const;
export type GeometryProp = (typeof GEOMETRY_PROPS)[number];
