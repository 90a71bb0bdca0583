// Wire shapes of the engine's HTTP API.

export interface TransformInfo {
  x: number;
  y: number;
  rotation: number;
  scale: number;
}

export interface AssetInfo {
  path: string;
  media_type: string;
}

export interface ElementInfo {
  id: string;
  name: string;
  kind: string;
  transform: TransformInfo;
  asset: AssetInfo | null;
  members: string[];
}

export interface ProxyInfo {
  label: string;
  kind: ProxyKind;
  geometry: [number, number][];
}

export interface ProjectInfo {
  name: string;
  framework: string | null;
  tick: number;
  canvas: [number, number];
  elements: ElementInfo[];
  proxies: ProxyInfo[];
  modules: string[];
}

export interface SliderRow {
  name: string;
  value: number;
  min: number;
  max: number;
  step: number;
  description: string;
}

// Transcript records: chat messages carry role/content, audit records
// carry the user's raw text before prompt assembly.
export interface SessionRecord {
  role?: string;
  content: string;
  audit?: string;
}

export interface EngineEvent {
  seq: number;
  type: string;
  payload: Record<string, unknown>;
}

export type ElementKind = "uploaded-image" | "drawn-sketch" | "llm-generated" | "group";
export type ProxyKind = "point" | "line" | "curve" | "region";
export type Tool = "select" | ProxyKind;

export interface Point {
  x: number;
  y: number;
}
