// Payload shapes of the engine's HTTP API, plus the few pure grid helpers
// the renderer needs. Verdicts are never computed here; they always come
// from the server.

export interface BrickTypeInfo {
  type_id: string;
  width: number;
  length: number;
  color: string;
}

export interface PaletteEntry {
  name: string;
  rgb: number;
}

export interface CatalogPayload {
  types: BrickTypeInfo[];
  palette: PaletteEntry[];
  background: number;
}

export interface PlacementInfo {
  instance_id: number;
  type_id: string;
  x: number;
  y: number;
  z: number;
  rot: number;
  width: number;
  length: number;
  color: string;
}

export interface SessionState {
  session_id: string;
  status: string;
  dims: [number, number, number];
  stability_window: number;
  graph_length: number;
  storage: PlacementInfo[];
  assembly: PlacementInfo[];
  initial_storage: PlacementInfo[];
  has_report: boolean;
}

export interface Violation {
  code: string;
  detail: string;
  cells: number[][];
}

export interface TaskNodeInfo {
  index: number;
  brick_type: string;
  storage_pose: [number, number, number, number];
  assembly_pose: [number, number, number, number];
}

export interface StepResponse {
  accepted: boolean;
  violations: Violation[];
  graph_length: number;
  node?: TaskNodeInfo;
}

export interface GraphPayload {
  direction: string;
  length: number;
  nodes: TaskNodeInfo[];
  text: string;
}

export interface FeasibilityInfo {
  ok: boolean;
  violations: { code: string; instance_id: number | null; detail: string }[];
}

export interface OperabilityInfo {
  ok: boolean;
  violations: { code: string; cells: number[][]; detail: string }[];
}

export interface StepReportInfo {
  index: number;
  applied: boolean;
  feasibility: FeasibilityInfo;
  operability: OperabilityInfo;
  reachability: string;
  reach_detail: string;
  twist_side: string | null;
}

export interface ReportInfo {
  graph_id: string;
  direction: string;
  overall: string;
  steps: StepReportInfo[];
}

export interface ReportPayload {
  operable: boolean;
  forward: ReportInfo;
  reverse: ReportInfo;
  forward_text: string;
  reverse_text: string;
}

export interface ApiError {
  code: string;
  message: string;
  step_or_frame_index: number | null;
}

/** Effective (x extent, y extent) of a footprint at a rotation. */
export function effectiveExtent(
  width: number,
  length: number,
  rot: number,
): [number, number] {
  return rot % 180 === 0 ? [width, length] : [length, width];
}

/** The stud columns a placement covers, as [x, y] pairs. */
export function footprintColumns(p: {
  x: number;
  y: number;
  rot: number;
  width: number;
  length: number;
}): [number, number][] {
  const [fw, fl] = effectiveExtent(p.width, p.length, p.rot);
  const cells: [number, number][] = [];
  for (let dx = 0; dx < fw; dx++) {
    for (let dy = 0; dy < fl; dy++) {
      cells.push([p.x + dx, p.y + dy]);
    }
  }
  return cells;
}

/** 24-bit integer color to a CSS hex string. */
export function cssColor(rgb: number): string {
  return `#${rgb.toString(16).padStart(6, "0")}`;
}
