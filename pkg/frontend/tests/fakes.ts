// Canned-payload stand-in for the HTTP client, recording every call so
// tests can assert the view model mirrors server responses exactly.

import type { ApiResponse, CreateSessionBody } from "../src/api.js";
import type {
  CatalogPayload,
  GraphPayload,
  PlacementInfo,
  ReportPayload,
  SessionState,
  StepResponse,
} from "../src/types.js";

export const CATALOG: CatalogPayload = {
  types: [
    { type_id: "1x1_red", width: 1, length: 1, color: "red" },
    { type_id: "1x2_blue", width: 1, length: 2, color: "blue" },
    { type_id: "2x2_green", width: 2, length: 2, color: "green" },
  ],
  palette: [
    { name: "red", rgb: 0xc91a09 },
    { name: "blue", rgb: 0x0055bf },
    { name: "green", rgb: 0x237841 },
  ],
  background: 0x303030,
};

export function placement(
  instance_id: number,
  type_id: string,
  x: number,
  y: number,
  z = 1,
  rot = 0,
): PlacementInfo {
  const info = CATALOG.types.find((t) => t.type_id === type_id)!;
  return {
    instance_id,
    type_id,
    x,
    y,
    z,
    rot,
    width: info.width,
    length: info.length,
    color: info.color,
  };
}

export function sessionState(
  storage: PlacementInfo[],
  assembly: PlacementInfo[],
  graphLength: number,
): SessionState {
  return {
    session_id: "s-test",
    status: "demonstrating",
    dims: [16, 16, 8],
    stability_window: 3,
    graph_length: graphLength,
    storage,
    assembly,
    initial_storage: storage,
    has_report: false,
  };
}

export class FakeApi {
  calls: string[] = [];
  stateQueue: SessionState[] = [];
  stepQueue: ApiResponse<StepResponse>[] = [];
  graph: GraphPayload = { direction: "assembly", length: 0, nodes: [], text: "taskgraph v1 assembly 0\n" };
  report: ReportPayload | null = null;
  lastServedState: SessionState | null = null;

  async getCatalog(): Promise<ApiResponse<CatalogPayload>> {
    this.calls.push("GET /catalog");
    return { status: 200, data: CATALOG };
  }

  async createSession(_body: CreateSessionBody = {}): Promise<ApiResponse<{ session_id: string }>> {
    this.calls.push("POST /sessions");
    return { status: 200, data: { session_id: "s-test" } };
  }

  async getState(sessionId: string): Promise<ApiResponse<SessionState>> {
    this.calls.push(`GET /sessions/${sessionId}/state`);
    if (this.stateQueue.length > 1) {
      this.stateQueue.shift();
    }
    const next = this.stateQueue[0];
    this.lastServedState = next;
    return { status: 200, data: next };
  }

  async submitStep(
    sessionId: string,
    step: { instance_id: number; x: number; y: number; z: number; rot: number },
  ): Promise<ApiResponse<StepResponse>> {
    this.calls.push(
      `POST /sessions/${sessionId}/steps ${step.instance_id}@(${step.x},${step.y},${step.z},${step.rot})`,
    );
    return this.stepQueue.shift()!;
  }

  async submitFrames(): Promise<ApiResponse<unknown>> {
    this.calls.push("POST frames");
    return { status: 200, data: {} };
  }

  async verify(sessionId: string): Promise<ApiResponse<ReportPayload>> {
    this.calls.push(`POST /sessions/${sessionId}/verify`);
    return { status: 200, data: this.report! };
  }

  async getTaskgraph(sessionId: string): Promise<ApiResponse<GraphPayload>> {
    this.calls.push(`GET /sessions/${sessionId}/taskgraph`);
    return { status: 200, data: this.graph };
  }

  async getReport(sessionId: string): Promise<ApiResponse<ReportPayload>> {
    this.calls.push(`GET /sessions/${sessionId}/report`);
    return this.report === null
      ? { status: 404, data: this.report as never }
      : { status: 200, data: this.report };
  }
}
