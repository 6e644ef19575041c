// Thin fetch client for the engine service. Non-2xx responses are still
// parsed: rejected steps (409) carry the violations the UI must show.

import type {
  CatalogPayload,
  GraphPayload,
  ReportPayload,
  SessionState,
  StepResponse,
} from "./types.js";

export interface ApiResponse<T> {
  status: number;
  data: T;
}

export interface CreateSessionBody {
  catalog?: string;
  storage?: string;
  stability_window?: number;
}

export class StudioApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<ApiResponse<T>> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = (await response.json()) as T;
    return { status: response.status, data };
  }

  getCatalog(): Promise<ApiResponse<CatalogPayload>> {
    return this.request("GET", "/catalog");
  }

  createSession(body: CreateSessionBody = {}): Promise<ApiResponse<{ session_id: string }>> {
    return this.request("POST", "/sessions", body);
  }

  getState(sessionId: string): Promise<ApiResponse<SessionState>> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  submitStep(
    sessionId: string,
    step: { instance_id: number; x: number; y: number; z: number; rot: number },
  ): Promise<ApiResponse<StepResponse>> {
    return this.request("POST", `/sessions/${sessionId}/steps`, step);
  }

  submitFrames(sessionId: string, demoLog: string): Promise<ApiResponse<unknown>> {
    return this.request("POST", `/sessions/${sessionId}/frames`, { demo_log: demoLog });
  }

  verify(sessionId: string): Promise<ApiResponse<ReportPayload>> {
    return this.request("POST", `/sessions/${sessionId}/verify`);
  }

  getTaskgraph(sessionId: string): Promise<ApiResponse<GraphPayload>> {
    return this.request("GET", `/sessions/${sessionId}/taskgraph`);
  }

  getReport(sessionId: string): Promise<ApiResponse<ReportPayload>> {
    return this.request("GET", `/sessions/${sessionId}/report`);
  }
}
