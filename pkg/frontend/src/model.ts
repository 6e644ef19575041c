// View model of a demonstration session. The server is the single source
// of truth: every mutation re-fetches state, rejected moves are mirrored
// as violations without ever committing locally, and all verdicts shown
// anywhere in the UI come from server responses.

import type { StudioApi } from "./api.js";
import type {
  CatalogPayload,
  PlacementInfo,
  ReportPayload,
  SessionState,
  StepResponse,
  TaskNodeInfo,
  Violation,
} from "./types.js";
import { effectiveExtent } from "./types.js";

export interface Selection {
  instanceId: number;
  rot: number;
}

export interface Verdict {
  accepted: boolean;
  violations: Violation[];
}

const ROTATIONS = [0, 90, 180, 270];

export class StudioViewModel {
  state: SessionState | null = null;
  catalog: CatalogPayload | null = null;
  selection: Selection | null = null;
  activeLayer = 1;
  lastVerdict: Verdict | null = null;
  timeline: TaskNodeInfo[] = [];
  report: ReportPayload | null = null;

  constructor(private readonly api: StudioApi) {}

  async init(): Promise<void> {
    this.catalog = (await this.api.getCatalog()).data;
  }

  async createSession(storageText?: string): Promise<string> {
    const body = storageText === undefined ? {} : { storage: storageText };
    const created = await this.api.createSession(body);
    if (created.status !== 200) {
      throw new Error(`session creation failed: ${JSON.stringify(created.data)}`);
    }
    await this.attach(created.data.session_id);
    return created.data.session_id;
  }

  async attach(sessionId: string): Promise<void> {
    this.selection = null;
    this.lastVerdict = null;
    this.report = null;
    await this.refreshState(sessionId);
    await this.refreshTimeline();
  }

  get sessionId(): string {
    if (this.state === null) {
      throw new Error("no active session");
    }
    return this.state.session_id;
  }

  private async refreshState(sessionId?: string): Promise<void> {
    const id = sessionId ?? this.sessionId;
    const response = await this.api.getState(id);
    if (response.status !== 200) {
      throw new Error(`state fetch failed with ${response.status}`);
    }
    this.state = response.data;
  }

  async refreshTimeline(): Promise<void> {
    const response = await this.api.getTaskgraph(this.sessionId);
    this.timeline = response.status === 200 ? response.data.nodes : [];
  }

  storagePlacement(instanceId: number): PlacementInfo | undefined {
    return this.state?.storage.find((p) => p.instance_id === instanceId);
  }

  select(instanceId: number): void {
    const placement = this.storagePlacement(instanceId);
    if (placement === undefined) {
      return;
    }
    this.selection = { instanceId, rot: placement.rot };
    this.lastVerdict = null;
  }

  clearSelection(): void {
    this.selection = null;
  }

  rotateSelection(): void {
    if (this.selection === null) {
      return;
    }
    const next = (ROTATIONS.indexOf(this.selection.rot) + 1) % ROTATIONS.length;
    this.selection = { ...this.selection, rot: ROTATIONS[next] };
  }

  setLayer(layer: number): void {
    const top = this.state?.dims[2] ?? 1;
    this.activeLayer = Math.min(Math.max(layer, 1), top);
  }

  /** Effective footprint of the current selection at its rotation. */
  selectionExtent(): [number, number] | null {
    if (this.selection === null) {
      return null;
    }
    const placement = this.storagePlacement(this.selection.instanceId);
    if (placement === undefined) {
      return null;
    }
    return effectiveExtent(placement.width, placement.length, this.selection.rot);
  }

  /**
   * Try to place the selected brick at assembly cell (x, y) on the active
   * layer. Accepted moves grow the timeline; rejected moves surface the
   * server's violations and leave everything as it was.
   */
  async place(x: number, y: number): Promise<StepResponse | null> {
    if (this.state === null || this.selection === null) {
      return null;
    }
    const response = await this.api.submitStep(this.sessionId, {
      instance_id: this.selection.instanceId,
      x,
      y,
      z: this.activeLayer,
      rot: this.selection.rot,
    });
    this.lastVerdict = {
      accepted: response.data.accepted === true,
      violations: response.data.violations ?? [],
    };
    if (this.lastVerdict.accepted && response.data.node) {
      this.timeline = [...this.timeline, response.data.node];
      this.selection = null;
    }
    // Mirror the server either way; a rejected move must show an
    // unchanged board (the brick snaps back).
    await this.refreshState();
    return response.data;
  }

  /** Cells to highlight from the last verdict's violations. */
  highlightCells(): [number, number, number][] {
    if (this.lastVerdict === null) {
      return [];
    }
    const cells: [number, number, number][] = [];
    for (const violation of this.lastVerdict.violations) {
      for (const cell of violation.cells) {
        cells.push([cell[0], cell[1], cell[2]]);
      }
    }
    return cells;
  }

  async verify(): Promise<ReportPayload> {
    const response = await this.api.verify(this.sessionId);
    if (response.status !== 200) {
      throw new Error(`verification failed: ${JSON.stringify(response.data)}`);
    }
    this.report = response.data;
    await this.refreshState();
    return this.report;
  }
}
