// Step-through replay of a verified graph. Board states are folded from
// the graph's node poses (pure data from the server); the verdict badges
// are copied verbatim from the persisted report, never recomputed.

import type {
  BrickTypeInfo,
  GraphPayload,
  PlacementInfo,
  ReportInfo,
  StepReportInfo,
  TaskNodeInfo,
} from "./types.js";

export interface BoardBricks {
  storage: PlacementInfo[];
  assembly: PlacementInfo[];
}

export interface StepBadge {
  index: number;
  applied: boolean;
  feasibility: "ok" | "fail";
  operability: "ok" | "fail";
  reachability: string;
  codes: string[];
}

export function badgeFromStep(step: StepReportInfo): StepBadge {
  return {
    index: step.index,
    applied: step.applied,
    feasibility: step.feasibility.ok ? "ok" : "fail",
    operability: step.operability.ok ? "ok" : "fail",
    reachability: step.reachability,
    codes: [
      ...step.feasibility.violations.map((v) => v.code),
      ...step.operability.violations.map((v) => v.code),
    ],
  };
}

export class ReplayModel {
  cursor = 0;
  private readonly typesById: Map<string, BrickTypeInfo>;

  constructor(
    private readonly initialStorage: PlacementInfo[],
    private readonly graph: GraphPayload,
    private readonly report: ReportInfo,
    types: BrickTypeInfo[],
  ) {
    this.typesById = new Map(types.map((t) => [t.type_id, t]));
  }

  get length(): number {
    return this.graph.nodes.length;
  }

  canForward(): boolean {
    return this.cursor < this.length;
  }

  canBack(): boolean {
    return this.cursor > 0;
  }

  forward(): void {
    if (this.canForward()) {
      this.cursor += 1;
    }
  }

  back(): void {
    if (this.canBack()) {
      this.cursor -= 1;
    }
  }

  rewindTo(cursor: number): void {
    this.cursor = Math.min(Math.max(cursor, 0), this.length);
  }

  /** Badges for every step, verbatim from the persisted report. */
  badges(): StepBadge[] {
    return this.report.steps.map(badgeFromStep);
  }

  badgeAt(index: number): StepBadge {
    return badgeFromStep(this.report.steps[index]);
  }

  private matchesStorage(p: PlacementInfo, node: TaskNodeInfo): boolean {
    const [x, y, z] = node.storage_pose;
    return p.type_id === node.brick_type && p.x === x && p.y === y && p.z === z;
  }

  /** Plate contents after the first ``cursor`` nodes have been applied. */
  boardAt(cursor: number): BoardBricks {
    const applied = this.graph.nodes.slice(0, cursor);
    const storage = this.initialStorage.filter(
      (p) => !applied.some((node) => this.matchesStorage(p, node)),
    );
    const assembly = applied.map((node, i) => {
      const info = this.typesById.get(node.brick_type);
      const [x, y, z, rot] = node.assembly_pose;
      return {
        instance_id: i + 1,
        type_id: node.brick_type,
        x,
        y,
        z,
        rot,
        width: info?.width ?? 1,
        length: info?.length ?? 1,
        color: info?.color ?? "gray",
      };
    });
    return { storage, assembly };
  }

  board(): BoardBricks {
    return this.boardAt(this.cursor);
  }
}
