// End-to-end against a live engine server. Covers the two studio
// acceptance criteria: a scripted demonstration driven through the HTTP
// API produces a task graph byte-identical to the CLI learn path on the
// equivalent rendered log (with rejected steps provably leaving server
// state unchanged), and replay badges match the persisted report for
// every step of a 10-node fixture.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { StudioApi } from "../src/api.js";
import { StudioViewModel } from "../src/model.js";
import { ReplayModel, badgeFromStep } from "../src/replay.js";

const PORT = 8742;
const BASE = `http://127.0.0.1:${PORT}`;
const E2E_TIMEOUT = 120_000;

const STORAGE_TEXT = [
  "bricks v1 16 16 8",
  "1x1_red 0 0 1 0",
  "1x1_blue 2 0 1 0",
  "1x1_blue 4 0 1 0",
  "1x1_blue 6 0 1 0",
  "1x1_blue 8 0 1 0",
  "2x2_green 0 3 1 0",
  "2x2_green 3 3 1 0",
  "2x2_green 6 3 1 0",
  "2x2_green 9 3 1 0",
  "2x2_green 12 3 1 0",
  "",
].join("\n");

// Ten accepted moves: a plus shape of single studs (center pressed last,
// so the teardown must flag NO_SIDE_ACCESS), a three-stack, a two-stack.
const MOVES: [number, number, number, number, number][] = [
  [2, 4, 5, 1, 0],
  [3, 6, 5, 1, 0],
  [4, 5, 4, 1, 0],
  [5, 5, 6, 1, 0],
  [6, 10, 10, 1, 0],
  [7, 10, 10, 2, 0],
  [8, 10, 10, 3, 0],
  [9, 13, 13, 1, 0],
  [10, 13, 13, 2, 0],
  [1, 5, 5, 1, 0],
];

let server: ChildProcess;

async function serverUp(): Promise<boolean> {
  try {
    const response = await fetch(`${BASE}/catalog`);
    return response.status === 200;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "brickworks", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  for (let attempt = 0; attempt < 100; attempt++) {
    if (await serverUp()) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("engine server did not come up");
}, E2E_TIMEOUT);

afterAll(() => {
  server?.kill();
});

describe("scripted studio demonstration", () => {
  it(
    "matches the CLI learn path byte for byte and never commits rejected steps",
    async () => {
      const api = new StudioApi(BASE);
      const model = new StudioViewModel(api);
      await model.init();
      await model.createSession(STORAGE_TEXT);

      // A floating attempt, proven to leave the server state untouched
      // (fresh GETs on both sides of the rejection).
      const before = (await api.getState(model.sessionId)).data;
      model.setLayer(3);
      model.select(1);
      const rejectedFloating = await model.place(8, 8);
      expect(rejectedFloating?.accepted).toBe(false);
      expect(rejectedFloating?.violations.map((v) => v.code)).toContain("UNSUPPORTED");
      const after = (await api.getState(model.sessionId)).data;
      expect(after).toEqual(before);
      expect(model.timeline).toHaveLength(0);

      // Drive the first nine scripted moves through the view model.
      for (const [instanceId, x, y, z, rot] of MOVES.slice(0, 9)) {
        model.setLayer(z);
        model.select(instanceId);
        while (model.selection!.rot !== rot) {
          model.rotateSelection();
        }
        const response = await model.place(x, y);
        expect(response?.accepted, `move of #${instanceId} to (${x},${y},${z})`).toBe(true);
      }

      // A colliding attempt mid-structure: the center stud pressed onto
      // the finished stack. Rejected, and again nothing moves.
      const beforeCollision = (await api.getState(model.sessionId)).data;
      model.setLayer(1);
      model.select(1);
      const rejectedCollision = await model.place(10, 10);
      expect(rejectedCollision?.accepted).toBe(false);
      expect(rejectedCollision?.violations.map((v) => v.code)).toContain("COLLISION");
      const afterCollision = (await api.getState(model.sessionId)).data;
      expect(afterCollision).toEqual(beforeCollision);

      // The tenth move lands the center stud where it belongs.
      const [instanceId, x, y, z, rot] = MOVES[9];
      model.setLayer(z);
      model.select(instanceId);
      while (model.selection!.rot !== rot) {
        model.rotateSelection();
      }
      expect((await model.place(x, y))?.accepted).toBe(true);
      expect(model.timeline).toHaveLength(10);
      expect(model.state?.assembly).toHaveLength(10);
      expect(model.state?.storage).toHaveLength(0);

      // Path equivalence with the CLI: render the studio's graph into a
      // demo log, learn it back, compare bytes.
      const graph = (await api.getTaskgraph(model.sessionId)).data;
      expect(graph.length).toBe(10);
      const dir = mkdtempSync(join(tmpdir(), "studio-e2e-"));
      const graphPath = join(dir, "studio.task");
      const layoutPath = join(dir, "storage.bricks");
      const demoPath = join(dir, "demo.log");
      const learnedPath = join(dir, "learned.task");
      writeFileSync(graphPath, graph.text);
      writeFileSync(layoutPath, STORAGE_TEXT);
      execFileSync("python3", [
        "-m", "brickworks", "render", graphPath,
        "--layout", layoutPath, "--resolution", "2", "-o", demoPath,
      ]);
      execFileSync("python3", [
        "-m", "brickworks", "learn", demoPath,
        "-o", learnedPath, "--plate-height", "8",
      ]);
      expect(readFileSync(learnedPath, "utf-8")).toBe(graph.text);
    },
    E2E_TIMEOUT,
  );
});

describe("replay fidelity on a 10-node fixture", () => {
  it(
    "badges equal the persisted report for every step, both directions",
    async () => {
      const api = new StudioApi(BASE);
      const model = new StudioViewModel(api);
      await model.init();
      await model.createSession(STORAGE_TEXT);
      for (const [instanceId, x, y, z, rot] of MOVES) {
        model.setLayer(z);
        model.select(instanceId);
        while (model.selection!.rot !== rot) {
          model.rotateSelection();
        }
        const response = await model.place(x, y);
        expect(response?.accepted).toBe(true);
      }

      const verified = await model.verify();
      const persisted = (await api.getReport(model.sessionId)).data;
      expect(persisted).toEqual(verified);
      expect(verified.forward.overall).toBe("operable");
      // Pulling the plus-shape center first has no free flank.
      expect(verified.reverse.overall).toBe("inoperable");

      const graph = (await api.getTaskgraph(model.sessionId)).data;
      const initialStorage = model.state!.initial_storage;
      const types = model.catalog!.types;

      for (const direction of ["forward", "reverse"] as const) {
        const report = persisted[direction];
        const replay = new ReplayModel(initialStorage, graph, report, types);
        const badges = replay.badges();
        expect(badges).toHaveLength(10);
        for (let i = 0; i < 10; i++) {
          const step = report.steps[i];
          expect(badges[i]).toEqual(badgeFromStep(step));
          expect(badges[i].index).toBe(step.index);
          expect(badges[i].applied).toBe(step.applied);
          expect(badges[i].feasibility).toBe(step.feasibility.ok ? "ok" : "fail");
          expect(badges[i].operability).toBe(step.operability.ok ? "ok" : "fail");
          expect(badges[i].reachability).toBe(step.reachability);
        }
      }
      const reverseBadges = new ReplayModel(
        initialStorage, graph, persisted.reverse, types,
      ).badges();
      expect(reverseBadges[0].codes).toContain("NO_SIDE_ACCESS");

      // Step through the forward replay: 11 distinct board states, then
      // rewind to the initial layout.
      const replay = new ReplayModel(initialStorage, graph, persisted.forward, types);
      const counts: number[] = [];
      counts.push(replay.board().assembly.length);
      while (replay.canForward()) {
        replay.forward();
        counts.push(replay.board().assembly.length);
      }
      expect(counts).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
      expect(replay.canForward()).toBe(false);
      replay.rewindTo(0);
      expect(replay.board().storage).toEqual(initialStorage);
      expect(replay.board().assembly).toEqual([]);
    },
    E2E_TIMEOUT,
  );
});
