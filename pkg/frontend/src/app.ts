// DOM wiring: two plate boards, the timeline, the verdict banner, and the
// replay stepper. Keyboard: R rotates the picked brick, [ and ] change
// the working layer, arrow keys drive the replay.

import { StudioApi } from "./api.js";
import { PlateBoard } from "./board.js";
import { StudioViewModel } from "./model.js";
import { ReplayModel } from "./replay.js";
import type { BoardView } from "./board.js";
import type { PlacementInfo } from "./types.js";

export class StudioApp {
  private readonly model: StudioViewModel;
  private replay: ReplayModel | null = null;
  private storageBoard!: PlateBoard;
  private assemblyBoard!: PlateBoard;
  private hover: [number, number] | null = null;

  private root!: HTMLElement;
  private banner!: HTMLElement;
  private timelineList!: HTMLElement;
  private replayPanel!: HTMLElement;

  constructor(private readonly api: StudioApi) {
    this.model = new StudioViewModel(api);
  }

  async mount(root: HTMLElement): Promise<void> {
    this.root = root;
    await this.model.init();
    this.buildDom();
    const fromHash = window.location.hash.replace(/^#session=/, "");
    if (fromHash) {
      await this.model.attach(fromHash);
    } else {
      const sessionId = await this.model.createSession();
      window.location.hash = `session=${sessionId}`;
    }
    this.draw();
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <header>
        <h1>brick demonstration studio</h1>
        <div class="controls">
          <button id="new-session">new session</button>
          <button id="verify">verify in twin</button>
          <span id="layer-label"></span>
        </div>
      </header>
      <div id="banner" class="banner"></div>
      <main>
        <section>
          <h2>storage</h2>
          <canvas id="storage-board"></canvas>
        </section>
        <section>
          <h2>assembly</h2>
          <canvas id="assembly-board"></canvas>
        </section>
        <aside>
          <h2>timeline</h2>
          <ol id="timeline"></ol>
          <div id="replay-panel"></div>
        </aside>
      </main>
      <footer>pick a storage brick, press R to rotate, [ ] to change layer, click the assembly plate to place</footer>
    `;
    const palette = new Map(
      (this.model.catalog?.palette ?? []).map((p) => [p.name, p.rgb]),
    );
    this.banner = this.byId("banner");
    this.timelineList = this.byId("timeline");
    this.replayPanel = this.byId("replay-panel");
    const storageCanvas = this.byId<HTMLCanvasElement>("storage-board");
    const assemblyCanvas = this.byId<HTMLCanvasElement>("assembly-board");
    this.storageBoard = new PlateBoard(storageCanvas, palette);
    this.assemblyBoard = new PlateBoard(assemblyCanvas, palette);

    this.byId("new-session").addEventListener("click", () => {
      void this.model.createSession().then((sessionId) => {
        window.location.hash = `session=${sessionId}`;
        this.replay = null;
        this.draw();
      });
    });
    this.byId("verify").addEventListener("click", () => void this.onVerify());

    storageCanvas.addEventListener("click", (event) => this.onStorageClick(event));
    assemblyCanvas.addEventListener("click", (event) => void this.onAssemblyClick(event));
    assemblyCanvas.addEventListener("mousemove", (event) => {
      this.hover = this.assemblyBoard.cellAt(this.assemblyView(), event.clientX, event.clientY);
      this.draw();
    });
    assemblyCanvas.addEventListener("mouseleave", () => {
      this.hover = null;
      this.draw();
    });
    window.addEventListener("keydown", (event) => this.onKey(event));
  }

  private byId<T extends HTMLElement = HTMLElement>(id: string): T {
    const el = this.root.querySelector(`#${id}`);
    if (el === null) {
      throw new Error(`missing element #${id}`);
    }
    return el as T;
  }

  private onKey(event: KeyboardEvent): void {
    if (event.key === "r" || event.key === "R") {
      this.model.rotateSelection();
    } else if (event.key === "[") {
      this.model.setLayer(this.model.activeLayer - 1);
    } else if (event.key === "]") {
      this.model.setLayer(this.model.activeLayer + 1);
    } else if (event.key === "ArrowRight" && this.replay?.canForward()) {
      this.replay.forward();
    } else if (event.key === "ArrowLeft" && this.replay?.canBack()) {
      this.replay.back();
    } else {
      return;
    }
    this.draw();
  }

  private onStorageClick(event: MouseEvent): void {
    const view = this.storageView();
    const cell = this.storageBoard.cellAt(view, event.clientX, event.clientY);
    if (cell === null || this.model.state === null) {
      return;
    }
    const hit = this.model.state.storage.find((p) =>
      occupiesColumn(p, cell[0], cell[1]),
    );
    if (hit !== undefined) {
      this.model.select(hit.instance_id);
    } else {
      this.model.clearSelection();
    }
    this.draw();
  }

  private async onAssemblyClick(event: MouseEvent): Promise<void> {
    const cell = this.assemblyBoard.cellAt(this.assemblyView(), event.clientX, event.clientY);
    if (cell === null || this.model.selection === null) {
      return;
    }
    await this.model.place(cell[0], cell[1]);
    this.draw();
  }

  private async onVerify(): Promise<void> {
    try {
      const report = await this.model.verify();
      const graph = await this.api.getTaskgraph(this.model.sessionId);
      this.replay = new ReplayModel(
        this.model.state?.initial_storage ?? [],
        graph.data,
        report.forward,
        this.model.catalog?.types ?? [],
      );
    } catch (error) {
      this.banner.textContent = String(error);
      this.banner.className = "banner rejected";
      return;
    }
    this.draw();
  }

  private storageView(): BoardView {
    const replayBoard = this.replay?.board();
    return {
      dims: this.model.state?.dims ?? [48, 48, 16],
      placements: replayBoard ? replayBoard.storage : this.model.state?.storage ?? [],
      activeLayer: 1,
      highlights: [],
      preview: null,
    };
  }

  private assemblyView(): BoardView {
    const replayBoard = this.replay?.board();
    const extent = this.model.selectionExtent();
    return {
      dims: this.model.state?.dims ?? [48, 48, 16],
      placements: replayBoard ? replayBoard.assembly : this.model.state?.assembly ?? [],
      activeLayer: this.model.activeLayer,
      highlights: this.model.highlightCells(),
      preview:
        this.hover !== null && extent !== null && this.replay === null
          ? { x: this.hover[0], y: this.hover[1], extent }
          : null,
    };
  }

  private draw(): void {
    this.storageBoard.render(this.storageView());
    this.assemblyBoard.render(this.assemblyView());
    this.byId("layer-label").textContent =
      `layer ${this.model.activeLayer}` +
      (this.model.selection !== null
        ? ` | picked #${this.model.selection.instanceId} rot ${this.model.selection.rot}`
        : "");
    this.drawBanner();
    this.drawTimeline();
    this.drawReplay();
  }

  private drawBanner(): void {
    const verdict = this.model.lastVerdict;
    if (verdict === null) {
      this.banner.textContent = "";
      this.banner.className = "banner";
      return;
    }
    if (verdict.accepted) {
      this.banner.textContent = "placed";
      this.banner.className = "banner accepted";
    } else {
      const codes = verdict.violations.map((v) => v.code).join(", ");
      this.banner.textContent = `rejected: ${codes}`;
      this.banner.className = "banner rejected";
    }
  }

  private drawTimeline(): void {
    this.timelineList.innerHTML = "";
    for (const node of this.model.timeline) {
      const item = document.createElement("li");
      const [x, y, z] = node.assembly_pose;
      item.textContent = `${node.brick_type} → (${x}, ${y}, ${z})`;
      this.timelineList.appendChild(item);
    }
  }

  private drawReplay(): void {
    if (this.replay === null) {
      this.replayPanel.innerHTML = "";
      return;
    }
    const badges = this.replay
      .badges()
      .map((b) => {
        const ok = b.feasibility === "ok" && b.operability === "ok" && b.reachability === "ok";
        const label = ok ? "ok" : b.codes.join(",") || b.reachability;
        const active = b.index === this.replay!.cursor - 1 ? " active" : "";
        return `<span class="badge ${ok ? "good" : "bad"}${active}">${b.index}: ${label}</span>`;
      })
      .join(" ");
    this.replayPanel.innerHTML = `
      <h2>replay ${this.replay.cursor}/${this.replay.length}</h2>
      <div>
        <button id="replay-back" ${this.replay.canBack() ? "" : "disabled"}>&#8592;</button>
        <button id="replay-forward" ${this.replay.canForward() ? "" : "disabled"}>&#8594;</button>
        <button id="replay-exit">exit replay</button>
      </div>
      <div class="badges">${badges}</div>
    `;
    this.byId("replay-back").addEventListener("click", () => {
      this.replay?.back();
      this.draw();
    });
    this.byId("replay-forward").addEventListener("click", () => {
      this.replay?.forward();
      this.draw();
    });
    this.byId("replay-exit").addEventListener("click", () => {
      this.replay = null;
      this.draw();
    });
  }
}

function occupiesColumn(p: PlacementInfo, x: number, y: number): boolean {
  const fw = p.rot % 180 === 0 ? p.width : p.length;
  const fl = p.rot % 180 === 0 ? p.length : p.width;
  return x >= p.x && x < p.x + fw && y >= p.y && y < p.y + fl;
}
