// Canvas renderer for one plate: a top-down stud grid shown one layer at
// a time, with the layer below ghosted, violation cells highlighted, and
// the pending selection previewed under the pointer.

import type { PlacementInfo } from "./types.js";
import { cssColor, footprintColumns } from "./types.js";

export interface BoardView {
  dims: [number, number, number];
  placements: PlacementInfo[];
  activeLayer: number;
  highlights: [number, number, number][];
  preview: { x: number; y: number; extent: [number, number] } | null;
}

const GRID_LINE = "#3c3c46";
const PLATE_FILL = "#26262e";
const HIGHLIGHT = "#ff3b30";
const PREVIEW = "#9fe870";

export class PlateBoard {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly paletteByName: Map<string, number>,
    private cellPx = 14,
  ) {
    const ctx = canvas.getContext("2d");
    if (ctx === null) {
      throw new Error("canvas 2d context unavailable");
    }
    this.ctx = ctx;
  }

  /** Grid cell under a pointer event, or null outside the plate. */
  cellAt(view: BoardView, clientX: number, clientY: number): [number, number] | null {
    const rect = this.canvas.getBoundingClientRect();
    const x = Math.floor((clientX - rect.left) / this.cellPx);
    const y = Math.floor((clientY - rect.top) / this.cellPx);
    if (x < 0 || y < 0 || x >= view.dims[0] || y >= view.dims[1]) {
      return null;
    }
    return [x, y];
  }

  render(view: BoardView): void {
    const [w, l] = view.dims;
    this.canvas.width = w * this.cellPx;
    this.canvas.height = l * this.cellPx;
    const ctx = this.ctx;
    ctx.fillStyle = PLATE_FILL;
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);

    // Layer below first (ghosted), then the active layer.
    this.drawLayer(view, view.activeLayer - 1, 0.35);
    this.drawLayer(view, view.activeLayer, 1.0);

    ctx.strokeStyle = GRID_LINE;
    ctx.lineWidth = 1;
    for (let x = 0; x <= w; x++) {
      ctx.beginPath();
      ctx.moveTo(x * this.cellPx + 0.5, 0);
      ctx.lineTo(x * this.cellPx + 0.5, l * this.cellPx);
      ctx.stroke();
    }
    for (let y = 0; y <= l; y++) {
      ctx.beginPath();
      ctx.moveTo(0, y * this.cellPx + 0.5);
      ctx.lineTo(w * this.cellPx, y * this.cellPx + 0.5);
      ctx.stroke();
    }

    for (const [hx, hy, hz] of view.highlights) {
      if (hz !== view.activeLayer) {
        continue;
      }
      ctx.strokeStyle = HIGHLIGHT;
      ctx.lineWidth = 2;
      ctx.strokeRect(
        hx * this.cellPx + 1.5,
        hy * this.cellPx + 1.5,
        this.cellPx - 3,
        this.cellPx - 3,
      );
    }

    if (view.preview !== null) {
      const { x, y, extent } = view.preview;
      ctx.strokeStyle = PREVIEW;
      ctx.lineWidth = 2;
      ctx.strokeRect(
        x * this.cellPx + 1,
        y * this.cellPx + 1,
        extent[0] * this.cellPx - 2,
        extent[1] * this.cellPx - 2,
      );
    }
  }

  private drawLayer(view: BoardView, layer: number, alpha: number): void {
    if (layer < 1) {
      return;
    }
    const ctx = this.ctx;
    ctx.globalAlpha = alpha;
    for (const placement of view.placements) {
      if (placement.z !== layer) {
        continue;
      }
      const rgb = this.paletteByName.get(placement.color) ?? 0x888888;
      ctx.fillStyle = cssColor(rgb);
      for (const [cx, cy] of footprintColumns(placement)) {
        ctx.fillRect(cx * this.cellPx, cy * this.cellPx, this.cellPx, this.cellPx);
      }
      // Stud dots make individual bricks readable.
      ctx.fillStyle = "rgba(255,255,255,0.25)";
      for (const [cx, cy] of footprintColumns(placement)) {
        ctx.beginPath();
        ctx.arc(
          cx * this.cellPx + this.cellPx / 2,
          cy * this.cellPx + this.cellPx / 2,
          this.cellPx / 5,
          0,
          Math.PI * 2,
        );
        ctx.fill();
      }
      ctx.fillStyle = cssColor(rgb);
    }
    ctx.globalAlpha = 1.0;
  }
}
