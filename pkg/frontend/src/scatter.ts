import { dataExtent, PlotTransform } from "./transform.js";
import type { DatasetJson } from "./types.js";

/** The slice of CanvasRenderingContext2D the renderer draws through. */
export interface Canvas2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textBaseline: CanvasTextBaseline;
  setTransform(a: number, b: number, c: number, d: number, e: number, f: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface CanvasLike {
  width: number;
  height: number;
  getContext(id: "2d"): Canvas2DLike | null;
}

export interface RenderOptions {
  width: number;
  height: number;
  markDiameter: number;
  legendWidth: number;
  showLegend: boolean;
}

export const DEFAULT_OPTIONS: RenderOptions = {
  width: 600,
  height: 600,
  markDiameter: 10,
  legendWidth: 120,
  showLegend: true,
};

const LEGEND_ROW = 22;
const LEGEND_SWATCH = 14;
const LEGEND_TOP = 16;
const PLACEHOLDER_STROKE = "#999999";

export interface LegendRow {
  name: string;
  color: string;
}

export interface BrushPx {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Everything one paint needs; colors come verbatim from the server. */
export interface Frame {
  dataset: DatasetJson | null;
  colors: string[] | null;
  emphasized: boolean[] | null;
  legend: LegendRow[] | null;
  background: string;
  brushPx: BrushPx | null;
}

export function emptyFrame(background = "#ffffff"): Frame {
  return { dataset: null, colors: null, emphasized: null, legend: null, background, brushPx: null };
}

/**
 * Canvas scatterplot with a clickable legend strip.
 *
 * Marks are painted in two passes, context first and emphasized second, so
 * selected classes sit on top of everything else. The renderer never maps
 * palettes itself: per-point colors are applied exactly as handed in.
 */
export class ScatterRenderer {
  private transformCache: PlotTransform | null = null;
  private datasetCache: DatasetJson | null = null;
  private legendCount = 0;

  constructor(
    private readonly canvas: CanvasLike,
    readonly options: RenderOptions = DEFAULT_OPTIONS,
    private readonly dpr: number = 1,
  ) {}

  get plotWidth(): number {
    return this.options.width;
  }

  get totalWidth(): number {
    return this.options.width + (this.options.showLegend ? this.options.legendWidth : 0);
  }

  /** The active data<->pixel mapping, or null before a dataset arrives. */
  transform(): PlotTransform | null {
    return this.transformCache;
  }

  render(frame: Frame): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    const { width, height, markDiameter } = this.options;
    const totalWidth = this.totalWidth;
    this.canvas.width = Math.round(totalWidth * this.dpr);
    this.canvas.height = Math.round(height * this.dpr);
    ctx.setTransform(this.dpr, 0, 0, this.dpr, 0, 0);
    ctx.fillStyle = frame.background;
    ctx.fillRect(0, 0, totalWidth, height);

    this.datasetCache = frame.dataset;
    this.legendCount = frame.legend?.length ?? 0;
    if (frame.dataset === null || frame.dataset.points.length === 0) {
      this.transformCache = null;
      ctx.fillStyle = PLACEHOLDER_STROKE;
      ctx.font = "14px sans-serif";
      ctx.textBaseline = "middle";
      ctx.fillText("upload or synthesize a dataset", 24, height / 2);
      return;
    }

    const r = markDiameter / 2;
    const t = new PlotTransform(dataExtent(frame.dataset.points), width, height, r + 2);
    this.transformCache = t;
    const pts = frame.dataset.points;

    if (frame.colors === null) {
      // placeholder marks before any palette exists: outlines only
      ctx.strokeStyle = PLACEHOLDER_STROKE;
      ctx.lineWidth = 1;
      for (const p of pts) {
        const [px, py] = t.toPx(p.x, p.y);
        ctx.beginPath();
        ctx.arc(px, py, r, 0, 2 * Math.PI);
        ctx.stroke();
      }
    } else {
      const emphasized = frame.emphasized ?? pts.map(() => false);
      for (const pass of [false, true]) {
        for (let i = 0; i < pts.length; i++) {
          if (emphasized[i] !== pass) continue;
          const [px, py] = t.toPx(pts[i].x, pts[i].y);
          ctx.fillStyle = frame.colors[i];
          ctx.beginPath();
          ctx.arc(px, py, r, 0, 2 * Math.PI);
          ctx.fill();
        }
      }
    }

    if (this.options.showLegend && frame.legend !== null) {
      ctx.font = "12px sans-serif";
      ctx.textBaseline = "middle";
      for (let k = 0; k < frame.legend.length; k++) {
        const y = LEGEND_TOP + k * LEGEND_ROW;
        ctx.fillStyle = frame.legend[k].color;
        ctx.fillRect(width + 12, y, LEGEND_SWATCH, LEGEND_SWATCH);
        ctx.fillStyle = "#444444";
        ctx.fillText(frame.legend[k].name, width + 12 + LEGEND_SWATCH + 6, y + LEGEND_SWATCH / 2);
      }
    }

    if (frame.brushPx !== null) {
      const b = frame.brushPx;
      ctx.strokeStyle = "#555555";
      ctx.lineWidth = 1;
      ctx.strokeRect(Math.min(b.x0, b.x1), Math.min(b.y0, b.y1), Math.abs(b.x1 - b.x0), Math.abs(b.y1 - b.y0));
    }
  }

  /** Index of the topmost point whose mark covers the pixel, else null. */
  pointHitTest(px: number, py: number): number | null {
    const t = this.transformCache;
    const ds = this.datasetCache;
    if (t === null || ds === null) return null;
    const r = this.options.markDiameter / 2 + 1;
    let hit: number | null = null;
    for (let i = 0; i < ds.points.length; i++) {
      const [cx, cy] = t.toPx(ds.points[i].x, ds.points[i].y);
      if ((px - cx) ** 2 + (py - cy) ** 2 <= r * r) hit = i;
    }
    return hit;
  }

  /** Class id of the legend swatch row under the pixel, else null. */
  legendHitTest(px: number, py: number): number | null {
    if (!this.options.showLegend || this.legendCount === 0) return null;
    const x0 = this.options.width + 12;
    if (px < x0 || px > this.options.width + this.options.legendWidth) return null;
    for (let k = 0; k < this.legendCount; k++) {
      const y = LEGEND_TOP + k * LEGEND_ROW;
      if (py >= y && py <= y + LEGEND_SWATCH) return k;
    }
    return null;
  }
}
