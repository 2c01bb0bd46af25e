import type { DatasetPoint, RectJson } from "./types.js";

export interface Extent {
  xLo: number;
  xSpan: number;
  yLo: number;
  ySpan: number;
}

/** Data bounding box; a degenerate axis gets span 1 so it stays drawable. */
export function dataExtent(points: DatasetPoint[]): Extent {
  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const p of points) {
    if (p.x < xLo) xLo = p.x;
    if (p.x > xHi) xHi = p.x;
    if (p.y < yLo) yLo = p.y;
    if (p.y > yHi) yHi = p.y;
  }
  return {
    xLo,
    xSpan: xHi > xLo ? xHi - xLo : 1.0,
    yLo,
    ySpan: yHi > yLo ? yHi - yLo : 1.0,
  };
}

/**
 * Data <-> plot-pixel mapping with the y axis flipped so larger y draws
 * higher. pad keeps full marks inside the plot area.
 */
export class PlotTransform {
  constructor(
    readonly extent: Extent,
    readonly width: number,
    readonly height: number,
    readonly pad: number,
  ) {}

  toPx(x: number, y: number): [number, number] {
    const px = this.pad + ((x - this.extent.xLo) / this.extent.xSpan) * (this.width - 2 * this.pad);
    const py =
      this.height - this.pad - ((y - this.extent.yLo) / this.extent.ySpan) * (this.height - 2 * this.pad);
    return [px, py];
  }

  toData(px: number, py: number): [number, number] {
    const x = this.extent.xLo + ((px - this.pad) * this.extent.xSpan) / (this.width - 2 * this.pad);
    const y = this.extent.yLo + ((this.height - this.pad - py) * this.extent.ySpan) / (this.height - 2 * this.pad);
    return [x, y];
  }

  /** Pixel drag corners to the server's data-space rectangle. */
  rectToData(x0: number, y0: number, x1: number, y1: number): RectJson {
    const [ax, ay] = this.toData(x0, y0);
    const [bx, by] = this.toData(x1, y1);
    return {
      xMin: Math.min(ax, bx),
      yMin: Math.min(ay, by),
      xMax: Math.max(ax, bx),
      yMax: Math.max(ay, by),
    };
  }
}
