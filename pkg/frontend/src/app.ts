import { ApiClient, ApiError } from "./api.js";
import { SelectionState } from "./selection.js";
import type { Frame, ScatterRenderer } from "./scatter.js";
import type {
  ConstraintReportJson,
  DatasetJson,
  PairJson,
  RectJson,
  SavedEntry,
  SynthRequest,
  TraceSummaryJson,
} from "./types.js";

export interface StudioState {
  sessionId: string | null;
  dataset: DatasetJson | null;
  pair: PairJson | null;
  constraints: ConstraintReportJson | null;
  trace: TraceSummaryJson | null;
  selection: SelectionState;
  colors: string[] | null;
  emphasized: boolean[] | null;
  background: string;
  sigma: number;
  markSize: number;
  seed: number;
  saved: SavedEntry[];
  generating: boolean;
}

export interface StudioEvents {
  onToast(message: string): void;
  onChange?(state: StudioState): void;
}

interface QueuedToggle {
  kind: "class" | "point";
  id: number;
}

const BRUSH_DEBOUNCE_MS = 30;

/**
 * Controller for the four-panel studio.
 *
 * Every displayed per-point color comes verbatim from the last highlight
 * response; this class only decides when to ask the server and what
 * selection JSON to send. Highlight requests are serialized so responses
 * never apply out of order, and at most one generate runs per session;
 * legend and point clicks landing during a generate are queued and applied
 * once the new pair arrives.
 */
export class Studio {
  readonly state: StudioState = {
    sessionId: null,
    dataset: null,
    pair: null,
    constraints: null,
    trace: null,
    selection: SelectionState.none(),
    colors: null,
    emphasized: null,
    background: "#ffffff",
    sigma: 0.05,
    markSize: 10,
    seed: 0,
    saved: [],
    generating: false,
  };

  private brush: { x0: number; y0: number; x1: number; y1: number } | null = null;
  private brushTimer: ReturnType<typeof setTimeout> | null = null;
  private queuedToggles: QueuedToggle[] = [];
  private highlightChain: Promise<void> = Promise.resolve();

  constructor(
    private readonly api: ApiClient,
    private readonly renderer: ScatterRenderer,
    private readonly events: StudioEvents,
    private readonly debounceMs: number = BRUSH_DEBOUNCE_MS,
  ) {}

  private notify(): void {
    this.render();
    this.events.onChange?.(this.state);
  }

  private toastError(err: unknown): void {
    const message = err instanceof ApiError ? err.message : err instanceof Error ? err.message : String(err);
    this.events.onToast(message);
  }

  private frame(): Frame {
    const s = this.state;
    return {
      dataset: s.dataset,
      colors: s.colors,
      emphasized: s.emphasized,
      legend:
        s.pair !== null && s.dataset !== null
          ? s.dataset.classNames.map((name, k) => ({ name, color: s.pair!.salient[k] }))
          : null,
      background: s.background,
      brushPx: this.brush,
    };
  }

  render(): void {
    this.renderer.render(this.frame());
  }

  // ----- control panel -------------------------------------------------

  async uploadDataset(body: string | { synth: SynthRequest }): Promise<void> {
    try {
      const summary =
        this.state.sessionId === null
          ? await this.api.createSession(body)
          : await this.api.replaceDataset(this.state.sessionId, body);
      this.state.sessionId = summary.id;
      this.state.dataset = summary.dataset;
      // the server dropped the pair with the old dataset
      this.state.pair = null;
      this.state.constraints = null;
      this.state.trace = null;
      this.state.colors = null;
      this.state.emphasized = null;
      this.state.selection = SelectionState.none();
      this.notify();
    } catch (err) {
      this.toastError(err);
    }
  }

  async synthDataset(classes: number, profile: string, seed: number): Promise<void> {
    await this.uploadDataset({ synth: { classes, profile, seed } });
  }

  /** Repaint on the new background; colors stay until the next generate. */
  setBackground(hex: string): void {
    this.state.background = hex;
    this.notify();
  }

  setSigma(value: number): void {
    this.state.sigma = value;
  }

  setMarkSize(value: number): void {
    this.state.markSize = value;
    this.renderer.options.markDiameter = value;
    this.notify();
  }

  setSeed(value: number): void {
    this.state.seed = value;
  }

  async regenerate(): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null) {
      this.events.onToast("upload a dataset first");
      return;
    }
    if (this.state.generating) return;
    this.state.generating = true;
    this.events.onChange?.(this.state);
    try {
      const resp = await this.api.generatePalette(sid, {
        seed: this.state.seed,
        background: this.state.background,
        sigma: this.state.sigma,
        markSize: this.state.markSize,
      });
      this.state.pair = resp.pair;
      this.state.constraints = resp.constraints;
      this.state.trace = resp.trace;
      for (const t of this.queuedToggles.splice(0)) {
        this.state.selection =
          t.kind === "class" ? this.state.selection.toggleClass(t.id) : this.state.selection.togglePoint(t.id);
      }
      await this.refreshHighlight();
    } catch (err) {
      this.toastError(err);
    } finally {
      this.state.generating = false;
      this.notify();
    }
  }

  // ----- selection flow -------------------------------------------------

  /** Ask the server to resolve the current selection and adopt its echo. */
  private refreshHighlight(): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null || this.state.pair === null) {
      this.state.colors = null;
      this.state.emphasized = null;
      this.notify();
      return Promise.resolve();
    }
    return this.enqueueHighlight(() => this.api.highlight(sid, this.state.selection.toJson()));
  }

  private enqueueHighlight(send: () => Promise<import("./types.js").HighlightResponse>): Promise<void> {
    const step = this.highlightChain.then(async () => {
      try {
        const resp = await send();
        this.state.selection = SelectionState.fromJson(resp.selection);
        this.state.colors = resp.colors;
        this.state.emphasized = resp.emphasized;
        this.notify();
      } catch (err) {
        this.toastError(err);
      }
    });
    this.highlightChain = step;
    return step;
  }

  async legendClick(classId: number): Promise<void> {
    const m = this.state.dataset?.classNames.length;
    if (m === undefined || classId < 0 || classId >= m) return;
    if (this.state.generating) {
      this.queuedToggles.push({ kind: "class", id: classId });
      return;
    }
    if (this.state.pair === null) {
      this.events.onToast("generate a palette first");
      return;
    }
    this.state.selection = this.state.selection.toggleClass(classId, m);
    await this.refreshHighlight();
  }

  async pointClick(pointIndex: number): Promise<void> {
    const n = this.state.dataset?.points.length;
    if (n === undefined || pointIndex < 0 || pointIndex >= n) return;
    if (this.state.generating) {
      this.queuedToggles.push({ kind: "point", id: pointIndex });
      return;
    }
    if (this.state.pair === null) {
      this.events.onToast("generate a palette first");
      return;
    }
    this.state.selection = this.state.selection.togglePoint(pointIndex, n);
    await this.refreshHighlight();
  }

  async clearSelection(): Promise<void> {
    this.state.selection = SelectionState.none();
    await this.refreshHighlight();
  }

  // ----- canvas interaction ---------------------------------------------

  /** Mouse down: legend rows toggle classes, the plot area starts a brush. */
  canvasDown(px: number, py: number): void {
    const legendClass = this.renderer.legendHitTest(px, py);
    if (legendClass !== null) {
      void this.legendClick(legendClass);
      return;
    }
    if (this.state.pair === null) return;
    this.brush = { x0: px, y0: py, x1: px, y1: py };
    this.render();
  }

  canvasMove(px: number, py: number): void {
    if (this.brush === null) return;
    this.brush.x1 = px;
    this.brush.y1 = py;
    this.render();
    // one highlight per debounce window, always with the freshest rectangle
    if (this.brushTimer === null) {
      this.brushTimer = setTimeout(() => {
        this.brushTimer = null;
        if (this.brush !== null) void this.sendBrush();
      }, this.debounceMs);
    }
  }

  async canvasUp(px: number, py: number): Promise<void> {
    if (this.brush === null) return;
    if (this.brushTimer !== null) {
      clearTimeout(this.brushTimer);
      this.brushTimer = null;
    }
    this.brush.x1 = px;
    this.brush.y1 = py;
    const b = this.brush;
    if (b.x0 === b.x1 && b.y0 === b.y1) {
      // click-release: a mark toggles that point, empty space clears
      this.brush = null;
      const hit = this.renderer.pointHitTest(px, py);
      if (hit !== null) {
        await this.pointClick(hit);
      } else {
        await this.sendBrushRect(this.pxRect(b));
      }
      return;
    }
    const rect = this.pxRect(b);
    this.brush = null;
    await this.sendBrushRect(rect);
  }

  private pxRect(b: { x0: number; y0: number; x1: number; y1: number }): RectJson | null {
    const t = this.renderer.transform();
    if (t === null) return null;
    return t.rectToData(b.x0, b.y0, b.x1, b.y1);
  }

  private sendBrush(): Promise<void> {
    const b = this.brush;
    if (b === null) return Promise.resolve();
    return this.sendBrushRect(this.pxRect(b));
  }

  private sendBrushRect(rect: RectJson | null): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null || this.state.pair === null || rect === null) return Promise.resolve();
    return this.enqueueHighlight(() => this.api.highlightBrush(sid, rect));
  }

  // ----- history panel ---------------------------------------------------

  async saveScheme(name?: string): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null || this.state.pair === null) {
      this.events.onToast("nothing to save yet");
      return;
    }
    try {
      await this.api.saveScheme(sid, name);
      await this.refreshSaved();
    } catch (err) {
      this.toastError(err);
    }
  }

  async refreshSaved(): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null) return;
    try {
      this.state.saved = await this.api.listSaved(sid);
      this.events.onChange?.(this.state);
    } catch (err) {
      this.toastError(err);
    }
  }

  async restoreScheme(index: number): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null) return;
    try {
      const resp = await this.api.restoreScheme(sid, index);
      this.state.pair = resp.pair;
      this.state.constraints = null;
      this.state.trace = null;
      await this.refreshHighlight();
    } catch (err) {
      this.toastError(err);
    }
  }
}
