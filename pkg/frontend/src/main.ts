import { ApiClient } from "./api.js";
import { Studio } from "./app.js";
import { ScatterRenderer, DEFAULT_OPTIONS } from "./scatter.js";
import { historyRows, paletteRows, statusLine } from "./viewmodel.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function showToast(message: string): void {
  const host = el<HTMLDivElement>("toasts");
  const toast = document.createElement("div");
  toast.className = "toast";
  toast.textContent = message;
  host.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}

function main(): void {
  const canvas = el<HTMLCanvasElement>("plot");
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("server") ?? "http://127.0.0.1:8765");
  const renderer = new ScatterRenderer(canvas, { ...DEFAULT_OPTIONS }, window.devicePixelRatio || 1);
  canvas.style.width = `${renderer.totalWidth}px`;
  canvas.style.height = `${renderer.options.height}px`;

  const studio = new Studio(api, renderer, {
    onToast: showToast,
    onChange: (state) => {
      const palette = el<HTMLDivElement>("palette-rows");
      palette.replaceChildren(
        ...paletteRows(state.pair, state.dataset?.classNames ?? null).map((row, k) => {
          const item = document.createElement("div");
          item.className = "swatch-row";
          const pairBox = document.createElement("div");
          pairBox.className = "swatch-pair";
          for (const hex of [row.salient, row.faint]) {
            const sw = document.createElement("div");
            sw.className = "swatch";
            sw.style.background = hex;
            sw.title = hex;
            pairBox.appendChild(sw);
          }
          const label = document.createElement("span");
          label.textContent = `${row.name}  ${row.salient} / ${row.faint}`;
          item.append(pairBox, label);
          item.addEventListener("click", () => void studio.legendClick(k));
          return item;
        }),
      );
      const history = el<HTMLDivElement>("history-rows");
      history.replaceChildren(
        ...historyRows(state.saved).map((row) => {
          const item = document.createElement("div");
          item.className = "history-row";
          const strip = document.createElement("div");
          strip.className = "swatch-pair";
          for (const hex of row.swatches) {
            const sw = document.createElement("div");
            sw.className = "swatch small";
            sw.style.background = hex;
            strip.appendChild(sw);
          }
          const label = document.createElement("span");
          label.textContent = row.name;
          item.append(strip, label);
          item.addEventListener("click", () => void studio.restoreScheme(row.index));
          return item;
        }),
      );
      el<HTMLSpanElement>("status").textContent = state.generating
        ? "generating..."
        : statusLine(state.trace, state.constraints);
      el<HTMLButtonElement>("regenerate").disabled = state.generating;
    },
  });

  studio.render();

  const mousePos = (ev: MouseEvent): [number, number] => {
    const box = canvas.getBoundingClientRect();
    return [ev.clientX - box.left, ev.clientY - box.top];
  };
  canvas.addEventListener("mousedown", (ev) => studio.canvasDown(...mousePos(ev)));
  canvas.addEventListener("mousemove", (ev) => studio.canvasMove(...mousePos(ev)));
  canvas.addEventListener("mouseup", (ev) => void studio.canvasUp(...mousePos(ev)));

  el<HTMLButtonElement>("synth").addEventListener("click", () => {
    void studio
      .synthDataset(
        Number(el<HTMLInputElement>("classes").value),
        el<HTMLSelectElement>("profile").value,
        Number(el<HTMLInputElement>("data-seed").value),
      )
      .then(() => studio.regenerate());
  });
  el<HTMLInputElement>("file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file === undefined) return;
    await studio.uploadDataset(await file.text());
    input.value = "";
  });
  el<HTMLInputElement>("background").addEventListener("input", (ev) => {
    studio.setBackground((ev.target as HTMLInputElement).value);
  });
  el<HTMLInputElement>("sigma").addEventListener("input", (ev) => {
    studio.setSigma(Number((ev.target as HTMLInputElement).value));
  });
  el<HTMLInputElement>("mark-size").addEventListener("input", (ev) => {
    studio.setMarkSize(Number((ev.target as HTMLInputElement).value));
  });
  el<HTMLInputElement>("seed").addEventListener("input", (ev) => {
    studio.setSeed(Number((ev.target as HTMLInputElement).value));
  });
  el<HTMLButtonElement>("regenerate").addEventListener("click", () => void studio.regenerate());
  el<HTMLButtonElement>("save").addEventListener("click", () => {
    const name = el<HTMLInputElement>("scheme-name").value.trim();
    void studio.saveScheme(name === "" ? undefined : name);
  });
  el<HTMLButtonElement>("clear").addEventListener("click", () => void studio.clearSelection());
}

main();
