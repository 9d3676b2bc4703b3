/** DOM wiring: file pickers, the light-drag canvas overlay, and sliders.
 *
 * Every interaction funnels into one latest-wins scheduler; the <img> is
 * only ever replaced with bytes that came back from the render service.
 */

import { fetchRenderBlob, renderUrl, SceneFiles, uploadScene } from "./api.js";
import { LightDirection, pointerToLight } from "./light.js";
import { defaultParams, setX0, setX1, toQuery, ViewerParams } from "./params.js";
import { LatestWins } from "./scheduler.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const state: {
  params: ViewerParams;
  light: LightDirection | null;
  sceneId: string | null;
  objectUrl: string | null;
} = { params: defaultParams(), light: null, sceneId: null, objectUrl: null };

const statusLine = $("status") as HTMLParagraphElement;
const viewImg = $("view") as HTMLImageElement;

function setStatus(text: string, isError = false): void {
  statusLine.textContent = text;
  statusLine.className = isError ? "error" : "";
}

const scheduler = new LatestWins<Blob>(
  async (query) => {
    if (!state.sceneId) throw new Error("no scene loaded");
    const base = ($("service-url") as HTMLInputElement).value;
    const t0 = performance.now();
    const blob = await fetchRenderBlob(renderUrl(base, state.sceneId, query));
    setStatus(`rendered in ${(performance.now() - t0).toFixed(0)} ms`);
    return blob;
  },
  (blob) => {
    if (state.objectUrl) URL.revokeObjectURL(state.objectUrl);
    state.objectUrl = URL.createObjectURL(blob);
    viewImg.src = state.objectUrl;
  },
  (err) => setStatus(String(err), true),
);

function requestRender(): void {
  if (!state.sceneId) return;
  scheduler.request(toQuery(state.params, state.light));
}

function fileOf(id: string): File | undefined {
  return ($(id) as HTMLInputElement).files?.[0] ?? undefined;
}

async function loadScene(): Promise<void> {
  const required = { shape: fileOf("f-shape"), i0: fileOf("f-i0"), i1: fileOf("f-i1"), env: fileOf("f-env"), bg: fileOf("f-bg") };
  for (const [key, file] of Object.entries(required)) {
    if (!file) {
      setStatus(`select a file for '${key}' first`, true);
      return;
    }
  }
  const files: SceneFiles = {
    ...(required as { shape: File; i0: File; i1: File; env: File; bg: File }),
    ks: fileOf("f-ks"),
    spec_color: fileOf("f-spec"),
  };
  const kind = ($("shape-kind") as HTMLSelectElement).value as "normalmap" | "depthmap";
  try {
    setStatus("uploading scene...");
    const base = ($("service-url") as HTMLInputElement).value;
    const info = await uploadScene(base, kind, files);
    state.sceneId = info.sceneId;
    setStatus(`scene ${info.sceneId} (${info.width}x${info.height}) loaded`);
    requestRender();
  } catch (err) {
    setStatus(String(err), true);
  }
}

function bindSlider(id: string, apply: (value: number) => void): void {
  const input = $(id) as HTMLInputElement;
  const readout = document.getElementById(`${id}-value`);
  const update = () => {
    const v = parseFloat(input.value);
    apply(v);
    if (readout) readout.textContent = input.value;
    requestRender();
  };
  input.addEventListener("input", update);
  if (readout) readout.textContent = input.value;
}

function bindSelect(id: string, apply: (value: string) => void): void {
  const sel = $(id) as HTMLSelectElement;
  sel.addEventListener("change", () => {
    apply(sel.value);
    syncModeVisibility();
    requestRender();
  });
}

function syncModeVisibility(): void {
  $("eta-row").style.display = state.params.refractionMode === "physical" ? "" : "none";
  $("mu-row").style.display = state.params.refractionMode === "artistic" ? "" : "none";
  const mode = state.params.fresnelMode;
  $("fixedf-row").style.display = mode === "fixed" ? "" : "none";
  for (const id of ["x0-row", "x1-row", "blend-row"]) {
    $(id).style.display = mode === "artistic" ? "" : "none";
  }
  $("shadow-rows").style.display = state.params.shadow ? "" : "none";
}

function wireLightDrag(): void {
  const overlay = $("light-pad") as HTMLDivElement;
  const move = (ev: PointerEvent) => {
    const rect = overlay.getBoundingClientRect();
    const u = (ev.clientX - rect.left) / rect.width;
    const v = (ev.clientY - rect.top) / rect.height;
    state.light = pointerToLight(Math.min(Math.max(u, 0), 1), Math.min(Math.max(v, 0), 1), state.params.elevation);
    $("light-value").textContent =
      `(${state.light.lx.toFixed(2)}, ${state.light.ly.toFixed(2)}, ${state.light.lz.toFixed(2)})`;
    requestRender();
  };
  let dragging = false;
  overlay.addEventListener("pointerdown", (ev) => {
    dragging = true;
    overlay.setPointerCapture(ev.pointerId);
    move(ev);
  });
  overlay.addEventListener("pointermove", (ev) => {
    if (dragging) move(ev);
  });
  overlay.addEventListener("pointerup", () => {
    dragging = false;
  });
}

function wireControls(): void {
  const p = state.params;
  bindSlider("t0", (v) => (p.t0 = Math.min(v, p.t1)));
  bindSlider("t1", (v) => (p.t1 = Math.max(v, p.t0)));
  bindSelect("step", (v) => (p.step = v as ViewerParams["step"]));
  ($("shadow") as HTMLInputElement).addEventListener("change", (ev) => {
    p.shadow = (ev.target as HTMLInputElement).checked;
    syncModeVisibility();
    requestRender();
  });
  bindSlider("shadow-d", (v) => {
    p.shadowD = v;
    p.shadowA = Math.min(p.shadowA, v / 2);
  });
  bindSlider("shadow-a", (v) => (p.shadowA = Math.min(v, p.shadowD / 2)));
  bindSelect("refraction-mode", (v) => (p.refractionMode = v as ViewerParams["refractionMode"]));
  bindSlider("eta", (v) => (p.eta = v));
  bindSlider("mu", (v) => (p.mu = v));
  bindSelect("fresnel-mode", (v) => (p.fresnelMode = v as ViewerParams["fresnelMode"]));
  bindSlider("fixed-f", (v) => (p.fixedF = v));
  bindSlider("x0", (v) => {
    setX0(p, v);
    ($("x0") as HTMLInputElement).value = String(p.x0);
  });
  bindSlider("x1", (v) => {
    setX1(p, v);
    ($("x1") as HTMLInputElement).value = String(p.x1);
  });
  bindSlider("blend", (v) => (p.blend = v));
  bindSlider("env-blur", (v) => (p.envBlur = v));
  bindSlider("bg-blur", (v) => (p.bgBlur = v));
  bindSlider("elevation", (v) => (p.elevation = v));
  $("load-scene").addEventListener("click", () => void loadScene());
  wireLightDrag();
  syncModeVisibility();
}

wireControls();
setStatus("pick the scene images, then Load");
