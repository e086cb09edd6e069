// DOM wiring for the operator console single-page app.

import { ApiClient, ApiError } from "./api.js";
import { CanvasMap, FRAME_INTERVAL_MS } from "./map.js";
import { ConsoleStore } from "./store.js";
import { TelemetryStream } from "./stream.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const api = new ApiClient(window.location.origin.replace(/\/$/, ""));
  const store = new ConsoleStore();
  const canvas = el<HTMLCanvasElement>("map");
  const map = new CanvasMap(canvas);
  let stream: TelemetryStream | null = null;
  let constraintMode = false;

  const statusBadge = el<HTMLSpanElement>("stream-status");
  const simTime = el<HTMLSpanElement>("sim-time");
  const coverage = el<HTMLSpanElement>("coverage");
  const detections = el<HTMLSpanElement>("detections");
  const warning = el<HTMLDivElement>("draft-warning");
  const toasts = el<HTMLDivElement>("toasts");
  const submitButton = el<HTMLButtonElement>("submit");

  function showToast(level: string, message: string): void {
    const node = document.createElement("div");
    node.className = `toast ${level}`;
    node.textContent = message;
    toasts.appendChild(node);
    setTimeout(() => node.remove(), 6000);
  }

  store.subscribe((state) => {
    submitButton.disabled = !store.submittable;
    warning.textContent = state.draft.warning ?? "";
    statusBadge.textContent = state.streamStatus;
    statusBadge.className = `badge ${state.streamStatus}`;
    const frame = state.lastFrame;
    if (frame) {
      simTime.textContent = `${frame.sim_time.toFixed(1)} s${frame.paused ? " (paused)" : ""}`;
      coverage.textContent = `${(frame.coverage_fraction * 100).toFixed(1)}%`;
      const total = Object.values(frame.detections_by_material).reduce(
        (a, b) => a + b,
        0,
      );
      detections.textContent = String(total);
    }
    const lastToast = state.toasts[state.toasts.length - 1];
    if (lastToast && !lastToast.message.startsWith("__shown__")) {
      showToast(lastToast.level, lastToast.message);
      lastToast.message = `__shown__${lastToast.message}`;
    }
  });

  canvas.addEventListener("click", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const [x, y] = map.toWorld(ev.clientX - rect.left, ev.clientY - rect.top);
    if (constraintMode && store.state.missionId) {
      const distance = Number(el<HTMLInputElement>("standoff-distance").value) || 5;
      const command = store.buildCommand("add_constraint", {
        point: [x, y],
        distance,
      });
      store.issueCommand(api, command).catch(() => undefined);
      constraintMode = false;
      return;
    }
    if (store.state.phase === "idle") store.beginDraft();
    store.addVertex(Math.round(x * 10) / 10, Math.round(y * 10) / 10);
  });

  canvas.addEventListener("dblclick", (ev) => {
    ev.preventDefault();
    store.closePolygon();
  });

  el<HTMLButtonElement>("new-mission").addEventListener("click", () => {
    store.beginDraft();
    map.fitTo([
      [0, 0],
      [100, 100],
    ]);
  });

  submitButton.addEventListener("click", async () => {
    store.setParams({
      fleetSize: Number(el<HTMLInputElement>("fleet-size").value) || 2,
      spacing: Number(el<HTMLInputElement>("spacing").value) || 10,
      seed: Number(el<HTMLInputElement>("seed").value) || 1,
      timeScale: Number(el<HTMLInputElement>("time-scale").value) || 20,
      commsLink: el<HTMLInputElement>("comms-link").value || undefined,
    });
    try {
      const id = await store.submit(api);
      map.fitTo(store.state.draft.vertices);
      stream?.close();
      stream = new TelemetryStream(
        api.streamUrl(id),
        {
          onFrame: (frame) => store.applyFrame(frame),
          onStatus: (status) => store.setStreamStatus(status),
        },
      );
      stream.connect();
    } catch (err) {
      if (err instanceof ApiError) showToast("error", `${err.status}: ${err.message}`);
    }
  });

  for (const kind of ["pause", "resume"] as const) {
    el<HTMLButtonElement>(`cmd-${kind}`).addEventListener("click", () => {
      store.issueCommand(api, store.buildCommand(kind)).catch(() => undefined);
    });
  }
  el<HTMLButtonElement>("cmd-abort").addEventListener("click", () => {
    if (window.confirm("Abort the mission and recall all AUVs?")) {
      store.issueCommand(api, store.buildCommand("abort")).catch(() => undefined);
    }
  });
  el<HTMLButtonElement>("cmd-constraint").addEventListener("click", () => {
    constraintMode = true;
    showToast("info", "click the map to place the standoff center");
  });

  const layerSelect = el<HTMLSelectElement>("depth-layer");
  layerSelect.addEventListener("change", () => {
    map.depthLayer = layerSelect.value === "" ? null : Number(layerSelect.value);
  });
  store.subscribe((state) => {
    const layers = state.planSummary?.depth_layers ?? [];
    if (layerSelect.options.length !== layers.length + 1) {
      layerSelect.innerHTML = '<option value="">all layers</option>';
      for (const z of layers) {
        const option = document.createElement("option");
        option.value = String(z);
        option.textContent = `${z} m`;
        layerSelect.appendChild(option);
      }
    }
  });
  const toggleIds: Array<[string, keyof typeof map.overlays]> = [
    ["ov-coverage", "coverage"],
    ["ov-detections", "detections"],
    ["ov-tracks", "tracks"],
    ["ov-links", "commsLinks"],
  ];
  for (const [id, key] of toggleIds) {
    const box = el<HTMLInputElement>(id);
    box.addEventListener("change", () => {
      map.overlays[key] = box.checked;
    });
  }

  function renderLoop(): void {
    map.render(store.state, Date.now());
    requestAnimationFrame(renderLoop);
  }
  map.fitTo([
    [0, 0],
    [100, 100],
  ]);
  renderLoop();
  void FRAME_INTERVAL_MS;
}

window.addEventListener("DOMContentLoaded", main);
