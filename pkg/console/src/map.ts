// Top-down canvas map: draft outline, planned strips, AUV markers with
// battery bars, detection totals, and constraint circles. A depth-layer
// selector filters which strips are highlighted; markers interpolate at
// render rate between 1 Hz frames, clamped so the cosmetic motion never
// runs past the last confirmed frame.

import { polygonBounds } from "./geometry.js";
import type { StoreState } from "./store.js";
import type { AuvTelemetry, Point2, TelemetryFrame } from "./types.js";

export const STATUS_COLORS: Record<string, string> = {
  surveying: "#2e9e4f",
  returning: "#e09c24",
  charging: "#2f7fd0",
  lost: "#d03030",
};

export const MATERIAL_COLORS: Record<string, string> = {
  PAPERBOARD: "#caa472",
  HDPE: "#8fd3e8",
  PET: "#4db6ac",
  ALUMINIUM: "#c0c8d0",
  CERAMIC: "#e8e0c8",
  WOOD: "#9a6b3f",
};

export interface OverlayToggles {
  coverage: boolean;
  detections: boolean;
  tracks: boolean;
  commsLinks: boolean;
}

export const DEFAULT_OVERLAYS: OverlayToggles = {
  coverage: true,
  detections: true,
  tracks: false,
  commsLinks: false,
};

export const FRAME_INTERVAL_MS = 1000;

export interface MarkerPosition {
  id: string;
  x: number;
  y: number;
  z: number;
  status: string;
  battery: number;
}

/** Linear interpolation between the previous and last frames, with the
 * parameter clamped to [0, 1]: rendering never extrapolates beyond the
 * last confirmed frame's positions. */
export function interpolateMarkers(
  previous: TelemetryFrame | null,
  last: TelemetryFrame | null,
  wallSinceLastMs: number,
  frameIntervalMs: number = FRAME_INTERVAL_MS,
): MarkerPosition[] {
  if (!last) return [];
  const t = Math.max(0, Math.min(1, wallSinceLastMs / frameIntervalMs));
  const prevById = new Map<string, AuvTelemetry>();
  if (previous) for (const auv of previous.auvs) prevById.set(auv.id, auv);
  return last.auvs.map((auv) => {
    const prev = prevById.get(auv.id);
    const from = prev ? prev.position : auv.position;
    return {
      id: auv.id,
      x: from[0] + (auv.position[0] - from[0]) * t,
      y: from[1] + (auv.position[1] - from[1]) * t,
      z: from[2] + (auv.position[2] - from[2]) * t,
      status: auv.status,
      battery: auv.battery_fraction,
    };
  });
}

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitViewport(
  vertices: Point2[],
  width: number,
  height: number,
  margin = 40,
): Viewport {
  if (vertices.length === 0) return { scale: 2, offsetX: width / 2, offsetY: height / 2 };
  const b = polygonBounds(vertices);
  const spanX = Math.max(b.maxX - b.minX, 1);
  const spanY = Math.max(b.maxY - b.minY, 1);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  return {
    scale,
    offsetX: margin - b.minX * scale,
    offsetY: height - margin + b.minY * scale,
  };
}

export function worldToScreen(v: Viewport, x: number, y: number): [number, number] {
  return [v.offsetX + x * v.scale, v.offsetY - y * v.scale];
}

export function screenToWorld(v: Viewport, px: number, py: number): [number, number] {
  return [(px - v.offsetX) / v.scale, (v.offsetY - py) / v.scale];
}

export class CanvasMap {
  private viewport: Viewport = { scale: 2, offsetX: 40, offsetY: 560 };
  depthLayer: number | null = null; // null = all layers
  overlays: OverlayToggles = { ...DEFAULT_OVERLAYS };

  constructor(private readonly canvas: HTMLCanvasElement) {}

  fitTo(vertices: Point2[]): void {
    this.viewport = fitViewport(vertices, this.canvas.width, this.canvas.height);
  }

  toWorld(px: number, py: number): [number, number] {
    return screenToWorld(this.viewport, px, py);
  }

  render(state: StoreState, nowMs: number): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#0b2540";
    ctx.fillRect(0, 0, width, height);

    const polygon = state.draft.vertices;
    if (polygon.length > 0) this.drawPolygon(ctx, polygon, state.draft.closed);
    for (const constraint of state.draft.constraints) {
      if (constraint.point) this.drawCircle(ctx, constraint.point, constraint.distance);
    }
    if (this.overlays.coverage && state.planSummary) this.drawCoverage(ctx, state);
    if (state.planSummary) this.drawStrips(ctx, state);
    if (this.overlays.tracks) this.drawTracks(ctx, state);
    if (this.overlays.detections) this.drawDetections(ctx, state);
    const since = state.lastFrameAt === null ? 0 : nowMs - state.lastFrameAt;
    const markers = interpolateMarkers(state.previousFrame, state.lastFrame, since);
    if (this.overlays.commsLinks && state.planSummary?.comms_range) {
      this.drawCommsLinks(ctx, markers, state.planSummary.comms_range);
    }
    for (const marker of markers) this.drawMarker(ctx, marker);
  }

  /** Swath-wide translucent bands along each AUV's surveyed track: the
   * coverage heat overlay, derived purely from received positions. */
  private drawCoverage(ctx: CanvasRenderingContext2D, state: StoreState): void {
    const swath = state.planSummary!.swath_width * this.viewport.scale;
    ctx.strokeStyle = "rgba(72, 150, 120, 0.25)";
    ctx.lineWidth = Math.max(swath, 2);
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    for (const track of state.tracks.values()) {
      if (track.length < 2) continue;
      ctx.beginPath();
      track.forEach(([x, y], i) => {
        const [px, py] = worldToScreen(this.viewport, x, y);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
    }
    ctx.lineCap = "butt";
    ctx.lineWidth = 1;
  }

  private drawTracks(ctx: CanvasRenderingContext2D, state: StoreState): void {
    ctx.strokeStyle = "rgba(255, 255, 255, 0.5)";
    ctx.lineWidth = 1;
    for (const track of state.tracks.values()) {
      if (track.length < 2) continue;
      ctx.beginPath();
      track.forEach(([x, y], i) => {
        const [px, py] = worldToScreen(this.viewport, x, y);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
    }
  }

  private drawDetections(ctx: CanvasRenderingContext2D, state: StoreState): void {
    ctx.font = "9px sans-serif";
    for (const pin of state.detections.values()) {
      if (this.depthLayer !== null && Math.abs(pin.position[2] - this.depthLayer) > 0.5) {
        continue;
      }
      const label = pin.predicted ?? pin.material;
      const [px, py] = worldToScreen(this.viewport, pin.position[0], pin.position[1]);
      ctx.fillStyle = MATERIAL_COLORS[label] ?? "#ffffff";
      ctx.beginPath();
      ctx.moveTo(px, py);
      ctx.lineTo(px - 3, py - 7);
      ctx.lineTo(px + 3, py - 7);
      ctx.closePath();
      ctx.fill();
      if (pin.predicted) ctx.fillText(pin.predicted.toLowerCase(), px + 4, py - 4);
    }
  }

  private drawCommsLinks(
    ctx: CanvasRenderingContext2D,
    markers: MarkerPosition[],
    range: number,
  ): void {
    ctx.strokeStyle = "rgba(127, 208, 255, 0.6)";
    ctx.setLineDash([3, 3]);
    for (let i = 0; i < markers.length; i++) {
      for (let j = i + 1; j < markers.length; j++) {
        const a = markers[i];
        const b = markers[j];
        const d = Math.hypot(a.x - b.x, a.y - b.y, a.z - b.z);
        if (d > range) continue;
        const [ax, ay] = worldToScreen(this.viewport, a.x, a.y);
        const [bx, by] = worldToScreen(this.viewport, b.x, b.y);
        ctx.beginPath();
        ctx.moveTo(ax, ay);
        ctx.lineTo(bx, by);
        ctx.stroke();
      }
    }
    ctx.setLineDash([]);
  }

  private drawPolygon(
    ctx: CanvasRenderingContext2D,
    vertices: Point2[],
    closed: boolean,
  ): void {
    ctx.strokeStyle = closed ? "#7fd0ff" : "#d0d0d0";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    vertices.forEach((v, i) => {
      const [px, py] = worldToScreen(this.viewport, v[0], v[1]);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    if (closed) ctx.closePath();
    ctx.stroke();
    for (const v of vertices) {
      const [px, py] = worldToScreen(this.viewport, v[0], v[1]);
      ctx.fillStyle = "#ffffff";
      ctx.fillRect(px - 2, py - 2, 4, 4);
    }
  }

  private drawCircle(ctx: CanvasRenderingContext2D, center: Point2, radius: number): void {
    const [px, py] = worldToScreen(this.viewport, center[0], center[1]);
    ctx.strokeStyle = "#e05050";
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.arc(px, py, radius * this.viewport.scale, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  private drawStrips(ctx: CanvasRenderingContext2D, state: StoreState): void {
    const removed = new Set(state.removedStrips);
    for (const strip of state.planSummary!.strip_geometry) {
      if (this.depthLayer !== null && strip.start[2] !== this.depthLayer) continue;
      const [ax, ay] = worldToScreen(this.viewport, strip.start[0], strip.start[1]);
      const [bx, by] = worldToScreen(this.viewport, strip.end[0], strip.end[1]);
      const isRemoved = removed.has(strip.index);
      ctx.strokeStyle = isRemoved ? "#d03030" : "#3c6e91";
      ctx.setLineDash(isRemoved ? [2, 4] : []);
      ctx.lineWidth = isRemoved ? 1 : 2;
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  private drawMarker(ctx: CanvasRenderingContext2D, marker: MarkerPosition): void {
    const [px, py] = worldToScreen(this.viewport, marker.x, marker.y);
    ctx.fillStyle = STATUS_COLORS[marker.status] ?? "#cccccc";
    ctx.beginPath();
    ctx.arc(px, py, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.stroke();
    // battery bar
    ctx.fillStyle = "#20323f";
    ctx.fillRect(px - 10, py - 14, 20, 4);
    ctx.fillStyle = marker.battery > 0.25 ? "#5fd06a" : "#e06060";
    ctx.fillRect(px - 10, py - 14, 20 * marker.battery, 4);
    ctx.fillStyle = "#ffffff";
    ctx.font = "10px sans-serif";
    ctx.fillText(marker.id, px + 8, py + 4);
  }
}
