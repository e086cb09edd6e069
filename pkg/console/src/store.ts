// Single UI store: mission drafting, live telemetry state, command tracking.
//
// All live state is server-derived: frames are applied verbatim and commands
// stay "pending" until the matching COMMAND_APPLIED event arrives on the
// stream. The only client-side motion is the cosmetic marker interpolation
// in map.ts, which never runs past the last confirmed frame.

import { draftSelfIntersects, polygonIsSimple } from "./geometry.js";
import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type {
  ConstraintSpec,
  ControlCommand,
  DetectionPin,
  MissionRequest,
  PlanSummary,
  Point2,
  TelemetryFrame,
} from "./types.js";

export type Phase = "idle" | "drafting" | "submitting" | "live" | "terminal";

export interface PlanParams {
  fleetSize: number;
  spacing: number;
  dimensionality: "belt" | "grid3d";
  layerSpacing?: number;
  seed: number;
  timeScale: number | "as_fast_as_possible";
  duration?: number;
  pollutantCount?: number;
  commsLink?: string;
  depthRange: [number, number];
}

export interface DraftState {
  vertices: Point2[];
  closed: boolean;
  selfIntersecting: boolean;
  constraints: ConstraintSpec[];
  warning: string | null;
}

export interface PendingCommand {
  kind: ControlCommand["kind"];
  issuedAt: number;
}

export interface Toast {
  level: "info" | "error";
  message: string;
}

export interface StoreState {
  phase: Phase;
  draft: DraftState;
  params: PlanParams;
  missionId: string | null;
  planSummary: PlanSummary | null;
  lastFrame: TelemetryFrame | null;
  previousFrame: TelemetryFrame | null;
  lastFrameAt: number | null; // wall-clock ms when lastFrame arrived
  removedStrips: number[];
  pendingCommands: PendingCommand[];
  appliedCommands: string[];
  detections: Map<string, DetectionPin>; // item id -> pin, from stream events
  tracks: Map<string, Array<[number, number, number]>>; // auv id -> positions
  streamStatus: string;
  toasts: Toast[];
}

const DEFAULT_PARAMS: PlanParams = {
  fleetSize: 2,
  spacing: 10,
  dimensionality: "belt",
  seed: 1,
  timeScale: 20,
  depthRange: [-2, -2],
};

function emptyDraft(): DraftState {
  return {
    vertices: [],
    closed: false,
    selfIntersecting: false,
    constraints: [],
    warning: null,
  };
}

export class ConsoleStore {
  state: StoreState = {
    phase: "idle",
    draft: emptyDraft(),
    params: { ...DEFAULT_PARAMS },
    missionId: null,
    planSummary: null,
    lastFrame: null,
    previousFrame: null,
    lastFrameAt: null,
    removedStrips: [],
    pendingCommands: [],
    appliedCommands: [],
    detections: new Map(),
    tracks: new Map(),
    streamStatus: "closed",
    toasts: [],
  };

  private listeners: Array<(state: StoreState) => void> = [];
  private now: () => number;

  constructor(now: () => number = () => Date.now()) {
    this.now = now;
  }

  subscribe(listener: (state: StoreState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  toast(level: Toast["level"], message: string): void {
    this.state.toasts.push({ level, message });
    this.emit();
  }

  // -- area drawing --------------------------------------------------------

  beginDraft(): void {
    this.state.phase = "drafting";
    this.state.draft = emptyDraft();
    this.emit();
  }

  addVertex(x: number, y: number): void {
    const draft = this.state.draft;
    if (this.state.phase !== "drafting" || draft.closed) return;
    draft.vertices.push([x, y]);
    draft.selfIntersecting = draftSelfIntersects(draft.vertices, false);
    draft.warning = draft.selfIntersecting
      ? "polygon edges cross; adjust the outline"
      : null;
    this.emit();
  }

  /** Double-click handler: closes the ring when it is valid. */
  closePolygon(): boolean {
    const draft = this.state.draft;
    if (this.state.phase !== "drafting" || draft.closed) return false;
    if (draft.vertices.length < 3) {
      draft.warning = "need at least 3 vertices";
      this.emit();
      return false;
    }
    if (!polygonIsSimple(draft.vertices)) {
      draft.selfIntersecting = true;
      draft.warning = "polygon is self-intersecting; cannot close";
      this.emit();
      return false;
    }
    draft.closed = true;
    draft.selfIntersecting = false;
    draft.warning = null;
    this.emit();
    return true;
  }

  addConstraintDraft(constraint: ConstraintSpec): void {
    this.state.draft.constraints.push(constraint);
    this.emit();
  }

  setParams(params: Partial<PlanParams>): void {
    this.state.params = { ...this.state.params, ...params };
    this.emit();
  }

  get submittable(): boolean {
    const draft = this.state.draft;
    return (
      this.state.phase === "drafting" &&
      draft.closed &&
      !draft.selfIntersecting &&
      draft.vertices.length >= 3
    );
  }

  /** The exact POST /v1/missions body; field names match the published schema. */
  buildMissionRequest(): MissionRequest {
    if (!this.submittable) {
      throw new Error("draft is not submittable");
    }
    const { params, draft } = this.state;
    const request: MissionRequest = {
      area: {
        polygon: draft.vertices.map((v) => [v[0], v[1]]),
        depth_range: [...params.depthRange],
      },
      fleet_size: params.fleetSize,
      spacing: params.spacing,
      dimensionality: params.dimensionality,
      seed: params.seed,
      time_scale: params.timeScale,
    };
    if (draft.constraints.length > 0) request.constraints = draft.constraints;
    if (params.dimensionality === "grid3d" && params.layerSpacing !== undefined) {
      request.layer_spacing = params.layerSpacing;
    }
    if (params.duration !== undefined) request.duration = params.duration;
    if (params.pollutantCount !== undefined) {
      request.pollutant_count = params.pollutantCount;
    }
    if (params.commsLink !== undefined) request.comms_link = params.commsLink;
    return request;
  }

  async submit(api: ApiClient): Promise<string> {
    const request = this.buildMissionRequest();
    this.state.phase = "submitting";
    this.emit();
    try {
      const created = await api.createMission(request);
      this.state.missionId = created.id;
      this.state.planSummary = created.plan_summary;
      this.state.phase = "live";
      this.emit();
      return created.id;
    } catch (err) {
      this.state.phase = "drafting";
      this.state.draft.warning = err instanceof Error ? err.message : String(err);
      this.emit();
      throw err;
    }
  }

  // -- live state ------------------------------------------------------------

  setStreamStatus(status: string): void {
    this.state.streamStatus = status;
    this.emit();
  }

  applyFrame(frame: TelemetryFrame): void {
    this.state.previousFrame = this.state.lastFrame;
    this.state.lastFrame = frame;
    this.state.lastFrameAt = this.now();
    for (const auv of frame.auvs) {
      const track = this.state.tracks.get(auv.id) ?? [];
      const last = track[track.length - 1];
      if (!last || last[0] !== auv.position[0] || last[1] !== auv.position[1]) {
        track.push([...auv.position]);
      }
      this.state.tracks.set(auv.id, track);
    }
    for (const event of frame.events ?? []) {
      if (event.kind === "DETECTION") {
        const item = String(event.payload["item"]);
        this.state.detections.set(item, {
          item,
          position: event.payload["position"] as [number, number, number],
          material: String(event.payload["material"]),
          predicted: null,
        });
      } else if (event.kind === "CLASSIFIED") {
        const pin = this.state.detections.get(String(event.payload["item"]));
        if (pin) pin.predicted = String(event.payload["predicted"]);
      } else if (event.kind === "COMMAND_APPLIED") {
        const kind = String(event.payload["kind"]);
        this.state.appliedCommands.push(kind);
        const i = this.state.pendingCommands.findIndex((p) => p.kind === kind);
        if (i >= 0) this.state.pendingCommands.splice(i, 1);
        if (kind === "add_constraint") {
          const removed = event.payload["removed_strips"];
          if (Array.isArray(removed)) {
            this.state.removedStrips.push(...(removed as number[]));
          }
        }
      }
    }
    if (frame.terminal) {
      this.state.phase = "terminal";
      this.state.pendingCommands = [];
    }
    this.emit();
  }

  // -- commands ----------------------------------------------------------------

  buildCommand(kind: "pause" | "resume" | "abort"): ControlCommand;
  buildCommand(kind: "add_constraint", extra: ConstraintSpec): ControlCommand;
  buildCommand(
    kind: "retask",
    extra: { polygon: Point2[]; spacing: number },
  ): ControlCommand;
  buildCommand(kind: ControlCommand["kind"], extra?: unknown): ControlCommand {
    switch (kind) {
      case "pause":
      case "resume":
      case "abort":
        return { kind };
      case "add_constraint":
        return { kind, constraint: extra as ConstraintSpec };
      case "retask": {
        const { polygon, spacing } = extra as { polygon: Point2[]; spacing: number };
        return { kind, area: { polygon }, spacing };
      }
    }
  }

  async issueCommand(api: ApiClient, command: ControlCommand): Promise<void> {
    if (!this.state.missionId) throw new Error("no mission");
    // no optimistic UI: mark pending, let COMMAND_APPLIED resolve it
    this.state.pendingCommands.push({ kind: command.kind, issuedAt: this.now() });
    this.emit();
    try {
      await api.postCommand(this.state.missionId, command);
    } catch (err) {
      this.state.pendingCommands = this.state.pendingCommands.filter(
        (p) => p.kind !== command.kind,
      );
      const message =
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
      this.toast("error", message);
      throw err;
    }
  }
}
