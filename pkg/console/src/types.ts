// Wire types mirroring the service's /v1 JSON contracts (snake_case fields).

export type Point2 = [number, number];

export interface AreaSpec {
  polygon: Point2[];
  depth_range?: [number, number];
}

export interface ConstraintSpec {
  kind?: "min_standoff";
  point?: Point2;
  region?: Point2[];
  distance: number;
}

export interface MissionRequest {
  name?: string;
  area: AreaSpec;
  constraints?: ConstraintSpec[];
  fleet_size: number;
  spacing: number;
  dimensionality?: "belt" | "grid3d";
  layer_spacing?: number;
  swath_width?: number;
  seed: number;
  time_scale?: number | "as_fast_as_possible";
  duration?: number;
  pollutant_count?: number;
  comms_link?: string;
  medium?: "air" | "water";
  luminosity?: "ambient" | "darkness";
}

export type ControlCommand =
  | { kind: "pause" }
  | { kind: "resume" }
  | { kind: "abort" }
  | {
      kind: "retask";
      area: AreaSpec;
      spacing: number;
      dimensionality?: "belt" | "grid3d";
      layer_spacing?: number;
    }
  | { kind: "add_constraint"; constraint: ConstraintSpec };

export type AuvStatus = "surveying" | "returning" | "charging" | "lost";

export interface AuvTelemetry {
  id: string;
  position: [number, number, number];
  battery_fraction: number;
  status: AuvStatus;
}

export interface SimEventRecord {
  seq: number;
  time: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface TelemetryFrame {
  mission_id: string;
  sim_time: number;
  paused: boolean;
  terminal: boolean;
  snapshot?: boolean;
  events: SimEventRecord[];
  auvs: AuvTelemetry[];
  coverage_fraction: number;
  detections_by_material: Record<string, number>;
}

export interface StripGeometry {
  index: number;
  start: [number, number, number];
  end: [number, number, number];
}

export interface PlanSummary {
  strips: number;
  spacing: number;
  swath_width: number;
  dimensionality: string;
  comms_range: number | null;
  depth_layers: number[];
  strip_geometry: StripGeometry[];
}

export interface DetectionPin {
  item: string;
  position: [number, number, number];
  material: string; // true material from DETECTION
  predicted: string | null; // filled when CLASSIFIED arrives
}

export interface MissionCreated {
  id: string;
  plan_summary: PlanSummary;
}
