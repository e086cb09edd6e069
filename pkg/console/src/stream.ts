// WebSocket telemetry subscription with reconnect-on-drop.
//
// The server always sends a current-state snapshot first, so reconnecting is
// safe: the console never renders stale state silently, it shows
// "reconnecting" until the next snapshot lands.

import type { TelemetryFrame } from "./types.js";

export type StreamStatus = "connecting" | "live" | "reconnecting" | "closed";

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface StreamHandlers {
  onFrame: (frame: TelemetryFrame) => void;
  onStatus?: (status: StreamStatus) => void;
}

const RECONNECT_DELAY_MS = 1000;

export class TelemetryStream {
  private socket: WebSocketLike | null = null;
  private stopped = false;
  private sawTerminal = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly handlers: StreamHandlers,
    private readonly factory: WebSocketFactory = (u) =>
      new WebSocket(u) as unknown as WebSocketLike,
  ) {}

  connect(): void {
    if (this.stopped) return;
    this.setStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => this.setStatus("live");
    socket.onmessage = (ev) => {
      const frame = JSON.parse(String(ev.data)) as TelemetryFrame;
      if (frame.terminal) this.sawTerminal = true;
      this.handlers.onFrame(frame);
    };
    socket.onerror = () => {
      /* onclose always follows */
    };
    socket.onclose = () => {
      if (this.stopped || this.sawTerminal) {
        this.setStatus("closed");
        return;
      }
      this.setStatus("reconnecting");
      this.timer = setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
    };
  }

  close(): void {
    this.stopped = true;
    if (this.timer) clearTimeout(this.timer);
    this.socket?.close();
    this.setStatus("closed");
  }

  private setStatus(status: StreamStatus): void {
    this.handlers.onStatus?.(status);
  }
}
