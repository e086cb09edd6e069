// Typed client for the service's /v1 HTTP endpoints.

import type { ControlCommand, MissionCreated, MissionRequest } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly doFetch: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    const impl = fetchImpl ?? fetch;
    this.doFetch = (input, init) => impl(input, init);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.doFetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let parsed: unknown = undefined;
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = undefined;
      }
    }
    if (!response.ok) {
      const detail =
        parsed && typeof parsed === "object" && "error" in (parsed as object)
          ? String((parsed as { error: unknown }).error)
          : text || response.statusText;
      throw new ApiError(response.status, detail);
    }
    return parsed as T;
  }

  createMission(request: MissionRequest): Promise<MissionCreated> {
    return this.request("POST", "/v1/missions", request);
  }

  getMission(id: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/v1/missions/${id}`);
  }

  postCommand(
    id: string,
    command: ControlCommand,
  ): Promise<{ accepted: boolean; kind: string }> {
    return this.request("POST", `/v1/missions/${id}/commands`, command);
  }

  getReport(id: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/v1/missions/${id}/report`);
  }

  missionSchema(): Promise<Record<string, unknown>> {
    return this.request("GET", "/v1/schemas/mission_request.schema.json");
  }

  commandSchema(): Promise<Record<string, unknown>> {
    return this.request("GET", "/v1/schemas/control_command.schema.json");
  }

  streamUrl(id: string): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/v1/missions/${id}/stream`;
  }
}
