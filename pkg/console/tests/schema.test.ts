// Contract test: every request body the console can emit validates against
// the published mission/command JSON Schemas (the copies in ../schemas are
// pinned byte-for-byte to the service's own by the Python test suite).

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import Ajv from "ajv";
import { beforeAll, describe, expect, it } from "vitest";

import { ConsoleStore } from "../src/store.js";

const here = dirname(fileURLToPath(import.meta.url));

function loadSchema(name: string): object {
  return JSON.parse(readFileSync(join(here, "..", "schemas", name), "utf-8"));
}

const ajv = new Ajv({ allErrors: true, strict: false });
let validateMission: ReturnType<typeof ajv.compile>;
let validateCommand: ReturnType<typeof ajv.compile>;

beforeAll(() => {
  validateMission = ajv.compile(loadSchema("mission_request.schema.json"));
  validateCommand = ajv.compile(loadSchema("control_command.schema.json"));
});

function drawnSquareStore(): ConsoleStore {
  const store = new ConsoleStore(() => 0);
  store.beginDraft();
  store.addVertex(0, 0);
  store.addVertex(40, 0);
  store.addVertex(40, 40);
  store.addVertex(0, 40);
  expect(store.closePolygon()).toBe(true);
  return store;
}

describe("mission request bodies", () => {
  it("drawn square produces a schema-valid request", () => {
    const store = drawnSquareStore();
    const request = store.buildMissionRequest();
    const ok = validateMission(request);
    expect(validateMission.errors ?? []).toEqual([]);
    expect(ok).toBe(true);
  });

  it("request with constraints and full params validates", () => {
    const store = drawnSquareStore();
    store.addConstraintDraft({ point: [20, 20], distance: 5 });
    store.addConstraintDraft({
      region: [
        [5, 5],
        [10, 5],
        [10, 10],
      ],
      distance: 3,
    });
    store.setParams({
      fleetSize: 3,
      spacing: 15,
      dimensionality: "grid3d",
      layerSpacing: 10,
      timeScale: "as_fast_as_possible",
      duration: 900,
      pollutantCount: 12,
      commsLink: "acoustic",
      depthRange: [-2, -20],
    });
    const request = store.buildMissionRequest();
    const ok = validateMission(request);
    expect(validateMission.errors ?? []).toEqual([]);
    expect(ok).toBe(true);
  });

  it("bow-tie drafts cannot be built at all", () => {
    const store = new ConsoleStore(() => 0);
    store.beginDraft();
    store.addVertex(0, 0);
    store.addVertex(10, 10);
    store.addVertex(10, 0);
    store.addVertex(0, 10);
    expect(store.closePolygon()).toBe(false);
    expect(store.submittable).toBe(false);
    expect(() => store.buildMissionRequest()).toThrow();
  });
});

describe("command bodies", () => {
  it("all command kinds validate against the published schema", () => {
    const store = drawnSquareStore();
    const commands = [
      store.buildCommand("pause"),
      store.buildCommand("resume"),
      store.buildCommand("abort"),
      store.buildCommand("add_constraint", { point: [12, 8], distance: 6 }),
      store.buildCommand("retask", {
        polygon: [
          [0, 0],
          [20, 0],
          [20, 20],
        ],
        spacing: 8,
      }),
    ];
    for (const command of commands) {
      const ok = validateCommand(command);
      expect(validateCommand.errors ?? []).toEqual([]);
      expect(ok).toBe(true);
    }
  });

  it("schema rejects unknown command kinds (sanity of the negative case)", () => {
    expect(validateCommand({ kind: "warp" })).toBe(false);
  });
});
