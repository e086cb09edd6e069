// Planar polygon checks used for inline draw validation.

import type { Point2 } from "./types.js";

const EPS = 1e-9;

function orient(a: Point2, b: Point2, c: Point2): number {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

function onSegment(a: Point2, b: Point2, p: Point2): boolean {
  return (
    Math.min(a[0], b[0]) - EPS <= p[0] &&
    p[0] <= Math.max(a[0], b[0]) + EPS &&
    Math.min(a[1], b[1]) - EPS <= p[1] &&
    p[1] <= Math.max(a[1], b[1]) + EPS
  );
}

export function segmentsIntersect(a: Point2, b: Point2, c: Point2, d: Point2): boolean {
  const o1 = orient(a, b, c);
  const o2 = orient(a, b, d);
  const o3 = orient(c, d, a);
  const o4 = orient(c, d, b);
  if (
    (o1 > 0) !== (o2 > 0) &&
    (o3 > 0) !== (o4 > 0) &&
    [o1, o2, o3, o4].every((o) => Math.abs(o) > EPS)
  ) {
    return true;
  }
  const touches: Array<[number, [Point2, Point2], Point2]> = [
    [o1, [a, b], c],
    [o2, [a, b], d],
    [o3, [c, d], a],
    [o4, [c, d], b],
  ];
  return touches.some(
    ([o, seg, p]) => Math.abs(o) <= EPS && onSegment(seg[0], seg[1], p),
  );
}

/** True when the closed ring over `vertices` has no degenerate edges and no
 * crossings between non-adjacent edges. */
export function polygonIsSimple(vertices: Point2[]): boolean {
  const n = vertices.length;
  if (n < 3) return false;
  const edges: Array<[Point2, Point2]> = vertices.map((v, i) => [
    v,
    vertices[(i + 1) % n],
  ]);
  for (const [a, b] of edges) {
    if (Math.hypot(b[0] - a[0], b[1] - a[1]) <= EPS) return false;
  }
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      if (j === i || (j + 1) % n === i || (i + 1) % n === j) continue;
      if (segmentsIntersect(edges[i][0], edges[i][1], edges[j][0], edges[j][1])) {
        return false;
      }
    }
  }
  return true;
}

/** Partial-draft check: do the open polyline's edges (plus the candidate
 * closing edge when `closing`) cross each other? */
export function draftSelfIntersects(vertices: Point2[], closing: boolean): boolean {
  if (vertices.length < 3) return false;
  if (closing) return !polygonIsSimple(vertices);
  const edges: Array<[Point2, Point2]> = [];
  for (let i = 0; i + 1 < vertices.length; i++) {
    edges.push([vertices[i], vertices[i + 1]]);
  }
  for (let i = 0; i < edges.length; i++) {
    for (let j = i + 2; j < edges.length; j++) {
      if (segmentsIntersect(edges[i][0], edges[i][1], edges[j][0], edges[j][1])) {
        return true;
      }
    }
  }
  return false;
}

export function polygonBounds(vertices: Point2[]): {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
} {
  const xs = vertices.map((p) => p[0]);
  const ys = vertices.map((p) => p[1]);
  return {
    minX: Math.min(...xs),
    minY: Math.min(...ys),
    maxX: Math.max(...xs),
    maxY: Math.max(...ys),
  };
}
