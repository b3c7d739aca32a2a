/** Viewer state and the pixel/voxel geometry shared with the server.
 *
 *  Slice orientation contract (must match the service):
 *    z slice k: rows are y, columns are x
 *    y slice j: rows are z, columns are x
 *    x slice i: rows are z, columns are y
 *  Pixel (px, py) has its center at integer coordinates; contour vertices
 *  arrive on half-integer pixel edges.
 */

import type { Axis } from "./api.js";

export type Vec3 = [number, number, number];

export interface SegParamsState {
  delta_r: number;
  subdiv: number;
  samples: number;
  radius_mm: number;
}

export interface ViewerState {
  axis: Axis;
  index: number;
  window: [number, number];
  seed: Vec3 | null;
  params: SegParamsState;
  resultId: number | null;
  showAuto: boolean;
  showTruth: boolean;
}

export const DEFAULT_PARAMS: SegParamsState = {
  delta_r: 1,
  subdiv: 3,
  samples: 60,
  radius_mm: 50,
};

export const AXES: Axis[] = ["x", "y", "z"];

/** Number of slices along the viewing axis. */
export function sliceCount(dims: Vec3, axis: Axis): number {
  return axis === "x" ? dims[0] : axis === "y" ? dims[1] : dims[2];
}

/** Pixel width/height of a slice image for the given axis. */
export function sliceSize(dims: Vec3, axis: Axis): { w: number; h: number } {
  if (axis === "z") return { w: dims[0], h: dims[1] };
  if (axis === "y") return { w: dims[0], h: dims[2] };
  return { w: dims[1], h: dims[2] };
}

/** Map a slice pixel to the voxel index it displays. */
export function pixelToVoxel(axis: Axis, index: number, px: number, py: number): Vec3 {
  if (axis === "z") return [px, py, index];
  if (axis === "y") return [px, index, py];
  return [index, px, py];
}

/** Where a voxel lands on a slice view: pixel position plus the slice index
 *  along the axis that must be displayed for the voxel to be visible. */
export function voxelToPixel(
  axis: Axis,
  voxel: Vec3,
): { px: number; py: number; slice: number } {
  if (axis === "z") return { px: voxel[0], py: voxel[1], slice: voxel[2] };
  if (axis === "y") return { px: voxel[0], py: voxel[2], slice: voxel[1] };
  return { px: voxel[1], py: voxel[2], slice: voxel[0] };
}

export function clampIndex(dims: Vec3, axis: Axis, index: number): number {
  const n = sliceCount(dims, axis);
  return Math.min(Math.max(index, 0), n - 1);
}

/** Step the slice index, clamped to the volume bounds. */
export function stepSlice(state: ViewerState, dims: Vec3, delta: number): number {
  return clampIndex(dims, state.axis, state.index + delta);
}

/** Axis switch keeps the seed in view when one is set, else recenters. */
export function indexForAxis(dims: Vec3, axis: Axis, seed: Vec3 | null): number {
  if (seed) return voxelToPixel(axis, seed).slice;
  return sliceCount(dims, axis) >> 1;
}

export const KEY_AXIS: Record<string, Axis> = {
  a: "z", // axial
  s: "x", // sagittal
  c: "y", // coronal
};
