import { describe, expect, it } from "vitest";

import {
  AXES,
  clampIndex,
  indexForAxis,
  pixelToVoxel,
  sliceCount,
  sliceSize,
  voxelToPixel,
} from "../src/state.js";
import type { Vec3 } from "../src/state.js";

const DIMS: Vec3 = [256, 256, 40];

describe("slice geometry", () => {
  it("slice counts follow the axis dimension", () => {
    expect(sliceCount(DIMS, "x")).toBe(256);
    expect(sliceCount(DIMS, "y")).toBe(256);
    expect(sliceCount(DIMS, "z")).toBe(40);
  });

  it("slice pixel sizes match the server orientation", () => {
    expect(sliceSize(DIMS, "z")).toEqual({ w: 256, h: 256 });
    expect(sliceSize(DIMS, "y")).toEqual({ w: 256, h: 40 });
    expect(sliceSize(DIMS, "x")).toEqual({ w: 256, h: 40 });
  });

  it("pixel to voxel per axis", () => {
    expect(pixelToVoxel("z", 7, 10, 20)).toEqual([10, 20, 7]);
    expect(pixelToVoxel("y", 7, 10, 20)).toEqual([10, 7, 20]);
    expect(pixelToVoxel("x", 7, 10, 20)).toEqual([7, 10, 20]);
  });

  it("voxelToPixel inverts pixelToVoxel on every axis", () => {
    for (const axis of AXES) {
      for (const [idx, px, py] of [
        [0, 0, 0],
        [7, 10, 20],
        [39, 255, 39],
      ] as const) {
        const voxel = pixelToVoxel(axis, idx, px, py);
        expect(voxelToPixel(axis, voxel)).toEqual({ px, py, slice: idx });
      }
    }
  });

  it("clamps slice indices to bounds", () => {
    expect(clampIndex(DIMS, "z", -3)).toBe(0);
    expect(clampIndex(DIMS, "z", 39)).toBe(39);
    expect(clampIndex(DIMS, "z", 40)).toBe(39);
    expect(clampIndex(DIMS, "x", 1000)).toBe(255);
  });

  it("axis switch recenters without a seed and follows the seed with one", () => {
    expect(indexForAxis(DIMS, "z", null)).toBe(20);
    expect(indexForAxis(DIMS, "x", null)).toBe(128);
    const seed: Vec3 = [12, 34, 9];
    expect(indexForAxis(DIMS, "z", seed)).toBe(9);
    expect(indexForAxis(DIMS, "y", seed)).toBe(34);
    expect(indexForAxis(DIMS, "x", seed)).toBe(12);
  });
});
