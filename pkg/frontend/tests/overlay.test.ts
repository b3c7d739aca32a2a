// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import {
  AUTO_COLOR,
  TRUTH_COLOR,
  polygonPoints,
  renderContours,
  renderSeed,
} from "../src/overlay.js";

function makeGroup(): SVGGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  const g = document.createElementNS("http://www.w3.org/2000/svg", "g");
  svg.appendChild(g);
  document.body.appendChild(svg);
  return g as SVGGElement;
}

describe("overlay rendering", () => {
  it("serializes loop coordinates verbatim", () => {
    expect(polygonPoints([[19.5, 40], [20, 40.5], [19.5, 41]])).toBe(
      "19.5,40 20,40.5 19.5,41",
    );
  });

  it("renders one polygon per loop with the requested color", () => {
    const g = makeGroup();
    renderContours(
      g,
      [
        [[0, 0.5], [0.5, 0]],
        [[3, 3.5], [3.5, 3], [3, 2.5]],
      ],
      "contour-auto",
      AUTO_COLOR,
    );
    const polys = g.querySelectorAll("polygon");
    expect(polys.length).toBe(2);
    expect(polys[0].getAttribute("points")).toBe("0,0.5 0.5,0");
    expect(polys[1].getAttribute("points")).toBe("3,3.5 3.5,3 3,2.5");
    for (const p of polys) {
      expect(p.getAttribute("stroke")).toBe(AUTO_COLOR);
      expect(p.getAttribute("fill")).toBe("none");
      expect(p.getAttribute("class")).toBe("contour-auto");
    }
  });

  it("rerendering replaces previous polygons", () => {
    const g = makeGroup();
    renderContours(g, [[[0, 0], [1, 1]]], "contour-truth", TRUTH_COLOR);
    renderContours(g, [], "contour-truth", TRUTH_COLOR);
    expect(g.querySelectorAll("polygon").length).toBe(0);
  });

  it("seed marker is a crosshair centered on the voxel pixel", () => {
    const g = makeGroup();
    renderSeed(g, 12, 34);
    const circle = g.querySelector("circle");
    expect(circle?.getAttribute("cx")).toBe("12");
    expect(circle?.getAttribute("cy")).toBe("34");
    expect(g.querySelectorAll("line").length).toBe(4);
    expect(g.querySelectorAll(".seed-marker").length).toBe(5);
  });
});
