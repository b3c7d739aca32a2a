/** SVG overlay rendering: contour loops and the seed marker.
 *  Contour coordinates are used verbatim so the drawn geometry is exactly
 *  what the server returned. */

import type { ContourLoops } from "./api.js";

export const AUTO_COLOR = "#e53935";
export const TRUTH_COLOR = "#fdd835";
export const SEED_COLOR = "#1e88e5";

const SVG_NS = "http://www.w3.org/2000/svg";

/** SVG points attribute for one implicitly closed loop. */
export function polygonPoints(loop: number[][]): string {
  return loop.map((p) => `${p[0]},${p[1]}`).join(" ");
}

export function clearGroup(group: SVGGElement): void {
  while (group.firstChild) group.removeChild(group.firstChild);
}

/** Replace a group's content with one <polygon> per loop. */
export function renderContours(
  group: SVGGElement,
  loops: ContourLoops,
  className: string,
  color: string,
): void {
  clearGroup(group);
  const doc = group.ownerDocument;
  for (const loop of loops) {
    const poly = doc.createElementNS(SVG_NS, "polygon");
    poly.setAttribute("points", polygonPoints(loop));
    poly.setAttribute("fill", "none");
    poly.setAttribute("stroke", color);
    poly.setAttribute("stroke-width", "0.3");
    poly.setAttribute("class", className);
    group.appendChild(poly);
  }
}

/** Replace a group's content with the seed marker (crosshair circle). */
export function renderSeed(group: SVGGElement, px: number, py: number): void {
  clearGroup(group);
  const doc = group.ownerDocument;
  const circle = doc.createElementNS(SVG_NS, "circle");
  circle.setAttribute("cx", String(px));
  circle.setAttribute("cy", String(py));
  circle.setAttribute("r", "1.2");
  circle.setAttribute("fill", "none");
  circle.setAttribute("stroke", SEED_COLOR);
  circle.setAttribute("stroke-width", "0.35");
  circle.setAttribute("class", "seed-marker");
  group.appendChild(circle);
  for (const [x1, y1, x2, y2] of [
    [px - 2.2, py, px - 1.4, py],
    [px + 1.4, py, px + 2.2, py],
    [px, py - 2.2, px, py - 1.4],
    [px, py + 1.4, px, py + 2.2],
  ]) {
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(x1));
    line.setAttribute("y1", String(y1));
    line.setAttribute("x2", String(x2));
    line.setAttribute("y2", String(y2));
    line.setAttribute("stroke", SEED_COLOR);
    line.setAttribute("stroke-width", "0.35");
    line.setAttribute("class", "seed-marker");
    group.appendChild(line);
  }
}
