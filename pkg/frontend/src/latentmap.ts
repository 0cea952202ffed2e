/** SVG latent-map view: density layer, data points with overlay coloring,
 * group clouds and a click-to-pick crosshair.
 *
 * All numbers shown to the user come straight from API fields; this module
 * only does geometry (data <-> pixel scaling).
 */

import type { LatentMapResponse, OverlayMode } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export const DEFAULT_VIEWPORT: Viewport = { width: 640, height: 460, margin: 36 };

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  apply(v: number): number {
    return this.r0 + ((v - this.d0) / (this.d1 - this.d0)) * (this.r1 - this.r0);
  }

  invert(px: number): number {
    return this.d0 + ((px - this.r0) / (this.r1 - this.r0)) * (this.d1 - this.d0);
  }
}

export function scalesFor(map: LatentMapResponse, vp: Viewport): { x: LinearScale; y: LinearScale } {
  const z1 = map.density.z1;
  const z2 = map.density.z2;
  return {
    x: new LinearScale(z1[0], z1[z1.length - 1], vp.margin, vp.width - vp.margin),
    // screen y grows downward
    y: new LinearScale(z2[0], z2[z2.length - 1], vp.height - vp.margin, vp.margin),
  };
}

/** Density at the grid cell nearest to z (pure lookup in the API grid). */
export function densityAt(map: LatentMapResponse, z: [number, number]): number {
  const { z1, z2, values } = map.density;
  const nearest = (grid: number[], v: number): number => {
    let best = 0;
    for (let i = 1; i < grid.length; i++) {
      if (Math.abs(grid[i] - v) < Math.abs(grid[best] - v)) best = i;
    }
    return best;
  };
  return values[nearest(z2, z[1])][nearest(z1, z[0])];
}

export function isLowDensity(map: LatentMapResponse, z: [number, number]): boolean {
  return densityAt(map, z) < map.density.low_density_threshold;
}

const PHASE_COLORS = ["#e07b39", "#3572b0"]; // multi-phase, single-phase
const GROUP_COLORS: Record<string, string> = {
  noble: "#b8860b",
  refractory: "#6a3d9a",
  magnetic: "#d62728",
};

function elementCountColor(n: number): string {
  if (n <= 2) return "#c7cdd6";
  if (n === 3) return "#9fb8d8";
  if (n === 4) return "#5e8fc7";
  if (n === 5) return "#2f6bb0";
  return "#174a85";
}

export interface LatentMapView {
  svg: SVGSVGElement;
  setOverlay(mode: OverlayMode): void;
  setMarker(z: [number, number] | null): void;
  pixelOf(z: [number, number]): [number, number];
}

export function renderLatentMap(
  container: HTMLElement,
  map: LatentMapResponse,
  onPick: (z: [number, number]) => void,
  vp: Viewport = DEFAULT_VIEWPORT,
): LatentMapView {
  const { x, y } = scalesFor(map, vp);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(vp.width));
  svg.setAttribute("height", String(vp.height));
  svg.setAttribute("viewBox", `0 0 ${vp.width} ${vp.height}`);
  svg.setAttribute("class", "latent-map");

  const densityLayer = document.createElementNS(SVG_NS, "g");
  densityLayer.setAttribute("class", "density-layer");
  const { z1, z2, values } = map.density;
  let maxDensity = 0;
  for (const row of values) for (const v of row) maxDensity = Math.max(maxDensity, v);
  const cellW = Math.abs(x.apply(z1[1]) - x.apply(z1[0]));
  const cellH = Math.abs(y.apply(z2[1]) - y.apply(z2[0]));
  for (let i = 0; i < z2.length; i++) {
    for (let j = 0; j < z1.length; j++) {
      const v = values[i][j];
      if (v <= maxDensity * 0.01) continue;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(x.apply(z1[j]) - cellW / 2));
      rect.setAttribute("y", String(y.apply(z2[i]) - cellH / 2));
      rect.setAttribute("width", String(cellW));
      rect.setAttribute("height", String(cellH));
      rect.setAttribute("fill", "#2f6bb0");
      rect.setAttribute("fill-opacity", String(0.85 * (v / maxDensity)));
      densityLayer.appendChild(rect);
    }
  }
  svg.appendChild(densityLayer);

  const pointLayer = document.createElementNS(SVG_NS, "g");
  pointLayer.setAttribute("class", "point-layer");
  for (const p of map.points) {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("cx", String(x.apply(p.z[0])));
    c.setAttribute("cy", String(y.apply(p.z[1])));
    c.setAttribute("r", "3");
    c.setAttribute("data-label", String(p.label));
    c.setAttribute("data-n-elements", String(p.n_elements));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${p.formula} | label ${p.label} | p ${p.probability}`;
    c.appendChild(title);
    pointLayer.appendChild(c);
  }
  svg.appendChild(pointLayer);

  const groupLayer = document.createElementNS(SVG_NS, "g");
  groupLayer.setAttribute("class", "group-layer");
  for (const [name, cloud] of Object.entries(map.groups)) {
    const color = GROUP_COLORS[name] ?? "#444";
    for (const z of cloud) {
      const m = document.createElementNS(SVG_NS, "circle");
      m.setAttribute("cx", String(x.apply(z[0])));
      m.setAttribute("cy", String(y.apply(z[1])));
      m.setAttribute("r", "4");
      m.setAttribute("fill", "none");
      m.setAttribute("stroke", color);
      m.setAttribute("stroke-width", "1.6");
      m.setAttribute("data-group", name);
      groupLayer.appendChild(m);
    }
  }
  svg.appendChild(groupLayer);

  const marker = document.createElementNS(SVG_NS, "g");
  marker.setAttribute("class", "marker");
  marker.setAttribute("visibility", "hidden");
  const mh = document.createElementNS(SVG_NS, "line");
  const mv = document.createElementNS(SVG_NS, "line");
  for (const line of [mh, mv]) {
    line.setAttribute("stroke", "#111");
    line.setAttribute("stroke-width", "1.4");
    marker.appendChild(line);
  }
  svg.appendChild(marker);

  svg.addEventListener("click", (ev: MouseEvent) => {
    const rect = svg.getBoundingClientRect();
    const px = ev.clientX - rect.left;
    const py = ev.clientY - rect.top;
    onPick([x.invert(px), y.invert(py)]);
  });

  container.appendChild(svg);

  const view: LatentMapView = {
    svg,
    pixelOf(z) {
      return [x.apply(z[0]), y.apply(z[1])];
    },
    setMarker(z) {
      if (!z) {
        marker.setAttribute("visibility", "hidden");
        return;
      }
      const [px, py] = view.pixelOf(z);
      mh.setAttribute("x1", String(px - 7));
      mh.setAttribute("x2", String(px + 7));
      mh.setAttribute("y1", String(py));
      mh.setAttribute("y2", String(py));
      mv.setAttribute("x1", String(px));
      mv.setAttribute("x2", String(px));
      mv.setAttribute("y1", String(py - 7));
      mv.setAttribute("y2", String(py + 7));
      marker.setAttribute("visibility", "visible");
    },
    setOverlay(mode) {
      densityLayer.setAttribute("display", mode === "density" ? "inline" : "none");
      groupLayer.setAttribute("display", mode === "groups" ? "inline" : "none");
      const circles = pointLayer.querySelectorAll("circle");
      circles.forEach((c, idx) => {
        const p = map.points[idx];
        let fill = "#888";
        let opacity = "0.75";
        if (mode === "phase") {
          fill = PHASE_COLORS[p.label] ?? "#888";
        } else if (mode === "elements") {
          fill = elementCountColor(p.n_elements);
        } else {
          fill = "#9aa1a9";
          opacity = mode === "density" ? "0.25" : "0.35";
        }
        c.setAttribute("fill", fill);
        c.setAttribute("fill-opacity", opacity);
      });
    },
  };
  view.setOverlay("phase");
  return view;
}
