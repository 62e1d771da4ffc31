/** Spacetime heatmap of v(t, x): one panel per trajectory CSV, side by side
 *  (typically finite chain next to the homogenized solution), shared color
 *  scale symmetric around zero. */

import { readFileSync } from "fs";
import { basename } from "path";

import { needColumn, parseCsv, pivotGrid } from "../csv.js";
import { diverging, signedToUnit } from "../colormap.js";
import { encodePng } from "../png.js";
import { SvgDoc, linearScale } from "../svg.js";
import type { FigureSpec } from "../figspec.js";

interface Panel {
  label: string;
  ts: number[];
  xs: number[];
  grid: Float64Array[];
}

function loadPanel(path: string): Panel {
  const table = parseCsv(readFileSync(path, "utf-8"));
  const t = needColumn(table, "t_s", path);
  const x = needColumn(table, "x_m", path);
  const v = needColumn(table, "v_m_per_s", path);
  const { ts, xs, grid } = pivotGrid(t, x, v);
  return { label: basename(path, ".csv"), ts, xs, grid };
}

function rasterize(panel: Panel, vmax: number): string {
  const nt = panel.ts.length;
  const nx = panel.xs.length;
  // rows: time increasing downward flipped later via y placement; keep t upward
  const rgb = new Uint8Array(3 * nx * nt);
  for (let k = 0; k < nt; k++) {
    const row = nt - 1 - k; // latest time at the top of the raster
    for (let i = 0; i < nx; i++) {
      const [r, g, b] = diverging(signedToUnit(panel.grid[k][i], vmax));
      const o = 3 * (row * nx + i);
      rgb[o] = r;
      rgb[o + 1] = g;
      rgb[o + 2] = b;
    }
  }
  return encodePng(nx, nt, rgb).toString("base64");
}

export function renderHeatmap(spec: FigureSpec): string {
  const panels = spec.inputs.map(loadPanel);
  let vmax = 0;
  for (const p of panels) {
    for (const row of p.grid) {
      for (const v of row) vmax = Math.max(vmax, Math.abs(v));
    }
  }
  const panelW = 340;
  const panelH = 360;
  const marginL = 62;
  const gap = 28;
  const top = 40;
  const width = marginL + panels.length * (panelW + gap) + 40;
  const height = top + panelH + 58;
  const doc = new SvgDoc(width, height);
  if (spec.title) doc.text(width / 2, 20, spec.title, { size: 14 });

  panels.forEach((p, idx) => {
    const px0 = marginL + idx * (panelW + gap);
    const py0 = top + panelH;
    const xs = linearScale(p.xs[0], p.xs[p.xs.length - 1], px0, px0 + panelW);
    const ys = linearScale(p.ts[0], p.ts[p.ts.length - 1], py0, top);
    doc.image(px0, top, panelW, panelH, rasterize(p, vmax));
    doc.axes(px0, px0 + panelW, py0, top, xs, ys, "x (m)", idx === 0 ? "t (s)" : "");
    doc.text(px0 + panelW / 2, top - 6, p.label, { size: 12 });
  });
  doc.text(width / 2, height - 8,
           `v(t, x), color scale symmetric at ±${vmax.toExponential(3)} m/s`,
           { size: 11, fill: "#444" });
  return doc.render();
}
