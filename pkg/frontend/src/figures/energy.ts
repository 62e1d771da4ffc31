/** Relative energy-drift traces |E(t) - E(0)| / E(0), one per energy CSV
 *  (finite files carry e_tot_J, effective ones e_eff). */

import { readFileSync } from "fs";
import { basename, dirname } from "path";

import { needColumn, parseCsv } from "../csv.js";
import type { FigureSpec } from "../figspec.js";
import { SERIES_COLORS, SvgDoc, linearScale, logScale } from "../svg.js";

const FLOOR = 1e-18;

export function renderEnergy(spec: FigureSpec): string {
  const traces = spec.inputs.map((path) => {
    const table = parseCsv(readFileSync(path, "utf-8"));
    const t = needColumn(table, "t_s", path);
    const name = table.columns.has("e_tot_J") ? "e_tot_J"
      : table.columns.has("e_eff") ? "e_eff" : null;
    if (!name) {
      throw new Error(`${path}: missing column e_tot_J (or e_eff)`);
    }
    const e = needColumn(table, name, path);
    const e0 = e[0];
    const drift = new Float64Array(e.length);
    for (let i = 0; i < e.length; i++) {
      drift[i] = e0 !== 0 ? Math.abs(e[i] - e0) / Math.abs(e0) : 0;
    }
    return { label: basename(dirname(path)) || basename(path, ".csv"), t, drift };
  });

  let dMax = FLOOR * 10;
  let tMax = 0;
  for (const tr of traces) {
    tMax = Math.max(tMax, tr.t[tr.t.length - 1]);
    for (const d of tr.drift) dMax = Math.max(dMax, d);
  }
  const width = 560;
  const height = 400;
  const px0 = 80;
  const px1 = width - 26;
  const py0 = height - 64;
  const py1 = 46;
  const doc = new SvgDoc(width, height);
  doc.text(width / 2, 22, spec.title ?? "energy drift", { size: 14 });
  const xs = linearScale(0, tMax, px0, px1);
  const ys = logScale(FLOOR, dMax * 3, py0, py1);
  doc.axes(px0, px1, py0, py1, xs, ys, "t (s)", "|E(t) - E(0)| / E(0)");

  traces.forEach((tr, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const pts: Array<[number, number]> = [];
    const stride = Math.max(1, Math.floor(tr.t.length / 800));
    for (let k = 0; k < tr.t.length; k += stride) {
      pts.push([xs.toPixel(tr.t[k]), ys.toPixel(Math.max(tr.drift[k], FLOOR))]);
    }
    doc.polyline(pts, color, 1.2);
    doc.text(px1 - 6, py1 + 14 + 14 * i, tr.label, { size: 11, anchor: "end", fill: color });
  });
  return doc.render();
}
