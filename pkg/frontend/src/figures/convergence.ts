/** Log-log convergence curves of the three error families vs chain size n,
 *  annotated with the observed adjacent ratios e(2n)/e(n). */

import { readFileSync } from "fs";

import { checkReportSchema } from "../figspec.js";
import type { FigureSpec } from "../figspec.js";
import { SERIES_COLORS, SvgDoc, logScale } from "../svg.js";

interface ConvergeReport {
  schema_version: number;
  n_values: number[];
  errors: Record<string, number[]>;
  ratios: Record<string, number[]>;
}

const FAMILY_LABELS: Record<string, string> = {
  sup_v: "sup |v(n) - v|",
  sup_vt: "sup |dt v(n) - dt v|",
  l2_vx: "max_t L2 |dx v(n) - dx v|",
};

export function renderConvergence(spec: FigureSpec): string {
  const path = spec.inputs[0];
  const report = JSON.parse(readFileSync(path, "utf-8")) as ConvergeReport;
  checkReportSchema(report as unknown as Record<string, unknown>, path);
  const families = Object.keys(FAMILY_LABELS).filter((f) => report.errors[f]);
  if (families.length === 0) {
    throw new Error(`${path}: missing column errors.sup_v (not a converge report?)`);
  }
  const ns = report.n_values;
  let eMin = Infinity;
  let eMax = 0;
  for (const f of families) {
    for (const e of report.errors[f]) {
      if (e > 0) {
        eMin = Math.min(eMin, e);
        eMax = Math.max(eMax, e);
      }
    }
  }
  const width = 560;
  const height = 430;
  const px0 = 80;
  const px1 = width - 30;
  const py0 = height - 70;
  const py1 = 46;
  const doc = new SvgDoc(width, height);
  doc.text(width / 2, 22, spec.title ?? "convergence to the homogenized limit", { size: 14 });
  const xs = logScale(ns[0], ns[ns.length - 1], px0, px1);
  const ys = logScale(eMin / 2, eMax * 2, py0, py1);
  doc.axes(px0, px1, py0, py1, xs, ys, "chain size n", "error");

  families.forEach((fam, fi) => {
    const color = SERIES_COLORS[fi % SERIES_COLORS.length];
    const pts: Array<[number, number]> = [];
    report.errors[fam].forEach((e, i) => {
      const p: [number, number] = [xs.toPixel(ns[i]), ys.toPixel(Math.max(e, eMin / 2))];
      pts.push(p);
      doc.circle(p[0], p[1], 3, color);
    });
    doc.polyline(pts, color);
    // adjacent-ratio annotations at segment midpoints
    (report.ratios[fam] ?? []).forEach((r, i) => {
      const mx = (pts[i][0] + pts[i + 1][0]) / 2;
      const my = (pts[i][1] + pts[i + 1][1]) / 2 - 6;
      doc.text(mx, my, r.toFixed(3), { size: 9, fill: color });
    });
    doc.text(px0 + 12, py1 + 14 + 14 * fi, FAMILY_LABELS[fam],
             { size: 11, anchor: "start", fill: color });
  });
  return doc.render();
}
