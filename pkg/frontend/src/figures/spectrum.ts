/** Transmission spectrum |T(omega)|^2 from a band-gap scan, with the cutoff
 *  frequency read from the report and marked. */

import { readFileSync } from "fs";

import { needColumn, parseCsv } from "../csv.js";
import { checkReportSchema } from "../figspec.js";
import type { FigureSpec } from "../figspec.js";
import { SvgDoc, linearScale } from "../svg.js";

export function renderSpectrum(spec: FigureSpec): string {
  const csvPath = spec.inputs.find((p) => p.endsWith(".csv"));
  const jsonPath = spec.inputs.find((p) => p.endsWith(".json"));
  if (!csvPath || !jsonPath) {
    throw new Error("spectrum needs two inputs: bandgap.csv and report.json");
  }
  const table = parseCsv(readFileSync(csvPath, "utf-8"));
  const om = needColumn(table, "omega_rad_per_s", csvPath);
  const t2 = needColumn(table, "T2", csvPath);
  const report = JSON.parse(readFileSync(jsonPath, "utf-8")) as Record<string, unknown>;
  checkReportSchema(report, jsonPath);
  const omegaC = report.omega_c;
  if (typeof omegaC !== "number") {
    throw new Error(`${jsonPath}: missing column omega_c`);
  }

  const width = 560;
  const height = 400;
  const px0 = 76;
  const px1 = width - 26;
  const py0 = height - 64;
  const py1 = 46;
  const doc = new SvgDoc(width, height);
  doc.text(width / 2, 22, spec.title ?? "slab transmission", { size: 14 });
  const xdom = spec.axes?.x ?? [om[0], om[om.length - 1]];
  const xs = linearScale(xdom[0], xdom[1], px0, px1);
  const ys = linearScale(0, 1.05, py0, py1);
  doc.axes(px0, px1, py0, py1, xs, ys, "omega (rad/s)", "|T|^2");

  const pts: Array<[number, number]> = [];
  for (let i = 0; i < om.length; i++) {
    pts.push([xs.toPixel(om[i]), ys.toPixel(t2[i])]);
  }
  doc.polyline(pts, "#1f77b4");
  const pxc = xs.toPixel(omegaC);
  doc.line(pxc, py0, pxc, py1, "#d62728", "5,3");
  doc.text(pxc + 4, py1 + 12, `omega_c = ${omegaC.toFixed(4)}`,
           { size: 11, anchor: "start", fill: "#d62728" });
  return doc.render();
}
