/** Figure specification document: what to draw, from which artifacts, to where. */

import { existsSync, readFileSync } from "fs";

export const KINDS = ["heatmap", "convergence", "spectrum", "energy"] as const;
export type FigureKind = (typeof KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  axes?: { x?: [number, number]; y?: [number, number] };
  title?: string;
}

export function loadSpec(path: string): FigureSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new Error(`cannot read figure spec ${path}: ${(err as Error).message}`);
  }
  const obj = raw as Record<string, unknown>;
  const kind = obj.kind;
  if (typeof kind !== "string" || !(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`spec.kind must be one of ${KINDS.join(", ")}, got ${String(kind)}`);
  }
  const inputs = obj.inputs;
  if (!Array.isArray(inputs) || inputs.length === 0 || !inputs.every((p) => typeof p === "string")) {
    throw new Error("spec.inputs must be a non-empty list of paths");
  }
  for (const p of inputs) {
    if (!existsSync(p)) {
      throw new Error(`spec input does not exist: ${p}`);
    }
  }
  if (typeof obj.output !== "string" || obj.output.length === 0) {
    throw new Error("spec.output must be a path");
  }
  const spec: FigureSpec = {
    kind: kind as FigureKind,
    inputs: inputs as string[],
    output: obj.output,
  };
  if (obj.axes !== undefined) {
    spec.axes = obj.axes as FigureSpec["axes"];
  }
  if (obj.title !== undefined) {
    if (typeof obj.title !== "string") throw new Error("spec.title must be a string");
    spec.title = obj.title;
  }
  return spec;
}

export const EXPECTED_SCHEMA_VERSION = 1;

export function checkReportSchema(report: Record<string, unknown>, file: string): void {
  if (report.schema_version !== EXPECTED_SCHEMA_VERSION) {
    throw new Error(
      `${file}: schema_version ${String(report.schema_version)} != ${EXPECTED_SCHEMA_VERSION}`,
    );
  }
}
