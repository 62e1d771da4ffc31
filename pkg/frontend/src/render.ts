/** Figure renderer CLI:  node dist/render.js --spec figure.json
 *  Reads simulator CSV/JSON artifacts and writes a deterministic SVG. */

import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";

import { loadSpec } from "./figspec.js";
import type { FigureSpec } from "./figspec.js";
import { renderConvergence } from "./figures/convergence.js";
import { renderEnergy } from "./figures/energy.js";
import { renderHeatmap } from "./figures/heatmap.js";
import { renderSpectrum } from "./figures/spectrum.js";

export function render(spec: FigureSpec): string {
  switch (spec.kind) {
    case "heatmap":
      return renderHeatmap(spec);
    case "convergence":
      return renderConvergence(spec);
    case "spectrum":
      return renderSpectrum(spec);
    case "energy":
      return renderEnergy(spec);
  }
}

export function renderToFile(specPath: string): string {
  const spec = loadSpec(specPath);
  const svg = render(spec);
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg, "utf-8");
  return spec.output;
}

function main(argv: string[]): number {
  const i = argv.indexOf("--spec");
  if (i < 0 || i + 1 >= argv.length) {
    console.error("usage: render --spec FIGURE_SPEC.json");
    return 2;
  }
  try {
    const out = renderToFile(argv[i + 1]);
    console.log(out);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main(process.argv.slice(2)));
}
