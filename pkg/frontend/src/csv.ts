/** Minimal reader for the simulator's numeric CSV artifacts. */

export interface Table {
  header: string[];
  columns: Map<string, Float64Array>;
  rows: number;
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows = lines.length - 1;
  const cols = header.map(() => new Float64Array(rows));
  for (let i = 0; i < rows; i++) {
    const parts = lines[i + 1].split(",");
    if (parts.length !== header.length) {
      throw new Error(`row ${i + 1}: expected ${header.length} cells, got ${parts.length}`);
    }
    for (let j = 0; j < header.length; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v)) {
        throw new Error(`row ${i + 1}, column ${header[j]}: not a finite number`);
      }
      cols[j][i] = v;
    }
  }
  const columns = new Map<string, Float64Array>();
  header.forEach((h, j) => columns.set(h, cols[j]));
  return { header, columns, rows };
}

/** Column accessor that names the missing column in the error (schema checks). */
export function needColumn(table: Table, name: string, file: string): Float64Array {
  const col = table.columns.get(name);
  if (!col) {
    throw new Error(`${file}: missing column ${name} (have: ${table.header.join(", ")})`);
  }
  return col;
}

/** Pivot long-format (t, x, value) rows into a grid, assuming the writer's
 *  snapshot-major row order. */
export function pivotGrid(t: Float64Array, x: Float64Array, v: Float64Array): {
  ts: number[];
  xs: number[];
  grid: Float64Array[];
} {
  const xs: number[] = [];
  for (let i = 0; i < x.length; i++) {
    if (i > 0 && x[i] === x[0]) break;
    xs.push(x[i]);
  }
  const nx = xs.length;
  if (nx === 0 || t.length % nx !== 0) {
    throw new Error(`cannot pivot trajectory: ${t.length} rows not a multiple of ${nx} x-nodes`);
  }
  const nt = t.length / nx;
  const ts: number[] = [];
  const grid: Float64Array[] = [];
  for (let k = 0; k < nt; k++) {
    ts.push(t[k * nx]);
    grid.push(v.slice(k * nx, (k + 1) * nx) as Float64Array);
  }
  return { ts, xs, grid };
}
