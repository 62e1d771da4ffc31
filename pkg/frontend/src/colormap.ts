/** Diverging blue-white-red map for signed fields (piecewise-linear anchors). */

const ANCHORS: Array<[number, number, number, number]> = [
  [0.0, 5, 48, 97],
  [0.25, 67, 147, 195],
  [0.5, 247, 247, 247],
  [0.75, 214, 96, 77],
  [1.0, 103, 0, 31],
];

export function diverging(u: number): [number, number, number] {
  const t = Math.min(1, Math.max(0, u));
  for (let i = 1; i < ANCHORS.length; i++) {
    if (t <= ANCHORS[i][0]) {
      const [t0, r0, g0, b0] = ANCHORS[i - 1];
      const [t1, r1, g1, b1] = ANCHORS[i];
      const s = t1 === t0 ? 0 : (t - t0) / (t1 - t0);
      return [
        Math.round(r0 + s * (r1 - r0)),
        Math.round(g0 + s * (g1 - g0)),
        Math.round(b0 + s * (b1 - b0)),
      ];
    }
  }
  const [, r, g, b] = ANCHORS[ANCHORS.length - 1];
  return [r, g, b];
}

/** Symmetric scaling: value v in [-vmax, vmax] -> colormap coordinate. */
export function signedToUnit(v: number, vmax: number): number {
  if (vmax <= 0) return 0.5;
  return 0.5 + 0.5 * Math.min(1, Math.max(-1, v / vmax));
}
