/**
 * Marching-squares contour extraction on a structured cell-average grid.
 *
 * Grid nodes are the cell centers; each level produces a list of line
 * segments in data coordinates. Saddle cases are disambiguated with the
 * square's center average, the standard convention.
 */
import type { Grid2D } from "./csv.js";

export type Segment = [number, number, number, number];

function lerp(a: number, b: number, va: number, vb: number, level: number): number {
  const t = (level - va) / (vb - va);
  return a + t * (b - a);
}

export function contourSegments(grid: Grid2D, level: number): Segment[] {
  const { x, y, u } = grid;
  const segs: Segment[] = [];
  for (let i = 0; i + 1 < x.length; i++) {
    for (let j = 0; j + 1 < y.length; j++) {
      // corner values, counterclockwise from bottom-left
      const v00 = u[i][j];
      const v10 = u[i + 1][j];
      const v11 = u[i + 1][j + 1];
      const v01 = u[i][j + 1];
      let idx = 0;
      if (v00 > level) idx |= 1;
      if (v10 > level) idx |= 2;
      if (v11 > level) idx |= 4;
      if (v01 > level) idx |= 8;
      if (idx === 0 || idx === 15) continue;

      const bottom = (): [number, number] => [
        lerp(x[i], x[i + 1], v00, v10, level),
        y[j],
      ];
      const top = (): [number, number] => [
        lerp(x[i], x[i + 1], v01, v11, level),
        y[j + 1],
      ];
      const left = (): [number, number] => [
        x[i],
        lerp(y[j], y[j + 1], v00, v01, level),
      ];
      const right = (): [number, number] => [
        x[i + 1],
        lerp(y[j], y[j + 1], v10, v11, level),
      ];

      const push = (a: [number, number], b: [number, number]) =>
        segs.push([a[0], a[1], b[0], b[1]]);

      switch (idx) {
        case 1:
        case 14:
          push(left(), bottom());
          break;
        case 2:
        case 13:
          push(bottom(), right());
          break;
        case 3:
        case 12:
          push(left(), right());
          break;
        case 4:
        case 11:
          push(right(), top());
          break;
        case 6:
        case 9:
          push(bottom(), top());
          break;
        case 7:
        case 8:
          push(left(), top());
          break;
        case 5:
        case 10: {
          const center = (v00 + v10 + v11 + v01) / 4;
          const centerHigh = center > level;
          if ((idx === 5) === centerHigh) {
            push(left(), top());
            push(bottom(), right());
          } else {
            push(left(), bottom());
            push(right(), top());
          }
          break;
        }
      }
    }
  }
  return segs;
}

/** N equally spaced levels spanning [lo, hi] inclusive. */
export function equallySpacedLevels(lo: number, hi: number, n: number): number[] {
  if (n < 1) throw new Error("need at least one contour level");
  if (n === 1) return [(lo + hi) / 2];
  const out: number[] = [];
  for (let i = 0; i < n; i++) out.push(lo + ((hi - lo) * i) / (n - 1));
  return out;
}
