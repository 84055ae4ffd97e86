/**
 * Readers for the solver's CSV contract.
 *
 * 1D files carry columns (x_center, u_bar); 2D files carry
 * (x_center, y_center, u_bar) over a full structured grid. Lines starting
 * with '#' are metadata comments.
 */
import { readFileSync } from "node:fs";

export interface Series1D {
  x: number[];
  u: number[];
}

export interface Grid2D {
  x: number[]; // sorted unique cell centers
  y: number[];
  /** u[ix][iy] */
  u: number[][];
}

function dataLines(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0 && !line.startsWith("#"))
    .map((line) => line.split(","));
}

export function parseSeries1D(text: string): Series1D {
  const rows = dataLines(text);
  if (rows.length === 0) throw new Error("empty CSV");
  const header = rows[0].map((h) => h.trim());
  const xi = header.indexOf("x_center");
  const ui = header.indexOf("u_bar");
  if (xi < 0 || ui < 0 || header.includes("y_center")) {
    throw new Error(`not a 1D solution CSV (columns: ${header.join(",")})`);
  }
  const x: number[] = [];
  const u: number[] = [];
  for (const row of rows.slice(1)) {
    x.push(Number(row[xi]));
    u.push(Number(row[ui]));
  }
  if (x.some(Number.isNaN) || u.some(Number.isNaN)) {
    throw new Error("non-numeric values in CSV");
  }
  return { x, u };
}

export function parseGrid2D(text: string): Grid2D {
  const rows = dataLines(text);
  if (rows.length === 0) throw new Error("empty CSV");
  const header = rows[0].map((h) => h.trim());
  const xi = header.indexOf("x_center");
  const yi = header.indexOf("y_center");
  const ui = header.indexOf("u_bar");
  if (xi < 0 || yi < 0 || ui < 0) {
    throw new Error(`not a 2D solution CSV (columns: ${header.join(",")})`);
  }
  const xs = new Map<number, number>();
  const ys = new Map<number, number>();
  const triples: Array<[number, number, number]> = [];
  for (const row of rows.slice(1)) {
    const x = Number(row[xi]);
    const y = Number(row[yi]);
    const u = Number(row[ui]);
    if ([x, y, u].some(Number.isNaN)) throw new Error("non-numeric values in CSV");
    if (!xs.has(x)) xs.set(x, 0);
    if (!ys.has(y)) ys.set(y, 0);
    triples.push([x, y, u]);
  }
  const x = [...xs.keys()].sort((a, b) => a - b);
  const y = [...ys.keys()].sort((a, b) => a - b);
  x.forEach((v, i) => xs.set(v, i));
  y.forEach((v, i) => ys.set(v, i));
  if (triples.length !== x.length * y.length) {
    throw new Error(
      `grid is not complete: ${triples.length} rows for ${x.length}x${y.length}`,
    );
  }
  const u: number[][] = x.map(() => new Array(y.length).fill(NaN));
  for (const [xv, yv, uv] of triples) {
    u[xs.get(xv)!][ys.get(yv)!] = uv;
  }
  return { x, y, u };
}

export function readCsv(path: string): string {
  return readFileSync(path, "utf8");
}

/** Nearest index in a sorted coordinate array. */
export function nearestIndex(coords: number[], value: number): number {
  let best = 0;
  let dist = Math.abs(coords[0] - value);
  for (let i = 1; i < coords.length; i++) {
    const d = Math.abs(coords[i] - value);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}
