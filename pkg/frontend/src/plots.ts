/**
 * Figure renderers over the harness CSV contract.
 *
 * line/zoom: 1D averages as open markers, optional exact-solution overlay
 *            as a solid line (zoom adds explicit axis windows);
 * surface:   2D averages as a filled heatmap;
 * contour:   equally spaced contour lines from marching squares;
 * cutline:   values along the nearest grid row/column to a requested cut,
 *            optionally compared against a second file.
 */
import { Grid2D, Series1D, nearestIndex, parseGrid2D, parseSeries1D } from "./csv.js";
import { contourSegments, equallySpacedLevels } from "./marching.js";
import { diverging, Frame, SvgDoc } from "./svg.js";

export interface PlotSpec {
  input: string; // CSV text, already loaded
  kind: "line" | "zoom" | "surface" | "contour" | "cutline";
  overlay?: string; // second CSV text (exact solution or comparison run)
  cutAxis?: "x" | "y";
  cutValue?: number;
  levels?: number;
  range?: [number, number];
  xrange?: [number, number];
  yrange?: [number, number];
  title?: string;
  width?: number;
  height?: number;
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function frameFor(spec: PlotSpec, xs: number[], ys: number[]): Frame {
  const [dx0, dx1] = spec.xrange ?? extent(xs);
  let [dy0, dy1] = spec.yrange ?? extent(ys);
  if (spec.yrange === undefined) {
    const pad = 0.05 * (dy1 - dy0 || 1);
    dy0 -= pad;
    dy1 += pad;
  }
  return new Frame({ x0: dx0, x1: dx1, y0: dy0, y1: dy1 },
                   spec.width ?? 640, spec.height ?? 480);
}

function renderLine(spec: PlotSpec): string {
  const data = parseSeries1D(spec.input);
  const overlay = spec.overlay ? parseSeries1D(spec.overlay) : undefined;
  const ally = overlay ? data.u.concat(overlay.u) : data.u;
  const doc = new SvgDoc(frameFor(spec, data.x, ally));
  if (overlay) {
    doc.polyline(overlay.x, overlay.u, "black", 'stroke-width="1.2"');
  }
  doc.markers(data.x, data.u, "#1f4e9c");
  doc.axes(spec.title ?? "cell averages", "x", "u");
  return doc.render();
}

function renderSurface(spec: PlotSpec): string {
  const grid = parseGrid2D(spec.input);
  const flat = grid.u.flat();
  const [lo, hi] = spec.range ?? extent(flat);
  const doc = new SvgDoc(frameFor({ ...spec, yrange: extent(grid.y) },
                                  grid.x, grid.y));
  const hx = grid.x.length > 1 ? grid.x[1] - grid.x[0] : 1;
  const hy = grid.y.length > 1 ? grid.y[1] - grid.y[0] : 1;
  for (let i = 0; i < grid.x.length; i++) {
    for (let j = 0; j < grid.y.length; j++) {
      doc.cellRect(grid.x[i] - hx / 2, grid.x[i] + hx / 2,
                   grid.y[j] - hy / 2, grid.y[j] + hy / 2,
                   diverging(grid.u[i][j], lo, hi));
    }
  }
  doc.axes(spec.title ?? `surface (range ${lo.toPrecision(3)}..${hi.toPrecision(3)})`,
           "x", "y");
  return doc.render();
}

function renderContour(spec: PlotSpec): string {
  const grid = parseGrid2D(spec.input);
  const flat = grid.u.flat();
  const [lo, hi] = spec.range ?? extent(flat);
  const levels = equallySpacedLevels(lo, hi, spec.levels ?? 31);
  const doc = new SvgDoc(frameFor({ ...spec, yrange: extent(grid.y) },
                                  grid.x, grid.y));
  for (const level of levels) {
    for (const [x0, y0, x1, y1] of contourSegments(grid, level)) {
      doc.segment(x0, y0, x1, y1, "#202020");
    }
  }
  doc.axes(spec.title ?? `${levels.length} contour levels in [${lo}, ${hi}]`,
           "x", "y");
  return doc.render();
}

function cutSeries(grid: Grid2D, axis: "x" | "y", value: number): Series1D {
  if (axis === "x") {
    const i = nearestIndex(grid.x, value);
    return { x: grid.y.slice(), u: grid.u[i].slice() };
  }
  const j = nearestIndex(grid.y, value);
  return { x: grid.x.slice(), u: grid.u.map((col) => col[j]) };
}

function renderCutline(spec: PlotSpec): string {
  if (spec.cutAxis === undefined || spec.cutValue === undefined) {
    throw new Error("cutline needs --cut axis=value, e.g. --cut y=0.8");
  }
  const grid = parseGrid2D(spec.input);
  const line = cutSeries(grid, spec.cutAxis, spec.cutValue);
  const overlay = spec.overlay
    ? cutSeries(parseGrid2D(spec.overlay), spec.cutAxis, spec.cutValue)
    : undefined;
  const ally = overlay ? line.u.concat(overlay.u) : line.u;
  const doc = new SvgDoc(frameFor(spec, line.x, ally));
  if (overlay) {
    doc.polyline(overlay.x, overlay.u, "black", 'stroke-width="1.2"');
  }
  doc.markers(line.x, line.u, "#1f4e9c");
  doc.polyline(line.x, line.u, "#1f4e9c", 'stroke-width="0.8" stroke-dasharray="4 3"');
  const along = spec.cutAxis === "x" ? "y" : "x";
  doc.axes(spec.title ?? `cut along ${spec.cutAxis} = ${spec.cutValue}`, along, "u");
  return doc.render();
}

export function render(spec: PlotSpec): string {
  switch (spec.kind) {
    case "line":
      return renderLine(spec);
    case "zoom":
      if (spec.xrange === undefined && spec.yrange === undefined) {
        throw new Error("zoom needs --xrange and/or --yrange");
      }
      return renderLine(spec);
    case "surface":
      return renderSurface(spec);
    case "contour":
      return renderContour(spec);
    case "cutline":
      return renderCutline(spec);
    default:
      throw new Error(`unknown plot kind ${(spec as PlotSpec).kind}`);
  }
}
