/** Command-line entry: render one figure from harness CSV to SVG. */
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { readCsv } from "./csv.js";
import { PlotSpec, render } from "./plots.js";

const USAGE = `usage: mppdg-figures --input solution.csv --kind KIND --out figure.svg
  kinds: line | zoom | surface | contour | cutline
  options:
    --overlay FILE      second CSV (exact solution or comparison run)
    --cut x=C | y=C     cut axis and value (cutline)
    --levels N          number of contour levels (default 31)
    --range LO:HI       value range for contour levels / surface colors
    --xrange A:B        x window (zoom/line)
    --yrange A:B        y window (zoom/line)
    --title TEXT        figure title
    --width N --height N
`;

function parsePair(text: string, what: string): [number, number] {
  const parts = text.split(":");
  if (parts.length !== 2) throw new Error(`${what} expects LO:HI, got '${text}'`);
  const lo = Number(parts[0]);
  const hi = Number(parts[1]);
  if (Number.isNaN(lo) || Number.isNaN(hi)) {
    throw new Error(`${what} expects numbers, got '${text}'`);
  }
  return [lo, hi];
}

const VALUE_FLAGS = new Set([
  "--input", "--kind", "--out", "--overlay", "--cut", "--levels",
  "--range", "--xrange", "--yrange", "--title", "--width", "--height",
]);

/** Fold separated option values into --flag=value form so that values
 * starting with a dash (negative numbers, ranges) parse cleanly. */
function inlineValues(argv: string[]): string[] {
  const out: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (VALUE_FLAGS.has(arg) && i + 1 < argv.length) {
      out.push(`${arg}=${argv[++i]}`);
    } else {
      out.push(arg);
    }
  }
  return out;
}

export function buildSpec(argv: string[]): { spec: PlotSpec; out: string } {
  const { values } = parseArgs({
    args: inlineValues(argv),
    options: {
      input: { type: "string" },
      kind: { type: "string" },
      out: { type: "string" },
      overlay: { type: "string" },
      cut: { type: "string" },
      levels: { type: "string" },
      range: { type: "string" },
      xrange: { type: "string" },
      yrange: { type: "string" },
      title: { type: "string" },
      width: { type: "string" },
      height: { type: "string" },
    },
  });
  if (!values.input || !values.kind || !values.out) {
    throw new Error("missing required --input/--kind/--out");
  }
  const kinds = ["line", "zoom", "surface", "contour", "cutline"];
  if (!kinds.includes(values.kind)) {
    throw new Error(`unknown kind '${values.kind}' (expected ${kinds.join("|")})`);
  }
  const spec: PlotSpec = {
    input: readCsv(values.input),
    kind: values.kind as PlotSpec["kind"],
  };
  if (values.overlay) spec.overlay = readCsv(values.overlay);
  if (values.cut) {
    const m = /^([xy])=(-?[\d.eE+-]+)$/.exec(values.cut);
    if (!m) throw new Error(`--cut expects x=VALUE or y=VALUE, got '${values.cut}'`);
    spec.cutAxis = m[1] as "x" | "y";
    spec.cutValue = Number(m[2]);
  }
  if (values.levels) spec.levels = Number(values.levels);
  if (values.range) spec.range = parsePair(values.range, "--range");
  if (values.xrange) spec.xrange = parsePair(values.xrange, "--xrange");
  if (values.yrange) spec.yrange = parsePair(values.yrange, "--yrange");
  if (values.title) spec.title = values.title;
  if (values.width) spec.width = Number(values.width);
  if (values.height) spec.height = Number(values.height);
  return { spec, out: values.out };
}

export function main(argv: string[]): number {
  if (argv.length === 0) {
    process.stderr.write(USAGE);
    return 2;
  }
  try {
    const { spec, out } = buildSpec(argv);
    writeFileSync(out, render(spec));
    process.stdout.write(`wrote ${out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.stderr.write(USAGE);
    return 2;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
