/** Tiny deterministic SVG builder: no DOM, just string assembly. */

export interface Rect {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export class Frame {
  readonly width: number;
  readonly height: number;
  readonly margin = { left: 56, right: 16, top: 28, bottom: 40 };
  readonly data: Rect;

  constructor(data: Rect, width = 640, height = 480) {
    this.width = width;
    this.height = height;
    const padX = data.x1 === data.x0 ? 0.5 : 0;
    const padY = data.y1 === data.y0 ? 0.5 : 0;
    this.data = {
      x0: data.x0 - padX,
      x1: data.x1 + padX,
      y0: data.y0 - padY,
      y1: data.y1 + padY,
    };
  }

  px(x: number): number {
    const { left, right } = this.margin;
    const span = this.width - left - right;
    return left + ((x - this.data.x0) / (this.data.x1 - this.data.x0)) * span;
  }

  py(y: number): number {
    const { top, bottom } = this.margin;
    const span = this.height - top - bottom;
    return top + ((this.data.y1 - y) / (this.data.y1 - this.data.y0)) * span;
  }
}

const fmt = (v: number): string => {
  const s = v.toPrecision(6);
  return String(Number(s));
};

export class SvgDoc {
  private parts: string[] = [];
  constructor(readonly frame: Frame) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" ` +
        `height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
      `<rect width="${frame.width}" height="${frame.height}" fill="white"/>`,
    );
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  polyline(xs: number[], ys: number[], stroke: string, opts = ""): void {
    const pts = xs
      .map((x, i) => `${fmt(this.frame.px(x))},${fmt(this.frame.py(ys[i]))}`)
      .join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ${opts}/>`,
    );
  }

  markers(xs: number[], ys: number[], color: string, r = 2.2): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${fmt(this.frame.px(xs[i]))}" cy="${fmt(
          this.frame.py(ys[i]),
        )}" r="${r}" fill="none" stroke="${color}" stroke-width="1"/>`,
      );
    }
  }

  segment(x0: number, y0: number, x1: number, y1: number, stroke: string): void {
    this.parts.push(
      `<line x1="${fmt(this.frame.px(x0))}" y1="${fmt(this.frame.py(y0))}" ` +
        `x2="${fmt(this.frame.px(x1))}" y2="${fmt(this.frame.py(y1))}" ` +
        `stroke="${stroke}" stroke-width="1"/>`,
    );
  }

  cellRect(x0: number, x1: number, y0: number, y1: number, fill: string): void {
    const px0 = this.frame.px(x0);
    const py1 = this.frame.py(y0);
    const px1 = this.frame.px(x1);
    const py0 = this.frame.py(y1);
    this.parts.push(
      `<rect x="${fmt(px0)}" y="${fmt(py0)}" width="${fmt(px1 - px0)}" ` +
        `height="${fmt(py1 - py0)}" fill="${fill}" stroke="none"/>`,
    );
  }

  axes(title: string, xlabel: string, ylabel: string): void {
    const f = this.frame;
    const { left, right, top, bottom } = f.margin;
    const x0 = left;
    const x1 = f.width - right;
    const y0 = top;
    const y1 = f.height - bottom;
    this.parts.push(
      `<rect x="${x0}" y="${y0}" width="${x1 - x0}" height="${y1 - y0}" ` +
        `fill="none" stroke="black" stroke-width="1"/>`,
    );
    const label = (x: number, y: number, text: string, anchor: string, extra = "") =>
      this.parts.push(
        `<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" ` +
          `font-size="11" text-anchor="${anchor}" ${extra}>${text}</text>`,
      );
    label((x0 + x1) / 2, y0 - 10, title, "middle");
    label(x0, y1 + 16, fmt(f.data.x0), "middle");
    label(x1, y1 + 16, fmt(f.data.x1), "middle");
    label((x0 + x1) / 2, y1 + 30, xlabel, "middle");
    label(x0 - 6, y1, fmt(f.data.y0), "end");
    label(x0 - 6, y0 + 8, fmt(f.data.y1), "end");
    label(
      14,
      (y0 + y1) / 2,
      ylabel,
      "middle",
      `transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})"`,
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

/** Linear blue-white-red map on [lo, hi]; clamps outside. */
export function diverging(v: number, lo: number, hi: number): string {
  const t = Math.max(0, Math.min(1, (v - lo) / (hi - lo || 1)));
  const mix = (a: number, b: number, s: number) => Math.round(a + (b - a) * s);
  let r: number, g: number, b: number;
  if (t < 0.5) {
    const s = t / 0.5;
    [r, g, b] = [mix(33, 247, s), mix(102, 247, s), mix(172, 247, s)];
  } else {
    const s = (t - 0.5) / 0.5;
    [r, g, b] = [mix(247, 178, s), mix(247, 24, s), mix(247, 43, s)];
  }
  return `rgb(${r},${g},${b})`;
}
