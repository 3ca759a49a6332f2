/** Deterministic SVG plot builder: fixed canvas, linear/log axes, polylines,
 * markers, and text annotations.  Output is a plain string with no timestamps
 * or random ids, so identical inputs yield byte-identical figures. */

export type Scale = "linear" | "log";

export interface Axis {
  label: string;
  scale?: Scale;
}

export interface Series {
  x: number[];
  y: number[];
  color?: string;
  width?: number;
  dash?: string;
  /** draw circles at the data points instead of / in addition to the line */
  markers?: boolean;
  line?: boolean;
}

export interface Annotation {
  x: number; // data coordinates
  y: number;
  text: string;
  color?: string;
  marker?: boolean;
}

export interface PlotSpec {
  title: string;
  xAxis: Axis;
  yAxis: Axis;
  series: Series[];
  annotations?: Annotation[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 36, right: 20, bottom: 46, left: 64 };
const PALETTE = ["#1f6fb2", "#c0392b", "#27825e", "#8e6bb2", "#b07d2b"];

/** Fixed-notation or exponent tick label, stable across platforms. */
export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e+", "e");
  return String(parseFloat(v.toPrecision(6)));
}

function transform(scale: Scale, v: number): number {
  return scale === "log" ? Math.log10(v) : v;
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / (n * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(lo - 1e-9); e <= Math.floor(hi + 1e-9); e += 1) {
    ticks.push(e);
  }
  return ticks.length >= 2 ? ticks : niceTicks(lo, hi);
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(spec: PlotSpec): string {
  const W = spec.width ?? 640;
  const H = spec.height ?? 420;
  const xs = spec.xAxis.scale ?? "linear";
  const ys = spec.yAxis.scale ?? "linear";

  const allX: number[] = [];
  const allY: number[] = [];
  for (const s of spec.series) {
    for (let i = 0; i < s.x.length; i++) {
      const xv = s.x[i]!;
      const yv = s.y[i]!;
      if (xs === "log" && xv <= 0) continue;
      if (ys === "log" && yv <= 0) continue;
      allX.push(transform(xs, xv));
      allY.push(transform(ys, yv));
    }
  }
  for (const a of spec.annotations ?? []) {
    allX.push(transform(xs, a.x));
    allY.push(transform(ys, a.y));
  }
  if (allX.length === 0) throw new Error(`figure "${spec.title}": no drawable points`);

  let xLo = Math.min(...allX);
  let xHi = Math.max(...allX);
  let yLo = Math.min(...allY);
  let yHi = Math.max(...allY);
  const padX = (xHi - xLo || 1) * 0.05;
  const padY = (yHi - yLo || 1) * 0.08;
  xLo -= padX; xHi += padX; yLo -= padY; yHi += padY;

  const px = (v: number) =>
    MARGIN.left + ((transform(xs, v) - xLo) / (xHi - xLo)) * (W - MARGIN.left - MARGIN.right);
  const py = (v: number) =>
    H - MARGIN.bottom - ((transform(ys, v) - yLo) / (yHi - yLo)) * (H - MARGIN.top - MARGIN.bottom);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`,
    `<rect width="${W}" height="${H}" fill="#ffffff"/>`,
    `<text x="${W / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14" font-weight="bold">${esc(spec.title)}</text>`,
  );

  // axes frame
  const x0 = MARGIN.left, x1 = W - MARGIN.right, y0 = H - MARGIN.bottom, y1 = MARGIN.top;
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444444"/>`);

  const xt = xs === "log" ? logTicks(xLo, xHi) : niceTicks(xLo, xHi);
  for (const t of xt) {
    const vx = MARGIN.left + ((t - xLo) / (xHi - xLo)) * (x1 - x0);
    if (vx < x0 - 0.5 || vx > x1 + 0.5) continue;
    const label = xs === "log" ? `1e${fmt(t)}` : fmt(t);
    parts.push(
      `<line x1="${vx.toFixed(2)}" y1="${y0}" x2="${vx.toFixed(2)}" y2="${y0 + 5}" stroke="#444444"/>`,
      `<text x="${vx.toFixed(2)}" y="${y0 + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${esc(label)}</text>`,
    );
  }
  const yt = ys === "log" ? logTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const t of yt) {
    const vy = y0 - ((t - yLo) / (yHi - yLo)) * (y0 - y1);
    if (vy < y1 - 0.5 || vy > y0 + 0.5) continue;
    const label = ys === "log" ? `1e${fmt(t)}` : fmt(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${vy.toFixed(2)}" x2="${x0}" y2="${vy.toFixed(2)}" stroke="#444444"/>`,
      `<text x="${x0 - 8}" y="${(vy + 4).toFixed(2)}" text-anchor="end" font-family="sans-serif" font-size="11">${esc(label)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${H - 10}" text-anchor="middle" font-family="sans-serif" font-size="12">${esc(spec.xAxis.label)}</text>`,
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(spec.yAxis.label)}</text>`,
  );

  spec.series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length]!;
    const pts: string[] = [];
    for (let j = 0; j < s.x.length; j++) {
      const xv = s.x[j]!;
      const yv = s.y[j]!;
      if (xs === "log" && xv <= 0) continue;
      if (ys === "log" && yv <= 0) continue;
      pts.push(`${px(xv).toFixed(2)},${py(yv).toFixed(2)}`);
    }
    if (s.line !== false && pts.length >= 2) {
      const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="${s.width ?? 1.5}"${dash}/>`,
      );
    }
    if (s.markers) {
      for (const p of pts) {
        const [cx, cy] = p.split(",");
        parts.push(`<circle cx="${cx}" cy="${cy}" r="3" fill="${color}"/>`);
      }
    }
  });

  for (const a of spec.annotations ?? []) {
    const cx = px(a.x), cy = py(a.y);
    const color = a.color ?? "#c0392b";
    if (a.marker !== false) {
      parts.push(`<circle cx="${cx.toFixed(2)}" cy="${cy.toFixed(2)}" r="4" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    }
    parts.push(
      `<text x="${(cx + 8).toFixed(2)}" y="${(cy - 8).toFixed(2)}" font-family="sans-serif" font-size="12" fill="${color}">${esc(a.text)}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
