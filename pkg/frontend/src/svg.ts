/**
 * Minimal deterministic SVG plotting: fixed canvas, no timestamps, no
 * randomness, so re-rendering the same inputs yields identical bytes.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Axes {
  logX: boolean;
  logY: boolean;
  xLabel: string;
  yLabel: string;
  title: string;
}

const WIDTH = 640;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

function transformed(values: number[], log: boolean, what: string): number[] {
  if (!log) return values;
  for (const v of values) {
    if (!(v > 0)) {
      throw new Error(`${what}: log axis needs positive values, got ${v}`);
    }
  }
  return values.map(Math.log10);
}

function range(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("no finite data to plot");
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let d = Math.ceil(lo); d <= Math.floor(hi); d++) out.push(d);
    if (out.length === 0) out.push(lo, hi);
    return out;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const out: number[] = [];
  const s = step * mult;
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    out.push(v);
  }
  return out;
}

function tickLabel(v: number, log: boolean): string {
  return log ? `1e${fmt(v)}` : fmt(v);
}

export function renderSvg(series: Series[], axes: Axes): string {
  if (series.length === 0) {
    throw new Error("nothing to plot");
  }
  const tx = series.map((s) => transformed(s.x, axes.logX, s.label));
  const ty = series.map((s) => transformed(s.y, axes.logY, s.label));
  const [xLo, xHi] = range(tx.flat());
  const [yLo, yHi] = range(ty.flat());
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">${axes.title}</text>`,
  );

  for (const t of ticks(xLo, xHi, axes.logX)) {
    const px = sx(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top}" x2="${fmt(px)}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
      `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${tickLabel(t, axes.logX)}</text>`,
    );
  }
  for (const t of ticks(yLo, yHi, axes.logY)) {
    const py = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(py)}" x2="${MARGIN.left + plotW}" y2="${fmt(py)}" stroke="#dddddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${fmt(py + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${tickLabel(t, axes.logY)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="black"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">${axes.xLabel}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${axes.yLabel}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = tx[i]
      .map((v, j) => `${fmt(sx(v))},${fmt(sy(ty[i][j]))}`)
      .join(" ");
    const dash = s.label.startsWith("fit") ? ' stroke-dasharray="6 4"' : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5"${dash}/>`,
    );
    for (const [j, v] of tx[i].entries()) {
      parts.push(
        `<circle cx="${fmt(sx(v))}" cy="${fmt(sy(ty[i][j]))}" r="2.5" fill="${color}"/>`,
      );
    }
    const ly = MARGIN.top + 14 + 16 * i;
    parts.push(
      `<rect x="${MARGIN.left + plotW - 150}" y="${ly - 9}" width="10" height="10" fill="${color}"/>`,
      `<text x="${MARGIN.left + plotW - 136}" y="${ly}" font-family="sans-serif" font-size="11">${s.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
