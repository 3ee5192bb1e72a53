/**
 * Deterministic SVG assembly: fixed canvas, fixed styling, no timestamps or
 * random ids, numbers printed with a fixed precision so re-rendering the same
 * inputs is byte-identical.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 62, right: 18, top: 26, bottom: 44 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`non-finite coordinate in figure: ${x}`);
  }
  return x.toFixed(2).replace(/^-0\.00$/, "0.00");
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

export function extent(values: number[], padFraction = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("cannot compute extent of empty or non-finite data");
  }
  const pad = (hi - lo || 1) * padFraction;
  return [lo - pad, hi + pad];
}

export function plotScales(xDomain: [number, number], yDomain: [number, number]): [Scale, Scale] {
  const x = linearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
  return [x, y];
}

export function polyline(xs: number[], ys: number[], style: string): string {
  const points = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
  return `<polyline fill="none" ${style} points="${points}"/>`;
}

export function bandPath(xs: number[], upper: number[], lower: number[], fill: string): string {
  const forward = xs.map((x, i) => `${fmt(x)},${fmt(upper[i])}`);
  const backward = xs.map((x, i) => `${fmt(x)},${fmt(lower[i])}`).reverse();
  return `<polygon fill="${fill}" stroke="none" points="${forward.concat(backward).join(" ")}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, style: string): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${style}/>`;
}

export function circle(cx: number, cy: number, r: number, style: string): string {
  return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" ${style}/>`;
}

export function rect(x: number, y: number, w: number, h: number, style: string): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ${style}/>`;
}

export function text(x: number, y: number, content: string, style = ""): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" font-size="11" ${style}>${escapeXml(content)}</text>`;
}

export function polygon(points: Array<[number, number]>, style: string): string {
  const joined = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polygon ${style} points="${joined}"/>`;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function axisTicks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const ticks: number[] = [];
  for (let i = 0; i <= count; i += 1) {
    ticks.push(lo + ((hi - lo) * i) / count);
  }
  return ticks;
}

export function axes(x: Scale, y: Scale, xLabel: string, yLabel: string): string {
  const parts: string[] = [];
  const axisStyle = 'stroke="#222" stroke-width="1"';
  parts.push(line(MARGIN.left, HEIGHT - MARGIN.bottom, WIDTH - MARGIN.right,
    HEIGHT - MARGIN.bottom, axisStyle));
  parts.push(line(MARGIN.left, MARGIN.top, MARGIN.left, HEIGHT - MARGIN.bottom, axisStyle));
  for (const t of axisTicks(x.domain)) {
    const px = x(t);
    parts.push(line(px, HEIGHT - MARGIN.bottom, px, HEIGHT - MARGIN.bottom + 4, axisStyle));
    parts.push(text(px - 10, HEIGHT - MARGIN.bottom + 16, trimNumber(t)));
  }
  for (const t of axisTicks(y.domain)) {
    const py = y(t);
    parts.push(line(MARGIN.left - 4, py, MARGIN.left, py, axisStyle));
    parts.push(text(6, py + 4, trimNumber(t)));
  }
  parts.push(text(WIDTH / 2 - 20, HEIGHT - 8, xLabel));
  parts.push(`<g transform="rotate(-90 14 ${HEIGHT / 2})">${text(14, HEIGHT / 2, yLabel)}</g>`);
  return parts.join("\n");
}

function trimNumber(v: number): string {
  const s = Math.abs(v) >= 1000 || (Math.abs(v) < 0.01 && v !== 0)
    ? v.toExponential(1)
    : Number(v.toFixed(3)).toString();
  return s;
}

export function document(title: string, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    text(MARGIN.left, 16, title, 'font-weight="bold"'),
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
