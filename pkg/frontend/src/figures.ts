/**
 * One renderer per figure family. Each takes already-parsed CSV tables and
 * returns a complete SVG document string; all statistics are read from the
 * artifacts, never recomputed from raw chains.
 */

import {
  SchemaError,
  Table,
  numberColumn,
  requireColumns,
  stringColumn,
  truthField,
} from "./csv.js";
import {
  HEIGHT,
  MARGIN,
  WIDTH,
  axes,
  bandPath,
  circle,
  document,
  extent,
  line,
  plotScales,
  polygon,
  polyline,
  rect,
  text,
} from "./svg.js";

const BAND_FILL = "rgb(222,228,239)";
const MEAN_STYLE = 'stroke="#111" stroke-width="1.4" stroke-dasharray="6 3"';
const QUANTILE_STYLE = 'stroke="#555" stroke-width="0.8"';
const TRUTH_STYLE = 'stroke="#c22" stroke-width="1.4"';

export interface FigureInputs {
  [name: string]: Table;
}

/** Posterior band reconstruction against the true input. */
export function renderBands(inputs: FigureInputs, title = "Posterior reconstruction"): string {
  const bands = need(inputs, "bands");
  requireColumns(bands, ["coordinate", "mean", "p5", "p10", "p90", "p95"], "bands.csv");
  const coord = numberColumn(bands, "coordinate", "bands.csv");
  const mean = numberColumn(bands, "mean", "bands.csv");
  const p5 = numberColumn(bands, "p5", "bands.csv");
  const p10 = numberColumn(bands, "p10", "bands.csv");
  const p90 = numberColumn(bands, "p90", "bands.csv");
  const p95 = numberColumn(bands, "p95", "bands.csv");

  let truth: Array<[number, number]> = [];
  if (inputs.truth !== undefined) {
    truth = truthField(inputs.truth, "u_true", "truth.csv");
  }
  const yValues = [...p5, ...p95, ...mean, ...truth.map(([, v]) => v)];
  const [x, y] = plotScales(extent(coord, 0), extent(yValues));
  const px = coord.map(x);

  const body = [
    bandPath(px, p95.map(y), p5.map(y), BAND_FILL),
    polyline(px, p5.map(y), QUANTILE_STYLE),
    polyline(px, p10.map(y), QUANTILE_STYLE),
    polyline(px, p90.map(y), QUANTILE_STYLE),
    polyline(px, p95.map(y), QUANTILE_STYLE),
    polyline(px, mean.map(y), MEAN_STYLE),
  ];
  if (truth.length > 0) {
    body.push(polyline(truth.map(([c]) => x(c)), truth.map(([, v]) => y(v)), TRUTH_STYLE));
  }
  body.push(axes(x, y, "position", "value"));
  return document(title, body);
}

/** Per-subinterval box plots of the grid-point occupancy distribution. */
export function renderGridBoxes(inputs: FigureInputs, title = "Grid occupancy"): string {
  const hist = need(inputs, "grid_histogram");
  requireColumns(hist, ["bucket"], "grid_histogram.csv");
  const subCols = hist.header.filter((h) => h.startsWith("sub_"));
  if (subCols.length === 0) {
    throw new SchemaError("grid_histogram.csv: no sub_* columns found");
  }
  const buckets = stringColumn(hist, "bucket", "grid_histogram.csv");
  const distRows = buckets
    .map((label, i) => ({ label, i }))
    .filter(({ label }) => label !== "mean");
  // bucket midpoints, e.g. "2-3" -> 2.5
  const midpoints = distRows.map(({ label }) => {
    const [lo, hi] = label.split("-").map(Number);
    if (Number.isNaN(lo) || Number.isNaN(hi)) {
      throw new SchemaError(`grid_histogram.csv: malformed bucket label "${label}"`);
    }
    return (lo + hi) / 2;
  });

  const stats = subCols.map((col) => {
    const probs = numberColumn(hist, col, "grid_histogram.csv");
    const dist = distRows.map(({ i }) => probs[i]);
    return boxStats(midpoints, dist);
  });

  const yMax = Math.max(...stats.map((s) => s.high)) + 1;
  const [x, y] = plotScales([0, subCols.length], [0, yMax]);
  const body: string[] = [];
  const boxWidth = ((WIDTH - MARGIN.left - MARGIN.right) / subCols.length) * 0.5;
  stats.forEach((s, j) => {
    const cx = x(j + 0.5);
    body.push(line(cx, y(s.low), cx, y(s.high), 'stroke="#333" stroke-width="1"'));
    body.push(rect(cx - boxWidth / 2, y(s.q3), boxWidth, Math.abs(y(s.q1) - y(s.q3)),
      'fill="rgb(222,228,239)" stroke="#333" stroke-width="1"'));
    body.push(line(cx - boxWidth / 2, y(s.median), cx + boxWidth / 2, y(s.median),
      'stroke="#c22" stroke-width="1.4"'));
    body.push(text(cx - 12, HEIGHT - MARGIN.bottom + 16, `(${j},${j + 1})`));
  });
  body.push(axes(x, y, "subinterval", "grid points"));
  return document(title, body);
}

interface BoxStats {
  low: number;
  q1: number;
  median: number;
  q3: number;
  high: number;
}

/** Quartiles of a discrete distribution given support points and masses. */
function boxStats(support: number[], mass: number[]): BoxStats {
  const total = mass.reduce((a, b) => a + b, 0);
  const quantile = (q: number): number => {
    let cum = 0;
    for (let i = 0; i < support.length; i += 1) {
      cum += mass[i] / total;
      if (cum >= q) return support[i];
    }
    return support[support.length - 1];
  };
  const positive = support.filter((_, i) => mass[i] > 0);
  return {
    low: positive.length ? Math.min(...positive) : support[0],
    q1: quantile(0.25),
    median: quantile(0.5),
    q3: quantile(0.75),
    high: positive.length ? Math.max(...positive) : support[0],
  };
}

/** Rug plot of sampled grids: each recorded state is one row of tick marks. */
export function renderRug(inputs: FigureInputs, title = "Sampled grids"): string {
  const chain = need(inputs, "chain_a");
  requireColumns(chain, ["iteration", "k", "points"], "chain_a.csv");
  const pointsCol = stringColumn(chain, "points", "chain_a.csv");
  const iterations = numberColumn(chain, "iteration", "chain_a.csv");
  // show up to 40 states, evenly spaced through the record
  const take: number[] = [];
  const maxRows = Math.min(40, pointsCol.length);
  for (let i = 0; i < maxRows; i += 1) {
    take.push(Math.floor((i * (pointsCol.length - 1)) / Math.max(maxRows - 1, 1)));
  }
  const grids = take.map((i) => pointsCol[i].split(" ").map(Number));
  const allPoints = grids.flat();
  const [x, y] = plotScales(extent(allPoints, 0.02), [0, take.length]);
  const body: string[] = [];
  grids.forEach((points, row) => {
    for (const p of points) {
      body.push(line(x(p), y(row + 0.15), x(p), y(row + 0.85),
        'stroke="#333" stroke-width="0.7"'));
    }
  });
  body.push(axes(x, y, "position", "recorded state"));
  body.push(text(WIDTH - 220, MARGIN.top + 4,
    `iterations ${iterations[take[0]]} to ${iterations[take[take.length - 1]]}`));
  return document(title, body);
}

/** Recovered trajectory band with the observations marked. */
export function renderTrajectory(inputs: FigureInputs, title = "Recovered trajectory"): string {
  const bands = need(inputs, "trajectory_bands");
  requireColumns(bands, ["time", "mean", "p5", "p95"], "trajectory_bands.csv");
  const t = numberColumn(bands, "time", "trajectory_bands.csv");
  const mean = numberColumn(bands, "mean", "trajectory_bands.csv");
  const p5 = numberColumn(bands, "p5", "trajectory_bands.csv");
  const p95 = numberColumn(bands, "p95", "trajectory_bands.csv");

  let truth: Array<[number, number]> = [];
  if (inputs.truth !== undefined) {
    truth = truthField(inputs.truth, "z_true", "truth.csv");
  }
  let obs: Array<[number, number]> = [];
  if (inputs.data !== undefined) {
    requireColumns(inputs.data, ["time", "value"], "data.csv");
    const ot = numberColumn(inputs.data, "time", "data.csv");
    const ov = numberColumn(inputs.data, "value", "data.csv");
    obs = ot.map((v, i) => [v, ov[i]]);
  }
  const yValues = [...p5, ...p95, ...truth.map(([, v]) => v), ...obs.map(([, v]) => v)];
  const xValues = [...t, ...truth.map(([c]) => c)];
  const [x, y] = plotScales(extent(xValues, 0.02), extent(yValues));
  const body = [
    bandPath(t.map(x), p95.map(y), p5.map(y), BAND_FILL),
    polyline(t.map(x), p5.map(y), QUANTILE_STYLE),
    polyline(t.map(x), p95.map(y), QUANTILE_STYLE),
    polyline(t.map(x), mean.map(y), MEAN_STYLE),
  ];
  if (truth.length > 0) {
    body.push(polyline(truth.map(([c]) => x(c)), truth.map(([, v]) => y(v)), TRUTH_STYLE));
  }
  for (const [ot, ov] of obs) {
    body.push(circle(x(ot), y(ov), 3, 'fill="none" stroke="#06c" stroke-width="1.2"'));
  }
  body.push(axes(x, y, "time", "state"));
  return document(title, body);
}

/** Posterior samples of a planar unknown with credible rectangles. */
export function renderScatter(inputs: FigureInputs, title = "Posterior samples"): string {
  const chain = need(inputs, "chain_u");
  requireColumns(chain, ["u_0", "u_1"], "chain_u.csv");
  const xs = numberColumn(chain, "u_0", "chain_u.csv");
  const ys = numberColumn(chain, "u_1", "chain_u.csv");
  const bands = need(inputs, "bands");
  requireColumns(bands, ["coordinate", "mean", "p5", "p10", "p90", "p95"], "bands.csv");
  const p5 = numberColumn(bands, "p5", "bands.csv");
  const p10 = numberColumn(bands, "p10", "bands.csv");
  const p90 = numberColumn(bands, "p90", "bands.csv");
  const p95 = numberColumn(bands, "p95", "bands.csv");
  const meanCol = numberColumn(bands, "mean", "bands.csv");
  if (p5.length < 2) {
    throw new SchemaError("bands.csv: need one row per planar coordinate");
  }

  const [x, y] = plotScales([0, 1], [0, 1]);
  const body: string[] = [];
  // 90% and 95% coordinate-wise credible rectangles
  body.push(rect(x(p10[0]), y(p90[1]), x(p90[0]) - x(p10[0]), y(p10[1]) - y(p90[1]),
    'fill="none" stroke="#06c" stroke-width="1.2" stroke-dasharray="7 4"'));
  body.push(rect(x(p5[0]), y(p95[1]), x(p95[0]) - x(p5[0]), y(p5[1]) - y(p95[1]),
    'fill="none" stroke="#06c" stroke-width="1" stroke-dasharray="2 3"'));
  for (let i = 0; i < xs.length; i += 1) {
    body.push(circle(x(xs[i]), y(ys[i]), 1.6, 'fill="rgb(70,110,180)" fill-opacity="0.45"'));
  }
  body.push(polygon(triangle(x(meanCol[0]), y(meanCol[1]), 6),
    'fill="#06c" stroke="none"'));
  if (inputs.truth !== undefined) {
    const truth = truthField(inputs.truth, "u_true", "truth.csv");
    if (truth.length >= 2) {
      body.push(star(x(truth[0][1]), y(truth[1][1]), 7));
    }
  }
  body.push(axes(x, y, "x", "y"));
  return document(title, body);
}

function triangle(cx: number, cy: number, r: number): Array<[number, number]> {
  return [[cx, cy - r], [cx - r, cy + r * 0.8], [cx + r, cy + r * 0.8]];
}

function star(cx: number, cy: number, r: number): string {
  const arms: string[] = [];
  for (const [dx, dy] of [[1, 0], [0, 1], [0.71, 0.71], [0.71, -0.71]]) {
    arms.push(line(cx - r * dx, cy - r * dy, cx + r * dx, cy + r * dy,
      'stroke="#c22" stroke-width="1.6"'));
  }
  return arms.join("\n");
}

/** Wireframe of the final tessellation mesh. */
export function renderMesh(inputs: FigureInputs, title = "Final mesh"): string {
  const mesh = need(inputs, "mesh_final");
  requireColumns(mesh, ["kind", "a", "b", "c", "d"], "mesh_final.csv");
  const kind = stringColumn(mesh, "kind", "mesh_final.csv");
  const a = stringColumn(mesh, "a", "mesh_final.csv");
  const b = stringColumn(mesh, "b", "mesh_final.csv");
  const c = stringColumn(mesh, "c", "mesh_final.csv");
  const d = stringColumn(mesh, "d", "mesh_final.csv");

  const nodes: Array<[number, number]> = [];
  const triangles: Array<[number, number, number]> = [];
  for (let i = 0; i < kind.length; i += 1) {
    if (kind[i] === "node") {
      nodes[Number(a[i])] = [Number(b[i]), Number(c[i])];
    } else if (kind[i] === "tri") {
      triangles.push([Number(b[i]), Number(c[i]), Number(d[i])]);
    } else {
      throw new SchemaError(`mesh_final.csv: unknown row kind "${kind[i]}"`);
    }
  }
  const [x, y] = plotScales([0, 1], [0, 1]);
  const body: string[] = [];
  for (const [i, j, k] of triangles) {
    const pts: Array<[number, number]> = [
      [x(nodes[i][0]), y(nodes[i][1])],
      [x(nodes[j][0]), y(nodes[j][1])],
      [x(nodes[k][0]), y(nodes[k][1])],
    ];
    body.push(polygon(pts, 'fill="none" stroke="#467" stroke-width="0.6"'));
  }
  body.push(axes(x, y, "x", "y"));
  return document(title, body);
}

/** Pushforward mean and 10-90 band per sensor: chain solver vs fine solver. */
export function renderPushforward(inputs: FigureInputs, title = "Pushforward comparison"): string {
  const push = need(inputs, "pushforward");
  requireColumns(push, ["chain_mean", "fine_mean", "chain_p10", "chain_p90",
    "fine_p10", "fine_p90"], "pushforward.csv");
  const chainMean = numberColumn(push, "chain_mean", "pushforward.csv");
  const fineMean = numberColumn(push, "fine_mean", "pushforward.csv");
  const chainP10 = numberColumn(push, "chain_p10", "pushforward.csv");
  const chainP90 = numberColumn(push, "chain_p90", "pushforward.csv");
  const fineP10 = numberColumn(push, "fine_p10", "pushforward.csv");
  const fineP90 = numberColumn(push, "fine_p90", "pushforward.csv");

  const n = chainMean.length;
  const yVals = [...chainP10, ...chainP90, ...fineP10, ...fineP90];
  const [x, y] = plotScales([0, n], extent(yVals));
  const body: string[] = [];
  for (let i = 0; i < n; i += 1) {
    const cx = x(i + 0.32);
    const fx = x(i + 0.68);
    body.push(line(cx, y(chainP10[i]), cx, y(chainP90[i]), 'stroke="#06c" stroke-width="2"'));
    body.push(circle(cx, y(chainMean[i]), 2.4, 'fill="#06c"'));
    body.push(line(fx, y(fineP10[i]), fx, y(fineP90[i]), 'stroke="#c22" stroke-width="2"'));
    body.push(circle(fx, y(fineMean[i]), 2.4, 'fill="#c22"'));
  }
  body.push(text(WIDTH - 230, MARGIN.top + 4, "chain solver (blue) vs fine solver (red)"));
  body.push(axes(x, y, "sensor index", "solution value"));
  return document(title, body);
}

export const RENDERERS: Record<string, (inputs: FigureInputs) => string> = {
  bands: renderBands,
  "grid-boxes": renderGridBoxes,
  rug: renderRug,
  trajectory: renderTrajectory,
  scatter: renderScatter,
  mesh: renderMesh,
  pushforward: renderPushforward,
};

function need(inputs: FigureInputs, name: string): Table {
  const table = inputs[name];
  if (table === undefined) {
    throw new SchemaError(`missing required input table "${name}"`);
  }
  return table;
}
