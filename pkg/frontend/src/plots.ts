/**
 * The four figure kinds over the experiment CLI's CSV output:
 *
 *   profile       phi vs x at fixed t, with optional shock markers
 *   trajectories  particle paths, thickened while on a shock, merge dots
 *   anomaly       dissipation plateau vs mu on a log x axis
 *   comparison    labeled horizontal bars (velocities, anomaly, verdicts)
 *
 * Every renderer validates the referenced columns before reading data,
 * draws into a Raster, and hands back the pixel transforms so tests can
 * probe the geometry.
 */

import * as fs from "fs";
import * as path from "path";

import { SpecView, parseSpecText } from "./config";
import { InputError, SpecError } from "./errors";
import { Table, columnIndex, numericColumn, readCsv, requireColumns } from "./csv";
import { Raster, Rgb, drawText, textWidth } from "./raster";
import { encodePng } from "./png";

export const KINDS = ["profile", "trajectories", "anomaly", "comparison"];

const AXIS: Rgb = [40, 40, 40];
const GRID: Rgb = [228, 228, 232];
const MARKER: Rgb = [214, 39, 40];
const DOT: Rgb = [0, 0, 0];
export const PALETTE: Rgb[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [148, 103, 189],
  [140, 86, 75],
  [23, 190, 207],
];

export interface RenderResult {
  raster: Raster;
  px: (x: number) => number;
  py: (y: number) => number;
}

interface FrameOptions {
  width: number;
  height: number;
  title: string;
  xLabel: string;
  yLabel: string;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  logX?: boolean;
  marginLeft?: number;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(1).replace("e+", "e");
  }
  return Number(v.toPrecision(4)).toString();
}

function niceTicks(lo: number, hi: number, target = 6): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = 10 * mag;
  for (const m of [1, 2, 5]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * span; v += step) {
    out.push(Math.abs(v) < 1e-9 * span ? 0 : v);
  }
  return out;
}

function padRange(lo: number, hi: number): [number, number] {
  if (!(hi > lo)) return [lo - 1, lo + 1];
  const pad = 0.04 * (hi - lo);
  return [lo - pad, hi + pad];
}

/** Axes box with ticks, grid, and labels; returns data->pixel maps. */
function makeFrame(opts: FrameOptions): RenderResult {
  const raster = new Raster(opts.width, opts.height);
  const left = opts.marginLeft ?? 64;
  const right = 16;
  const top = opts.title ? 34 : 16;
  const bottom = 46;
  const bx = left;
  const by = top;
  const bw = opts.width - left - right;
  const bh = opts.height - top - bottom;
  const logX = opts.logX === true;

  const tx = (x: number) => (logX ? Math.log10(x) : x);
  const xa = tx(opts.xMin);
  const xb = tx(opts.xMax);
  const px = (x: number) => bx + ((tx(x) - xa) / (xb - xa)) * bw;
  const py = (y: number) =>
    by + bh - ((y - opts.yMin) / (opts.yMax - opts.yMin)) * bh;

  // grid + ticks
  if (logX) {
    const klo = Math.floor(Math.log10(opts.xMin));
    const khi = Math.ceil(Math.log10(opts.xMax));
    for (let k = klo; k <= khi; k++) {
      for (let m = 2; m <= 9; m++) {
        const v = m * Math.pow(10, k);
        if (v > opts.xMin && v < opts.xMax) {
          const gx = Math.round(px(v));
          raster.line(gx, by, gx, by + bh, GRID);
        }
      }
      const v = Math.pow(10, k);
      if (v >= opts.xMin && v <= opts.xMax) {
        const gx = Math.round(px(v));
        raster.line(gx, by, gx, by + bh, GRID);
        const label = fmt(v);
        drawText(
          raster, gx - textWidth(label) / 2, by + bh + 8, label, AXIS
        );
        raster.line(gx, by + bh, gx, by + bh + 4, AXIS);
      }
    }
  } else {
    for (const v of niceTicks(opts.xMin, opts.xMax)) {
      const gx = Math.round(px(v));
      raster.line(gx, by, gx, by + bh, GRID);
      const label = fmt(v);
      drawText(raster, gx - textWidth(label) / 2, by + bh + 8, label, AXIS);
      raster.line(gx, by + bh, gx, by + bh + 4, AXIS);
    }
  }
  for (const v of niceTicks(opts.yMin, opts.yMax)) {
    const gy = Math.round(py(v));
    raster.line(bx, gy, bx + bw, gy, GRID);
    const label = fmt(v);
    drawText(raster, bx - textWidth(label) - 8, gy - 3, label, AXIS);
    raster.line(bx - 4, gy, bx, gy, AXIS);
  }

  // frame on top of the grid
  raster.line(bx, by, bx + bw, by, AXIS);
  raster.line(bx, by + bh, bx + bw, by + bh, AXIS);
  raster.line(bx, by, bx, by + bh, AXIS);
  raster.line(bx + bw, by, bx + bw, by + bh, AXIS);

  if (opts.title) {
    drawText(
      raster,
      bx + bw / 2 - textWidth(opts.title, 2) / 2,
      8,
      opts.title,
      AXIS,
      2
    );
  }
  drawText(
    raster,
    bx + bw / 2 - textWidth(opts.xLabel) / 2,
    opts.height - 14,
    opts.xLabel,
    AXIS
  );
  drawText(raster, 4, 4, opts.yLabel, AXIS);

  return { raster, px, py };
}

function polyline(
  res: RenderResult, xs: number[], ys: number[], rgb: Rgb, thickness = 1
): void {
  for (let i = 1; i < xs.length; i++) {
    res.raster.line(
      res.px(xs[i - 1]), res.py(ys[i - 1]),
      res.px(xs[i]), res.py(ys[i]),
      rgb, thickness
    );
  }
}

function dataRange(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

export function buildProfile(
  table: Table, markers: number[], opts: Partial<FrameOptions> & {
    width: number; height: number; title: string;
    xLabel: string; yLabel: string;
  }
): RenderResult {
  requireColumns(table, ["t", "x1", "phi"]);
  const xs = numericColumn(table, "x1");
  const ys = numericColumn(table, "phi");
  const [xlo, xhi] = padRange(...dataRange(xs.concat(markers)));
  const [ylo, yhi] = padRange(...dataRange(ys));
  const res = makeFrame({
    ...opts,
    xMin: opts.xMin ?? xlo,
    xMax: opts.xMax ?? xhi,
    yMin: opts.yMin ?? ylo,
    yMax: opts.yMax ?? yhi,
  });
  for (const m of markers) {
    const gx = Math.round(res.px(m));
    const top = Math.round(res.py(opts.yMax ?? yhi));
    const bot = Math.round(res.py(opts.yMin ?? ylo));
    for (let y = top; y < bot; y += 8) {
      res.raster.line(gx, y, gx, Math.min(y + 4, bot), MARKER);
    }
  }
  polyline(res, xs, ys, PALETTE[0], 2);
  return res;
}

// ---------------------------------------------------------------------------
// trajectories
// ---------------------------------------------------------------------------

export interface TrajGroup {
  id: number;
  t: number[];
  x: number[];
  onShock: boolean[];
  mergedInto: number;
}

export function groupTrajectories(table: Table): TrajGroup[] {
  requireColumns(table, ["traj_id", "t", "x1", "on_shock", "merged_into"]);
  const ci = columnIndex(table, "traj_id");
  const ct = columnIndex(table, "t");
  const cx = columnIndex(table, "x1");
  const cs = columnIndex(table, "on_shock");
  const cm = columnIndex(table, "merged_into");
  const groups = new Map<number, TrajGroup>();
  for (const row of table.rows) {
    const id = Number(row[ci]);
    let g = groups.get(id);
    if (!g) {
      g = { id, t: [], x: [], onShock: [], mergedInto: -1 };
      groups.set(id, g);
    }
    g.t.push(Number(row[ct]));
    g.x.push(Number(row[cx]));
    g.onShock.push(row[cs] === "1");
    g.mergedInto = Number(row[cm]);
  }
  return [...groups.values()].sort((a, b) => a.id - b.id);
}

export interface MergeEvent {
  trajId: number;
  into: number;
  t: number;
  x: number;
}

/** Merge tolerance matching the flow's own convention: twice one step's
 * worth of the fastest observed motion. */
export function defaultMergeTol(groups: TrajGroup[]): number {
  let dt = Infinity;
  let vmax = 0;
  for (const g of groups) {
    for (let i = 1; i < g.t.length; i++) {
      const step = g.t[i] - g.t[i - 1];
      if (step > 0) {
        dt = Math.min(dt, step);
        vmax = Math.max(vmax, Math.abs(g.x[i] - g.x[i - 1]) / step);
      }
    }
  }
  if (!Number.isFinite(dt)) return 1e-9;
  return 2 * dt * Math.max(vmax, 1);
}

/** First sample from which an absorbed trajectory stays within tol of
 * its survivor; that sample is where the merge dot is drawn. */
export function mergeEvents(groups: TrajGroup[], tol: number): MergeEvent[] {
  const byId = new Map(groups.map((g) => [g.id, g]));
  const out: MergeEvent[] = [];
  for (const g of groups) {
    if (g.mergedInto < 0) continue;
    const host = byId.get(g.mergedInto);
    if (!host) continue;
    const n = Math.min(g.t.length, host.t.length);
    let first = -1;
    for (let i = n - 1; i >= 0; i--) {
      if (Math.abs(g.x[i] - host.x[i]) <= tol) first = i;
      else break;
    }
    if (first >= 0) {
      out.push({ trajId: g.id, into: g.mergedInto, t: g.t[first], x: g.x[first] });
    }
  }
  return out;
}

export function buildTrajectories(
  table: Table, opts: Partial<FrameOptions> & {
    width: number; height: number; title: string;
    xLabel: string; yLabel: string; mergeTol?: number;
  }
): RenderResult {
  const groups = groupTrajectories(table);
  const allT = groups.flatMap((g) => g.t);
  const allX = groups.flatMap((g) => g.x);
  const [tlo, thi] = padRange(...dataRange(allT));
  const [xlo, xhi] = padRange(...dataRange(allX));
  const res = makeFrame({
    ...opts,
    xMin: opts.xMin ?? tlo,
    xMax: opts.xMax ?? thi,
    yMin: opts.yMin ?? xlo,
    yMax: opts.yMax ?? xhi,
  });
  for (const g of groups) {
    const rgb = PALETTE[g.id % PALETTE.length];
    for (let i = 1; i < g.t.length; i++) {
      const thick = g.onShock[i - 1] && g.onShock[i] ? 5 : 1;
      res.raster.line(
        res.px(g.t[i - 1]), res.py(g.x[i - 1]),
        res.px(g.t[i]), res.py(g.x[i]),
        rgb, thick
      );
    }
  }
  const tol = opts.mergeTol ?? defaultMergeTol(groups);
  for (const ev of mergeEvents(groups, tol)) {
    res.raster.disc(
      Math.round(res.px(ev.t)), Math.round(res.py(ev.x)), 4, DOT
    );
  }
  return res;
}

// ---------------------------------------------------------------------------
// anomaly
// ---------------------------------------------------------------------------

export function buildAnomaly(
  table: Table, opts: Partial<FrameOptions> & {
    width: number; height: number; title: string;
    xLabel: string; yLabel: string;
  }
): RenderResult {
  requireColumns(table, ["t", "value"]);
  const mus = numericColumn(table, "t");
  const vals = numericColumn(table, "value");
  for (let i = 0; i < mus.length; i++) {
    if (mus[i] <= 0) {
      throw new InputError(
        `column 't' row ${i + 2} of ${table.file}: ` +
          `log axis needs positive values, got ${mus[i]}`
      );
    }
  }
  const order = mus.map((_, i) => i).sort((a, b) => mus[a] - mus[b]);
  const sx = order.map((i) => mus[i]);
  const sy = order.map((i) => vals[i]);
  const [xlo, xhi] = dataRange(sx);
  const [ylo, yhi] = padRange(...dataRange(sy));
  const res = makeFrame({
    ...opts,
    logX: true,
    xMin: opts.xMin ?? xlo / 1.3,
    xMax: opts.xMax ?? xhi * 1.3,
    yMin: opts.yMin ?? ylo,
    yMax: opts.yMax ?? yhi,
  });
  polyline(res, sx, sy, PALETTE[0], 2);
  for (let i = 0; i < sx.length; i++) {
    res.raster.rect(
      Math.round(res.px(sx[i])) - 3, Math.round(res.py(sy[i])) - 3,
      7, 7, PALETTE[1]
    );
  }
  return res;
}

// ---------------------------------------------------------------------------
// comparison
// ---------------------------------------------------------------------------

export function buildComparison(
  table: Table, opts: { width: number; height: number; title: string;
    xLabel: string; yLabel: string; }
): RenderResult {
  requireColumns(table, ["label", "value"]);
  const cl = columnIndex(table, "label");
  const cv = columnIndex(table, "value");
  const bars: { label: string; value: number }[] = [];
  const notes: string[] = [];
  for (const row of table.rows) {
    const v = Number(row[cv]);
    if (Number.isFinite(v)) bars.push({ label: row[cl], value: v });
    else notes.push(`${row[cl]} = ${row[cv]}`);
  }
  if (bars.length === 0) {
    throw new InputError(`no numeric rows in ${table.file}`);
  }
  const [vlo, vhi] = dataRange(bars.map((b) => b.value));
  const [xMin, xMax] = padRange(Math.min(0, vlo), Math.max(0, vhi));
  const res = makeFrame({
    width: opts.width,
    height: opts.height,
    title: opts.title,
    xLabel: opts.xLabel,
    yLabel: opts.yLabel,
    marginLeft: 150,
    xMin,
    xMax,
    yMin: 0,
    yMax: bars.length + notes.length * 0.7 + 0.4,
  });
  const zero = Math.round(res.px(0));
  res.raster.line(zero, Math.round(res.py(bars.length + 0.4)), zero,
    Math.round(res.py(0)), AXIS);
  for (let i = 0; i < bars.length; i++) {
    const b = bars[i];
    const yc = bars.length - i - 0.5 + 0.4;
    const y0 = Math.round(res.py(yc + 0.3));
    const y1 = Math.round(res.py(yc - 0.3));
    const xv = Math.round(res.px(b.value));
    const rgb = PALETTE[i % PALETTE.length];
    res.raster.rect(Math.min(zero, xv), y0, Math.abs(xv - zero) || 1,
      y1 - y0, rgb);
    drawText(res.raster, 150 - textWidth(b.label) - 8,
      Math.round(res.py(yc)) - 3, b.label, AXIS);
    drawText(res.raster, Math.max(zero, xv) + 6,
      Math.round(res.py(yc)) - 3, fmt(b.value), AXIS);
  }
  for (let i = 0; i < notes.length; i++) {
    drawText(res.raster, 150,
      Math.round(res.py(0.7 * (notes.length - i) - 0.2)) - 3,
      notes[i], AXIS);
  }
  return res;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

function commonOpts(view: SpecView, defaults: {
  title: string; xLabel: string; yLabel: string;
}): { width: number; height: number; title: string;
  xLabel: string; yLabel: string; } {
  return {
    width: view.getInt("width", 900, { lo: 100, hi: 4000 }),
    height: view.getInt("height", 600, { lo: 100, hi: 3000 }),
    title: view.getString("title", defaults.title),
    xLabel: view.getString("x_label", defaults.xLabel),
    yLabel: view.getString("y_label", defaults.yLabel),
  };
}

function rangeOpts(view: SpecView): Partial<FrameOptions> {
  const out: Partial<FrameOptions> = {};
  if (view.has("x_min")) out.xMin = view.getNumber("x_min");
  if (view.has("x_max")) out.xMax = view.getNumber("x_max");
  if (view.has("y_min")) out.yMin = view.getNumber("y_min");
  if (view.has("y_max")) out.yMax = view.getNumber("y_max");
  return out;
}

/** Render the figure a spec file describes; returns the output path. */
export function renderSpecFile(specPath: string): string {
  let text: string;
  try {
    text = fs.readFileSync(specPath, "utf8");
  } catch {
    throw new SpecError(`cannot read spec file ${specPath}`);
  }
  const view = new SpecView(parseSpecText(text));
  const base = path.dirname(specPath);
  const kind = view.getString("kind", undefined, KINDS);
  const input = path.resolve(base, view.getString("input"));
  const out = path.resolve(base, view.getString("out"));

  let res: RenderResult;
  if (kind === "profile") {
    const table = readCsv(input);
    let markers: number[] = [];
    if (view.has("shocks")) {
      const shockTable = readCsv(path.resolve(base, view.getString("shocks")));
      requireColumns(shockTable, ["t", "value"]);
      markers = numericColumn(shockTable, "value");
    }
    res = buildProfile(table, markers, {
      ...commonOpts(view, { title: "", xLabel: "x", yLabel: "phi" }),
      ...rangeOpts(view),
    });
  } else if (kind === "trajectories") {
    const opts = {
      ...commonOpts(view, { title: "", xLabel: "t", yLabel: "x" }),
      ...rangeOpts(view),
      mergeTol: view.has("merge_tol")
        ? view.getNumber("merge_tol", undefined, { lo: 0 })
        : undefined,
    };
    res = buildTrajectories(readCsv(input), opts);
  } else if (kind === "anomaly") {
    res = buildAnomaly(readCsv(input), {
      ...commonOpts(view, { title: "", xLabel: "mu", yLabel: "plateau" }),
      ...rangeOpts(view),
    });
  } else {
    res = buildComparison(readCsv(input),
      commonOpts(view, { title: "", xLabel: "value", yLabel: "" }));
  }
  view.rejectUnknown();

  fs.mkdirSync(path.dirname(out), { recursive: true });
  fs.writeFileSync(out, encodePng(res.raster));
  return out;
}
