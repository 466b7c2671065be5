/** Per-figure SVG recipes over the workbench CSV outputs.
 *
 * Every recipe consumes only the documented CSV schemas (records, summary,
 * trajectory, two-column auxiliaries) and never recomputes metrics. Recipes
 * that use auxiliary files look for them in the directory of the records
 * file.
 */

import { existsSync } from "fs";
import { dirname, join } from "path";

import {
  numeric,
  readColumns,
  readRecords,
  readSummary,
  readTrajectory,
  SchemaError,
  Table,
} from "./csv.js";
import {
  blueColormap,
  boxplot,
  extent,
  panel,
  positiveExtent,
  solverColor,
  Svg,
} from "./svg.js";

export type Recipe = (recordsPath: string, summaryPath: string) => string;

function summaryRows(table: Table, metric: string): Record<string, string>[] {
  return table.rows.filter((row) => row.metric === metric && row.median !== "");
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function sibling(recordsPath: string, name: string): string {
  return join(dirname(recordsPath), name);
}

function requireSibling(recordsPath: string, name: string): string {
  const path = sibling(recordsPath, name);
  if (!existsSync(path)) {
    throw new SchemaError(`expected auxiliary file ${name} next to ${recordsPath}`);
  }
  return path;
}

/** Truth/prediction time-series overlay, one panel per coordinate. */
function trajectoryOverlay(recordsPath: string, _summaryPath: string): string {
  const truth = readTrajectory(requireSibling(recordsPath, "truth.csv"));
  const pred = readTrajectory(requireSibling(recordsPath, "pred.csv"));
  const d = truth.series.length;
  const svg = new Svg(760, 180 * d + 40);
  for (let i = 0; i < d; i++) {
    const values = truth.series[i].concat(pred.series[i].filter(Number.isFinite));
    const p = panel(svg, 70, 30 + 180 * i, 640, 130, extent(truth.t), extent(values), {
      xLabel: i === d - 1 ? "time" : "",
      yLabel: `x${i + 1}`,
      title: i === 0 ? "truth (blue) vs model (red)" : "",
    });
    svg.polyline(truth.t.map(p.xScale), truth.series[i].map(p.yScale), "#1f5fbf", 1.2);
    svg.polyline(pred.t.map(p.xScale), pred.series[i].map(p.yScale), "#d62728", 1.2);
  }
  return svg.render();
}

/** Successive-maxima return map plus power-spectrum overlay. */
function statsOverlay(recordsPath: string, _summaryPath: string): string {
  const truthMap = readColumns(requireSibling(recordsPath, "maxima_truth.csv"), ["s_n", "s_next"]);
  const predMap = readColumns(requireSibling(recordsPath, "maxima_pred.csv"), ["s_n", "s_next"]);
  const truthPsd = readColumns(requireSibling(recordsPath, "psd_truth_x1.csv"), ["frequency", "power"]);
  const predPsd = readColumns(requireSibling(recordsPath, "psd_pred_x1.csv"), ["frequency", "power"]);
  const svg = new Svg(840, 330);
  const mapValues = truthMap.s_n.concat(truthMap.s_next, predMap.s_n, predMap.s_next);
  const left = panel(svg, 70, 40, 300, 240, extent(mapValues), extent(mapValues), {
    xLabel: "s_n",
    yLabel: "s_n+1",
    title: "successive maxima map",
  });
  truthMap.s_n.forEach((x, i) => svg.circle(left.xScale(x), left.yScale(truthMap.s_next[i]), 2, "#1f5fbf"));
  predMap.s_n.forEach((x, i) => svg.circle(left.xScale(x), left.yScale(predMap.s_next[i]), 2, "#d62728"));
  const power = truthPsd.power.concat(predPsd.power);
  const right = panel(
    svg, 470, 40, 300, 240,
    extent(truthPsd.frequency),
    positiveExtent(power),
    { yLog: true, xLabel: "frequency", yLabel: "power", title: "power spectrum (x1)" },
  );
  svg.polyline(truthPsd.frequency.map(right.xScale), truthPsd.power.map(right.yScale), "#1f5fbf", 1.2);
  svg.polyline(predPsd.frequency.map(right.xScale), predPsd.power.map(right.yScale), "#d62728", 1.2);
  return svg.render();
}

/** Index positions for a grid that may contain zero (unusable on a log axis). */
function categoricalPositions(values: number[]): Map<number, number> {
  const positions = new Map<number, number>();
  uniqueSorted(values).forEach((v, i) => positions.set(v, i));
  return positions;
}

/** Training trade-off: per-solver fit angle and the regularized condition
 * number across the regularizer grid. */
function betaTradeoff(_recordsPath: string, summaryPath: string): string {
  const summary = readSummary(summaryPath);
  const thetaRows = summaryRows(summary, "theta_max");
  const kappaRows = summaryRows(summary, "kappa_beta");
  if (thetaRows.length === 0) throw new SchemaError(`${summaryPath}: no theta_max medians`);
  const betas = categoricalPositions(thetaRows.map((r) => Number(r.beta)));
  const svg = new Svg(760, 360);
  const values = thetaRows.map((r) => Number(r.median)).concat(kappaRows.map((r) => Number(r.median)));
  const p = panel(svg, 80, 40, 600, 260, [-0.5, betas.size - 0.5], positiveExtent(values), {
    yLog: true,
    xLabel: "regularizer",
    yLabel: "max fit angle / regularized condition number",
    title: "training trade-off",
  });
  for (const [beta, index] of betas) {
    svg.text(p.xScale(index), p.y0 + p.h + 15, beta === 0 ? "0" : beta.toExponential(0), 8, "middle");
  }
  const solvers = [...new Set(thetaRows.map((r) => r.solver))];
  for (const solver of solvers) {
    const rows = thetaRows
      .filter((r) => r.solver === solver)
      .sort((a, b) => Number(a.beta) - Number(b.beta));
    svg.polyline(
      rows.map((r) => p.xScale(betas.get(Number(r.beta))!)),
      rows.map((r) => p.yScale(Number(r.median))),
      solverColor(solver),
      1.5,
    );
  }
  const kSorted = kappaRows.sort((a, b) => Number(a.beta) - Number(b.beta));
  svg.polyline(
    kSorted.map((r) => p.xScale(betas.get(Number(r.beta))!)),
    kSorted.map((r) => p.yScale(Number(r.median))),
    "#d62728",
    1.5,
    "4 3",
  );
  solvers.forEach((s, i) => svg.text(90, 330 + 0 * i, "", 10));
  svg.text(80, 330, `solvers: ${solvers.join(", ")} (gray shades); red dashed: regularized condition number`, 10);
  return svg.render();
}

/** Box plots of a test metric per solver across the regularizer grid. */
function betaTesting(recordsPath: string, _summaryPath: string): string {
  const records = readRecords(recordsPath);
  const rows = records.rows.filter((r) => r.status === "ok");
  const metricNames = ["vpt", "d_maxima", "e_psd"] as const;
  const betas = categoricalPositions(rows.map((r) => Number(r.beta)));
  const solvers = [...new Set(rows.map((r) => r.solver))];
  const svg = new Svg(820, 240 * metricNames.length + 30);
  metricNames.forEach((metric, mi) => {
    const bounded = rows.filter((r) => r.bounded === "true" && r[metric] !== "");
    const values = bounded.map((r) => Number(r[metric]));
    const p = panel(
      svg, 80, 40 + 240 * mi, 680, 170,
      [-0.5, betas.size - 0.5],
      extent(values.length ? values : [0, 1]),
      { xLabel: mi === metricNames.length - 1 ? "regularizer" : "", yLabel: metric, title: mi === 0 ? "testing-phase metrics over bounded models" : "" },
    );
    for (const [beta, index] of betas) {
      svg.text(p.xScale(index), p.y0 + p.h + 15, beta === 0 ? "0" : beta.toExponential(0), 8, "middle");
    }
    for (const [beta, index] of betas) {
      solvers.forEach((solver, si) => {
        const sample = bounded
          .filter((r) => Number(r.beta) === beta && r.solver === solver)
          .map((r) => Number(r[metric]));
        const xCenter = p.xScale(index) + (si - (solvers.length - 1) / 2) * 14;
        boxplot(svg, p, xCenter, sample, 10, solverColor(solver));
      });
    }
  });
  return svg.render();
}

/** Median column-weighted condition number versus degree with an exponential
 * guide line. */
function degreeGrowth(_recordsPath: string, summaryPath: string): string {
  const summary = readSummary(summaryPath);
  const rows = summaryRows(summary, "kappa_hat").sort((a, b) => Number(a.p) - Number(b.p));
  if (rows.length === 0) throw new SchemaError(`${summaryPath}: no kappa_hat medians`);
  const ps = rows.map((r) => Number(r.p));
  const medians = rows.map((r) => Number(r.median));
  const svg = new Svg(680, 420);
  const p = panel(svg, 80, 40, 520, 300, extent(ps, 0.08), positiveExtent(medians), {
    yLog: true,
    xLabel: "maximum degree",
    yLabel: "condition number (column weighted)",
    title: "exponential growth with the degree",
  });
  svg.polyline(ps.map(p.xScale), medians.map(p.yScale), "#1f5fbf", 1.5);
  ps.forEach((x, i) => svg.circle(p.xScale(x), p.yScale(medians[i]), 3, "#1f5fbf"));
  // Reference guide exp(3 p), anchored at the first median.
  const guide = ps.map((x) => medians[0] * Math.exp(3 * (x - ps[0])));
  svg.polyline(ps.map(p.xScale), guide.map(p.yScale), "#222", 1, "5 4");
  svg.text(90, 370, "dashed: exp(3p) guide", 10);
  return svg.render();
}

/** Histogram of the condition number by delay dimension plus its decay with
 * the lag (and the scalar-probe inset when available). */
function delayInterplay(recordsPath: string, _summaryPath: string): string {
  const records = readRecords(recordsPath);
  const ok = records.rows.filter((r) => r.status === "ok" && r.kappa_hat !== "");
  const histRows = ok.filter((r) => Number(r.tau) === 1);
  const decayRows = ok.filter((r) => Number(r.k) === 2);
  const svg = new Svg(980, 400);
  // Left: histogram of log10(kappa_hat) per delay dimension.
  const logs = histRows.map((r) => Math.log10(Number(r.kappa_hat)));
  const ks = uniqueSorted(histRows.map((r) => Number(r.k)));
  const [lo, hi] = extent(logs, 0.02);
  const bins = 24;
  const counts = new Map<number, number[]>();
  for (const k of ks) counts.set(k, new Array(bins).fill(0));
  for (const row of histRows) {
    const value = Math.log10(Number(row.kappa_hat));
    const bin = Math.min(bins - 1, Math.floor(((value - lo) / (hi - lo)) * bins));
    counts.get(Number(row.k))![bin] += 1;
  }
  const maxCount = Math.max(...[...counts.values()].flat(), 1);
  const left = panel(svg, 70, 40, 380, 280, [lo, hi], [0, maxCount * 1.1], {
    xLabel: "log10 condition number",
    yLabel: "count",
    title: "conditioning by delay dimension",
  });
  const shades = ["#ff9f43", "#777777", "#999999", "#bbbbbb"];
  ks.forEach((k, ki) => {
    const hist = counts.get(k)!;
    for (let b = 0; b < bins; b++) {
      if (hist[b] === 0) continue;
      const x0 = left.xScale(lo + ((hi - lo) * b) / bins);
      const x1 = left.xScale(lo + ((hi - lo) * (b + 1)) / bins);
      const w = (x1 - x0) / ks.length;
      svg.rect(x0 + ki * w, left.yScale(hist[b]), w, left.yScale(0) - left.yScale(hist[b]), shades[ki % shades.length]);
    }
  });
  // Right: median condition number versus lag for two delay blocks.
  const taus = uniqueSorted(decayRows.map((r) => Number(r.tau)));
  const medians = taus.map((tau) => {
    const sample = decayRows.filter((r) => Number(r.tau) === tau).map((r) => Number(r.kappa_hat));
    sample.sort((a, b) => a - b);
    return sample[Math.floor(sample.length / 2)];
  });
  const right = panel(svg, 540, 40, 380, 280, positiveExtent(taus), positiveExtent(medians), {
    xLog: true,
    yLog: true,
    xLabel: "time lag",
    yLabel: "condition number",
    title: "lag restores conditioning",
  });
  svg.polyline(taus.map(right.xScale), medians.map(right.yScale), "#1f5fbf", 1.5);
  taus.forEach((t, i) => svg.circle(right.xScale(t), right.yScale(medians[i]), 3, "#1f5fbf"));
  const probePath = sibling(recordsPath, "x_submatrix.csv");
  if (existsSync(probePath)) {
    const probe = readColumns(probePath, ["tau", "kappa_x"]);
    const probeTaus = uniqueSorted(probe.tau);
    const probeMed = probeTaus.map((tau) => {
      const sample = probe.kappa_x.filter((_, i) => probe.tau[i] === tau).sort((a, b) => a - b);
      return sample[Math.floor(sample.length / 2)];
    });
    svg.polyline(probeTaus.map(right.xScale), probeMed.map(right.yScale), "#2a9d3f", 1.2, "3 3");
    svg.text(550, 350, "green dashed: scalar probe matrix", 10);
  }
  return svg.render();
}

/** Median condition number versus training length, one curve per step size
 * and one panel per model block. */
function trainingLength(_recordsPath: string, summaryPath: string): string {
  const summary = readSummary(summaryPath);
  const rows = summaryRows(summary, "kappa_hat");
  if (rows.length === 0) throw new SchemaError(`${summaryPath}: no kappa_hat medians`);
  const ks = uniqueSorted(rows.map((r) => Number(r.k)));
  const svg = new Svg(500 * ks.length + 80, 420);
  ks.forEach((k, ki) => {
    const block = rows.filter((r) => Number(r.k) === k);
    const medians = block.map((r) => Number(r.median));
    const p = panel(
      svg, 80 + 500 * ki, 40, 400, 300,
      positiveExtent(block.map((r) => Number(r.n_train))),
      positiveExtent(medians),
      { xLog: true, yLog: true, xLabel: "training length", yLabel: ki === 0 ? "condition number" : "", title: `delay dimension ${k}` },
    );
    const hs = uniqueSorted(block.map((r) => Number(r.h)));
    hs.forEach((h, hi) => {
      const curve = block
        .filter((r) => Number(r.h) === h)
        .sort((a, b) => Number(a.n_train) - Number(b.n_train));
      const shade = 40 + Math.floor((160 * hi) / Math.max(hs.length - 1, 1));
      const color = `rgb(${shade},${shade},${255 - shade})`;
      svg.polyline(
        curve.map((r) => p.xScale(Number(r.n_train))),
        curve.map((r) => p.yScale(Number(r.median))),
        color,
        1.4,
      );
      svg.text(p.x0 + 8, p.y0 + 14 + 12 * hi, `h=${h}`, 9, "start");
    });
  });
  return svg.render();
}

/** Fit-versus-conditioning top panel plus per-solver test-metric box plots
 * across the degree grid. */
function sparseSampling(recordsPath: string, summaryPath: string): string {
  const summary = readSummary(summaryPath);
  const records = readRecords(recordsPath);
  const thetaRows = summaryRows(summary, "theta_max");
  const kappaRows = summaryRows(summary, "kappa");
  if (thetaRows.length === 0) throw new SchemaError(`${summaryPath}: no theta_max medians`);
  const ps = uniqueSorted(thetaRows.map((r) => Number(r.p)));
  const svg = new Svg(820, 620);
  const values = thetaRows.map((r) => Number(r.median)).concat(kappaRows.map((r) => Number(r.median)));
  const top = panel(svg, 80, 40, 680, 220, extent(ps, 0.08), positiveExtent(values), {
    yLog: true,
    xLabel: "",
    yLabel: "max fit angle / condition number",
    title: "fit quality and conditioning vs degree",
  });
  const solvers = [...new Set(thetaRows.map((r) => r.solver))];
  for (const solver of solvers) {
    const curve = thetaRows
      .filter((r) => r.solver === solver)
      .sort((a, b) => Number(a.p) - Number(b.p));
    svg.polyline(
      curve.map((r) => top.xScale(Number(r.p))),
      curve.map((r) => top.yScale(Number(r.median))),
      solverColor(solver),
      1.4,
    );
  }
  const kappaCurve = kappaRows
    .filter((r) => r.solver === solvers[0])
    .sort((a, b) => Number(a.p) - Number(b.p));
  svg.polyline(
    kappaCurve.map((r) => top.xScale(Number(r.p))),
    kappaCurve.map((r) => top.yScale(Number(r.median))),
    "#d62728",
    1.4,
    "4 3",
  );
  const okRows = records.rows.filter((r) => r.status === "ok" && r.bounded === "true" && r.vpt !== "");
  const vptValues = okRows.map((r) => Number(r.vpt));
  const bottom = panel(
    svg, 80, 330, 680, 220,
    extent(ps, 0.08),
    extent(vptValues.length ? vptValues : [0, 1]),
    { xLabel: "maximum degree", yLabel: "valid prediction time", title: "bounded-model forecasts" },
  );
  for (const p of ps) {
    solvers.forEach((solver, si) => {
      const sample = okRows
        .filter((r) => Number(r.p) === p && r.solver === solver)
        .map((r) => Number(r.vpt));
      boxplot(svg, bottom, bottom.xScale(p) + (si - (solvers.length - 1) / 2) * 14, sample, 10, solverColor(solver));
    });
  }
  return svg.render();
}

/** Partial-measurement lag sweep: fit/conditioning on top, forecast quality
 * with bounded-fraction coloring below. */
function partialMeasurement(_recordsPath: string, summaryPath: string): string {
  const summary = readSummary(summaryPath);
  const thetaRows = summaryRows(summary, "theta_max");
  const kappaRows = summaryRows(summary, "kappa");
  const vptRows = summary.rows.filter((r) => r.metric === "vpt");
  if (kappaRows.length === 0) throw new SchemaError(`${summaryPath}: no kappa medians`);
  const blocks = uniqueSorted(kappaRows.map((r) => Number(r.p)));
  const svg = new Svg(860, 640);
  const topValues = thetaRows.map((r) => Number(r.median)).concat(kappaRows.map((r) => Number(r.median)));
  const taus = uniqueSorted(kappaRows.map((r) => Number(r.tau)));
  const top = panel(svg, 80, 40, 700, 230, extent(taus, 0.05), positiveExtent(topValues), {
    yLog: true,
    yLabel: "fit angle (black) / condition number (red)",
    title: "scalar-observation models across the lag",
  });
  blocks.forEach((pDeg, bi) => {
    const dash = bi === 0 ? "" : "5 3";
    const theta = thetaRows
      .filter((r) => Number(r.p) === pDeg)
      .sort((a, b) => Number(a.tau) - Number(b.tau));
    svg.polyline(theta.map((r) => top.xScale(Number(r.tau))), theta.map((r) => top.yScale(Number(r.median))), "#222", 1.4, dash);
    const kap = kappaRows
      .filter((r) => Number(r.p) === pDeg)
      .sort((a, b) => Number(a.tau) - Number(b.tau));
    svg.polyline(kap.map((r) => top.xScale(Number(r.tau))), kap.map((r) => top.yScale(Number(r.median))), "#d62728", 1.4, dash);
  });
  const vptValues = vptRows.filter((r) => r.median !== "").map((r) => Number(r.median));
  const bottom = panel(
    svg, 80, 340, 700, 230,
    extent(taus, 0.05),
    extent(vptValues.length ? vptValues : [0, 1], 0.15),
    { xLabel: "time lag", yLabel: "valid prediction time", title: "dot shade: bounded fraction (dark blue = 1)" },
  );
  blocks.forEach((pDeg, bi) => {
    const rows = vptRows
      .filter((r) => Number(r.p) === pDeg)
      .sort((a, b) => Number(a.tau) - Number(b.tau));
    const present = rows.filter((r) => r.median !== "");
    svg.polyline(
      present.map((r) => bottom.xScale(Number(r.tau))),
      present.map((r) => bottom.yScale(Number(r.median))),
      bi === 0 ? "#888" : "#bbb",
      1,
    );
    for (const row of rows) {
      const fraction = row.bounded_fraction === "" ? 0 : Number(row.bounded_fraction);
      const y = row.median === "" ? bottom.yScale.range[0] : bottom.yScale(Number(row.median));
      svg.circle(bottom.xScale(Number(row.tau)), y, 5, blueColormap(fraction));
    }
  });
  return svg.render();
}

export const FIGURES: Record<string, Recipe> = {
  F1_attractor: trajectoryOverlay,
  F2_stats: statsOverlay,
  F3_beta_tradeoff: betaTradeoff,
  F4_beta_testing: betaTesting,
  F5_degree_growth: degreeGrowth,
  F6_delay_interplay: delayInterplay,
  F7_ntrain: trainingLength,
  F8_sparse: sparseSampling,
  F9_partial: partialMeasurement,
  S1_doublescroll: trajectoryOverlay,
  S2_doublescroll: sparseSampling,
  S3_doublescroll: partialMeasurement,
  S4_doublescroll: trajectoryOverlay,
};

export function render(figureId: string, recordsPath: string, summaryPath: string): string {
  const recipe = FIGURES[figureId];
  if (!recipe) {
    throw new SchemaError(
      `unknown figure id ${figureId}; valid ids: ${Object.keys(FIGURES).join(", ")}`,
    );
  }
  // Validate the shared schemas up front so mismatches fail by column name.
  readRecords(recordsPath);
  readSummary(summaryPath);
  return recipe(recordsPath, summaryPath);
}
