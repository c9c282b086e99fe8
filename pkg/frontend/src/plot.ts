/**
 * The three figure kinds produced from diagnostics CSVs: time series,
 * log-log convergence with a fitted order, and spectral decay. Each render
 * returns the SVG text plus a sidecar with the fitted parameters.
 */

import { Table, column } from "./csv.js";
import { convergenceOrder } from "./fit.js";
import { Series, renderSvg } from "./svg.js";

export type PlotKind = "timeseries" | "convergence" | "spectrum";

export interface PlotSpec {
  kind: PlotKind;
  columns: string[];
  logX: boolean;
  logY: boolean;
  title: string;
}

export interface Rendered {
  svg: string;
  sidecar: string;
}

function fullPrecision(v: number): string {
  return v.toPrecision(17);
}

export function render(table: Table, spec: PlotSpec): Rendered {
  switch (spec.kind) {
    case "timeseries":
      return renderTimeseries(table, spec);
    case "convergence":
      return renderConvergence(table, spec);
    case "spectrum":
      return renderSpectrum(table, spec);
  }
}

function renderTimeseries(table: Table, spec: PlotSpec): Rendered {
  const cols = spec.columns.length > 0 ? spec.columns : [table.columns[1]];
  const t = column(table, "t");
  const series: Series[] = cols.map((name) => ({
    label: name,
    x: t,
    y: column(table, name),
  }));
  const svg = renderSvg(series, {
    logX: spec.logX,
    logY: spec.logY,
    xLabel: "t",
    yLabel: cols.join(", "),
    title: spec.title,
  });
  const sidecar = series
    .map((s) => `final_${s.label} = ${fullPrecision(s.y[s.y.length - 1])}`)
    .join("\n");
  return { svg, sidecar: sidecar + "\n" };
}

function renderConvergence(table: Table, spec: PlotSpec): Rendered {
  const dt = column(table, spec.columns[0] ?? "dt");
  const err = column(table, spec.columns[1] ?? "error");
  const fit = convergenceOrder(dt, err);
  const fitted: Series = {
    label: `fit: order ${Number(fit.slope.toPrecision(4))}`,
    x: dt,
    y: dt.map((v) => Math.exp(fit.intercept + fit.slope * Math.log(v))),
  };
  const svg = renderSvg(
    [{ label: "error", x: dt, y: err }, fitted],
    {
      logX: true,
      logY: true,
      xLabel: "dt",
      yLabel: "error",
      title: spec.title,
    },
  );
  const sidecar =
    `fitted_slope = ${fullPrecision(fit.slope)}\n` +
    `fitted_intercept = ${fullPrecision(fit.intercept)}\n`;
  return { svg, sidecar };
}

function renderSpectrum(table: Table, spec: PlotSpec): Rendered {
  const k = column(table, spec.columns[0] ?? "k_shell");
  const cols =
    spec.columns.length > 1
      ? spec.columns.slice(1)
      : table.columns.filter((c) => c !== "k_shell");
  const series: Series[] = cols.map((name) => {
    const y = column(table, name);
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < k.length; i++) {
      if (k[i] > 0 && y[i] > 0) {
        xs.push(k[i]);
        ys.push(y[i]);
      }
    }
    return { label: name, x: xs, y: ys };
  });
  const svg = renderSvg(series, {
    logX: true,
    logY: true,
    xLabel: "|k|",
    yLabel: "rms amplitude",
    title: spec.title,
  });
  const fits = series
    .map((s) => {
      const fit = convergenceOrder(s.x, s.y);
      return `decay_exponent_${s.label} = ${fullPrecision(fit.slope)}`;
    })
    .join("\n");
  return { svg, sidecar: fits + "\n" };
}
