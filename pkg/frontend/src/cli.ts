#!/usr/bin/env node
/**
 * Thin file-to-file command: read a diagnostics CSV, write an SVG figure and
 * a .txt sidecar with the fitted parameters next to it.
 *
 *   mcshlab-plot --csv runs/convergence.csv --kind convergence --out fig.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { parseCsv } from "./csv.js";
import { PlotKind, render } from "./plot.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        csv: { type: "string" },
        kind: { type: "string" },
        out: { type: "string" },
        columns: { type: "string", default: "" },
        logx: { type: "boolean", default: false },
        logy: { type: "boolean", default: false },
        title: { type: "string", default: "" },
      },
    });
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const { csv, kind, out, columns, logx, logy, title } = parsed.values;
  if (!csv || !kind || !out) {
    console.error("usage: mcshlab-plot --csv FILE --kind KIND --out FILE.svg");
    return 2;
  }
  if (!["timeseries", "convergence", "spectrum"].includes(kind)) {
    console.error(`unknown kind ${JSON.stringify(kind)}`);
    return 2;
  }
  try {
    const table = parseCsv(readFileSync(csv, "utf-8"));
    const rendered = render(table, {
      kind: kind as PlotKind,
      columns: (columns ?? "")
        .split(",")
        .map((c) => c.trim())
        .filter((c) => c.length > 0),
      logX: Boolean(logx),
      logY: Boolean(logy),
      title: title || `${kind}: ${csv}`,
    });
    writeFileSync(out, rendered.svg);
    writeFileSync(sidecarPath(out), rendered.sidecar);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  return 0;
}

export function sidecarPath(out: string): string {
  return out.replace(/\.[^./\\]+$/, "") + ".txt";
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
