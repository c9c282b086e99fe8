import { describe, expect, it } from "vitest";
import { column, parseCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("reads header and float rows", () => {
    const t = parseCsv("t,energy\n0,1.5\n0.1,1.25e0\n");
    expect(t.columns).toEqual(["t", "energy"]);
    expect(t.rows).toEqual([
      [0, 1.5],
      [0.1, 1.25],
    ]);
    expect(column(t, "energy")).toEqual([1.5, 1.25]);
  });

  it("round-trips seventeen-digit floats exactly", () => {
    const v = 0.00062379014903093737;
    const t = parseCsv(`dt,error\n0.01,${v.toPrecision(17)}\n`);
    expect(column(t, "error")[0]).toBe(v);
  });

  it("rejects ragged rows, bad numbers, empty bodies", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/expected 2 fields/);
    expect(() => parseCsv("a,b\n1,zap\n")).toThrow(/non-numeric/);
    expect(() => parseCsv("a,b\n")).toThrow(/no data rows/);
    expect(() => parseCsv("")).toThrow(/empty/);
  });

  it("names the missing column", () => {
    const t = parseCsv("t,x\n1,2\n");
    expect(() => column(t, "energy")).toThrow(/energy/);
  });
});
