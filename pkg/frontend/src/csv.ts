/**
 * Reader for the simulator's diagnostics CSV files: a header row of column
 * names followed by rows of decimal floats. The format never quotes or
 * escapes, so parsing is a strict split on commas.
 */

export interface Table {
  columns: string[];
  rows: number[][];
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 1) {
    throw new Error("empty CSV");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `row ${i + 1}: expected ${columns.length} fields, got ${parts.length}`,
      );
    }
    const row = parts.map((p) => {
      const v = Number(p);
      if (!Number.isFinite(v)) {
        throw new Error(`row ${i + 1}: non-numeric field ${JSON.stringify(p)}`);
      }
      return v;
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new Error("CSV has a header but no data rows");
  }
  return { columns, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column ${JSON.stringify(name)}; have ${table.columns.join(", ")}`,
    );
  }
  return table.rows.map((r) => r[idx]);
}
