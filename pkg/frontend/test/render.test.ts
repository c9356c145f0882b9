import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync, existsSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join, dirname } from "path";
import { fileURLToPath } from "url";

import { parseCsv, column, MissingColumnError } from "../src/csv.js";
import { collectSeries, renderSvg } from "../src/figure.js";
import { run } from "../src/cli.js";

const here = dirname(fileURLToPath(import.meta.url));
const goldenCsv = join(here, "fixtures", "tradeoff.csv");

function tmpFile(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "figs-")), name);
}

describe("csv parsing", () => {
  it("reads comments, header, and rows", () => {
    const table = parseCsv(readFileSync(goldenCsv, "utf-8"));
    expect(table.comments[0]).toContain("config:");
    expect(table.columns).toContain("mean");
    expect(table.rows.length).toBe(8);
    expect(column(table, "eps").length).toBe(8);
  });

  it("raises a typed error naming a missing column", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => column(table, "mean")).toThrowError(MissingColumnError);
  });
});

describe("figure construction", () => {
  const spec = {
    xColumn: "m",
    seriesColumn: "eps",
    yColumn: "mean",
    stdColumn: "std",
    logX: true,
  };

  it("builds one series per eps level", () => {
    const table = parseCsv(readFileSync(goldenCsv, "utf-8"));
    const series = collectSeries(table, spec);
    expect([...series.keys()]).toEqual(["0.0", "0.05"]);
    for (const points of series.values()) {
      expect(points.length).toBe(4);
    }
  });

  it("drops rows with non-finite means (skipped grid points)", () => {
    const table = parseCsv(
      "m,t,eps,mean,std,note\n2,50,0.0,0.5,0.1,\n3,33,0.0,nan,nan,skipped\n"
    );
    const series = collectSeries(table, spec);
    expect(series.get("0.0")!.length).toBe(1);
  });

  it("emits svg with series polylines, error bars, and a log axis", () => {
    const table = parseCsv(readFileSync(goldenCsv, "utf-8"));
    const svg = renderSvg(table, spec);
    expect(svg).toContain("<svg");
    expect((svg.match(/class="series"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="errorbar"/g) ?? []).length).toBeGreaterThan(0);
    expect(svg).toContain("m (log scale)");
    expect(svg).toContain("eps=0.05");
  });
});

describe("cli", () => {
  const baseArgs = [goldenCsv, "--x", "m", "--series", "eps", "--logx"];

  it("renders the golden tradeoff csv", () => {
    const out = tmpFile("fig.svg");
    const code = run([...baseArgs, "--out", out]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect((svg.match(/class="series"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="errorbar"/g) ?? []).length).toBeGreaterThan(0);
  });

  it("is byte-identical across reruns", () => {
    const a = tmpFile("a.svg");
    const b = tmpFile("b.svg");
    expect(run([...baseArgs, "--out", a])).toBe(0);
    expect(run([...baseArgs, "--out", b])).toBe(0);
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("does not mutate the input csv", () => {
    const before = readFileSync(goldenCsv, "utf-8");
    run([...baseArgs, "--out", tmpFile("fig.svg")]);
    expect(readFileSync(goldenCsv, "utf-8")).toBe(before);
  });

  it("exits 2 and names the column when a column is missing", () => {
    const out = tmpFile("fig.svg");
    const messages: string[] = [];
    const original = process.stderr.write.bind(process.stderr);
    process.stderr.write = ((chunk: string) => {
      messages.push(String(chunk));
      return true;
    }) as typeof process.stderr.write;
    try {
      const code = run([goldenCsv, "--x", "bogus", "--series", "eps", "--out", out]);
      expect(code).toBe(2);
    } finally {
      process.stderr.write = original;
    }
    expect(messages.join("")).toContain("missing column: bogus");
    expect(existsSync(out)).toBe(false);
  });

  it("errors on a header-only csv without writing a file", () => {
    const input = tmpFile("empty.csv");
    writeFileSync(input, "m,t,eps,mean,std,note\n");
    const out = tmpFile("fig.svg");
    const code = run([input, "--x", "m", "--series", "eps", "--out", out]);
    expect(code).toBe(2);
    expect(existsSync(out)).toBe(false);
  });

  it("exits 2 for a missing input file", () => {
    const code = run(["no-such.csv", "--x", "m", "--series", "eps", "--out", tmpFile("f.svg")]);
    expect(code).toBe(2);
  });

  it("exits 1 on usage errors", () => {
    expect(run([goldenCsv, "--x", "m", "--series", "eps"])).toBe(1);
    expect(run(["--mystery"])).toBe(1);
  });
});
