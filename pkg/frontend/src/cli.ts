#!/usr/bin/env node
/**
 * render_figures <csv> --x <col> --series <col> [--y <col>] [--std <col>]
 *                      [--logx] --out <path>
 *
 * Reads an experiment CSV and writes an SVG figure with one line per
 * series value and standard-deviation error bars.  Exits 1 on usage
 * errors and 2 on data errors (missing columns, empty data).
 */

import { readFileSync, renameSync, writeFileSync } from "fs";
import { CsvError, MissingColumnError, parseCsv } from "./csv.js";
import { FigureError, FigureSpec, renderSvg } from "./figure.js";

interface Args {
  input: string;
  out: string;
  spec: FigureSpec;
}

export function parseArgs(argv: string[]): Args {
  let input: string | undefined;
  let out: string | undefined;
  let x: string | undefined;
  let series: string | undefined;
  let y = "mean";
  let std = "std";
  let logX = false;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) {
        throw new UsageError(`${arg} needs a value`);
      }
      return argv[i];
    };
    if (arg === "--x") x = next();
    else if (arg === "--series") series = next();
    else if (arg === "--y") y = next();
    else if (arg === "--std") std = next();
    else if (arg === "--logx") logX = true;
    else if (arg === "--out") out = next();
    else if (arg.startsWith("--")) throw new UsageError(`unknown option ${arg}`);
    else if (input === undefined) input = arg;
    else throw new UsageError(`unexpected argument ${arg}`);
  }
  if (!input) throw new UsageError("missing input CSV path");
  if (!x) throw new UsageError("--x is required");
  if (!series) throw new UsageError("--series is required");
  if (!out) throw new UsageError("--out is required");
  return {
    input,
    out,
    spec: { xColumn: x, seriesColumn: series, yColumn: y, stdColumn: std, logX },
  };
}

export class UsageError extends Error {}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`usage error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  try {
    const text = readFileSync(args.input, "utf-8");
    const table = parseCsv(text);
    const svg = renderSvg(table, args.spec);
    // Atomic overwrite: write next to the target, then rename.
    const tmp = `${args.out}.tmp-${process.pid}`;
    writeFileSync(tmp, svg);
    renameSync(tmp, args.out);
    process.stdout.write(`wrote ${args.out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      process.stderr.write(`error: missing column: ${err.column}\n`);
      return 2;
    }
    if (err instanceof CsvError || err instanceof FigureError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
