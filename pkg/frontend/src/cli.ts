/**
 * Figure rendering entry point.
 *
 *   node dist/src/cli.js <kind> --run <artifact-dir> --out <figure.svg>
 *
 * <kind> is one of: bands, grid-boxes, rug, trajectory, scatter, mesh,
 * pushforward. The required CSVs are read from the artifact directory by
 * their standard names; missing or malformed inputs exit with code 1 and a
 * message naming the offending file or column.
 */

import { readFileSync, writeFileSync, existsSync } from "node:fs";
import { join } from "node:path";
import { pathToFileURL } from "node:url";
import { parseCsv, SchemaError, Table } from "./csv.js";
import { FigureInputs, RENDERERS } from "./figures.js";

const INPUT_FILES: Record<string, string[]> = {
  bands: ["bands.csv", "truth.csv?"],
  "grid-boxes": ["grid_histogram.csv"],
  rug: ["chain_a.csv"],
  trajectory: ["trajectory_bands.csv", "truth.csv?", "data.csv?"],
  scatter: ["chain_u.csv", "bands.csv", "truth.csv?"],
  mesh: ["mesh_final.csv"],
  pushforward: ["pushforward.csv"],
};

export function loadInputs(kind: string, runDir: string): FigureInputs {
  const files = INPUT_FILES[kind];
  if (files === undefined) {
    throw new SchemaError(`unknown figure kind "${kind}" ` +
      `(known: ${Object.keys(INPUT_FILES).join(", ")})`);
  }
  const inputs: FigureInputs = {};
  for (const spec of files) {
    const optional = spec.endsWith("?");
    const file = optional ? spec.slice(0, -1) : spec;
    const path = join(runDir, file);
    if (!existsSync(path)) {
      if (optional) continue;
      throw new SchemaError(`${kind}: required input ${file} not found in ${runDir}`);
    }
    const name = file.replace(/\.csv$/, "");
    inputs[name] = parseCsv(readFileSync(path, "utf-8")) as Table;
  }
  return inputs;
}

export function renderToFile(kind: string, runDir: string, outPath: string): void {
  const svg = RENDERERS[kind](loadInputs(kind, runDir));
  writeFileSync(outPath, svg, "utf-8");
}

function main(argv: string[]): number {
  const [kind, ...rest] = argv;
  let runDir = "";
  let outPath = "";
  for (let i = 0; i < rest.length; i += 2) {
    if (rest[i] === "--run") runDir = rest[i + 1];
    else if (rest[i] === "--out") outPath = rest[i + 1];
    else {
      console.error(`unknown argument ${rest[i]}`);
      return 1;
    }
  }
  if (!kind || !runDir || !outPath) {
    console.error("usage: cli.js <kind> --run <artifact-dir> --out <figure.svg>");
    return 1;
  }
  try {
    renderToFile(kind, runDir, outPath);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
  return 0;
}

if (process.argv[1] !== undefined
    && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
