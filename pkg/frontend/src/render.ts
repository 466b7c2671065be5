/** CLI: render --figure <id> --records <path> --summary <path> --out <path> */

import { writeFileSync } from "fs";

import { render } from "./recipes.js";

function parseArgs(argv: string[]): Record<string, string> {
  const out: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near ${flag}`);
    }
    out[flag.slice(2)] = value;
  }
  for (const required of ["figure", "records", "summary", "out"]) {
    if (!(required in out)) throw new Error(`missing --${required}`);
  }
  return out;
}

function main(): number {
  let args: Record<string, string>;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err));
    console.error("usage: render --figure <id> --records <path> --summary <path> --out <path>");
    return 2;
  }
  try {
    const svg = render(args.figure, args.records, args.summary);
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

process.exit(main());
