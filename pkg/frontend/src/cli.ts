#!/usr/bin/env node
import { parseArgs } from "node:util";

import { render } from "./figure.js";

const USAGE = `usage: figures <input.csv> <output.svg> [--scenario NAME] [--tau X]

Renders the five-panel metrics figure (drives, P1/P5/P8, Pe, Pp, Pea)
from a simulator metrics CSV. --tau rescales the time axis to units of
the pulse time scale; --scenario adds a title.`;

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        scenario: { type: "string" },
        tau: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  if (args.values.help) {
    console.log(USAGE);
    return 0;
  }
  if (args.positionals.length !== 2) {
    console.error(USAGE);
    return 2;
  }
  const [csvPath, outPath] = args.positionals;
  let tau: number | undefined;
  if (args.values.tau !== undefined) {
    tau = Number(args.values.tau);
    if (!Number.isFinite(tau) || tau <= 0) {
      console.error(`error: --tau must be a positive number, got ${args.values.tau}`);
      return 2;
    }
  }
  try {
    render({ csvPath, outPath, scenario: args.values.scenario, tau });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  console.log(`wrote ${outPath}`);
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
