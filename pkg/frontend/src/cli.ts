#!/usr/bin/env node
/** Command line: qlmass-plots <kind> --in <artifacts...> --out <figure>
 * [--format svg|png].  Inputs are the CSV/JSON artifacts written by the
 * experiment runner; the kind decides which columns and report fields are
 * consumed. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { ArtifactError } from "./data.js";
import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures.js";
import { PngUnavailableError, svgToPng } from "./png.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .scriptName("qlmass-plots")
    .command("$0 <kind>", "render one figure from experiment artifacts", (y) =>
      y.positional("kind", {
        describe: "figure kind",
        choices: FIGURE_KINDS as unknown as string[],
        type: "string",
        demandOption: true,
      }),
    )
    .option("in", {
      alias: "i",
      type: "string",
      array: true,
      demandOption: true,
      describe: "input artifact paths (.csv and/or .json)",
    })
    .option("out", {
      alias: "o",
      type: "string",
      demandOption: true,
      describe: "output figure path",
    })
    .option("format", {
      type: "string",
      choices: ["svg", "png"] as const,
      default: "svg" as const,
    })
    .strict()
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parse();

  try {
    const svg = renderFigure(args.kind as FigureKind, args.in as string[]);
    const payload =
      args.format === "png" ? await svgToPng(svg) : Buffer.from(svg, "utf-8");
    mkdirSync(dirname(args.out), { recursive: true });
    writeFileSync(args.out, payload);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof ArtifactError || err instanceof PngUnavailableError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
