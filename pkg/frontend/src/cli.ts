/**
 * doasel-figures <command> --in <csv> --out <svg>
 *
 * Commands
 *   timeline   selections.csv   -> channel-activation timeline
 *              extra flags: --mode auto|simo|mimo, --spacing-factor F, --wavelength L
 *   mse-step   trajectory.csv   -> squared error vs step (log scale)
 *   mse-snr    mse_vs_snr.csv   -> average MSE vs SNR (log scale)
 */

import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { renderMseSnr } from "./mseSnr.js";
import { renderMseStep } from "./mseStep.js";
import { renderTimeline, TimelineOptions } from "./timeline.js";

const USAGE =
  "usage: doasel-figures <timeline|mse-step|mse-snr> --in <csv> --out <svg> " +
  "[--mode auto|simo|mimo] [--spacing-factor F] [--wavelength L]";

interface Args {
  command: string;
  inPath: string;
  outPath: string;
  timeline: TimelineOptions;
}

function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  if (!command || !["timeline", "mse-step", "mse-snr"].includes(command)) {
    throw new Error(USAGE);
  }
  let inPath: string | undefined;
  let outPath: string | undefined;
  const timeline: TimelineOptions = {};
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}\n${USAGE}`);
    switch (flag) {
      case "--in": inPath = value; break;
      case "--out": outPath = value; break;
      case "--mode":
        if (!["auto", "simo", "mimo"].includes(value)) {
          throw new Error(`--mode must be auto, simo, or mimo, got '${value}'`);
        }
        timeline.mode = value as TimelineOptions["mode"];
        break;
      case "--spacing-factor": timeline.spacingFactor = Number(value); break;
      case "--wavelength": timeline.wavelength = Number(value); break;
      default: throw new Error(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  if (!inPath || !outPath) throw new Error(USAGE);
  return { command, inPath, outPath, timeline };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    let svg: string;
    if (args.command === "timeline") {
      svg = renderTimeline(args.inPath, args.timeline);
    } else if (args.command === "mse-step") {
      svg = renderMseStep(args.inPath);
    } else {
      svg = renderMseSnr(args.inPath);
    }
    writeFileSync(args.outPath, svg);
  } catch (err) {
    console.error(`doasel-figures ${args.command}: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? "").href) {
  process.exit(main(process.argv.slice(2)));
}
