#!/usr/bin/env node
import { realpathSync } from "node:fs";
import { fileURLToPath } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { convert, formatManifest } from "./convert.js";
import { dumpActivations } from "./dump.js";

export async function main(argv: string[]): Promise<number> {
  let failed = false;
  await yargs(argv)
    .scriptName("fcpe-convert")
    .command(
      "convert <checkpoint> <out>",
      "convert a safetensors checkpoint into an engine weight archive",
      (y) =>
        y
          .positional("checkpoint", { type: "string", demandOption: true })
          .positional("out", { type: "string", demandOption: true })
          .option("mapping", {
            type: "string",
            describe: "JSON file with rename/metadata overrides",
          }),
      (args) => {
        try {
          const manifest = convert(args.checkpoint, args.out, args.mapping);
          console.log(formatManifest(manifest));
          console.log(`wrote ${args.out}`);
        } catch (err) {
          console.error(String(err instanceof Error ? err.message : err));
          failed = true;
        }
      },
    )
    .command(
      "dump-activations <checkpoint> <wav> <out>",
      "run the reference model and write mel/probability matrices",
      (y) =>
        y
          .positional("checkpoint", { type: "string", demandOption: true })
          .positional("wav", { type: "string", demandOption: true })
          .positional("out", { type: "string", demandOption: true, describe: "output basename" })
          .option("mapping", { type: "string" }),
      (args) => {
        try {
          const result = dumpActivations(args.checkpoint, args.wav, args.out, args.mapping);
          console.log(`wrote ${result.melPath} and ${result.yPath} (${result.frames} frames)`);
        } catch (err) {
          console.error(String(err instanceof Error ? err.message : err));
          failed = true;
        }
      },
    )
    .demandCommand(1)
    .strict()
    .help()
    .parseAsync();
  return failed ? 1 : 0;
}

const isDirectRun = (() => {
  if (!process.argv[1]) return false;
  try {
    // realpath resolves the npm bin symlink back to dist/cli.js
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
})();
if (isDirectRun) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
