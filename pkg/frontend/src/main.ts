#!/usr/bin/env node
/**
 * plots render <spec-file>
 *
 * Spec files use the same flat `key = value` format as the experiment
 * CLI configs. Exit codes: 0 written, 2 spec or input problem.
 */

import { InputError, SpecError } from "./errors";
import { KINDS, renderSpecFile } from "./plots";

export function main(argv: string[]): number {
  if (argv.length !== 2 || argv[0] !== "render") {
    process.stderr.write(
      "usage: plots render <spec-file>\n" +
        `  kind = ${KINDS.join(" | ")}\n`
    );
    return 2;
  }
  try {
    const out = renderSpecFile(argv[1]);
    process.stdout.write(out + "\n");
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof InputError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
