#!/usr/bin/env node
/**
 * Harness entry point.
 *
 *   perfattrib-harness --objective factors --corpus bench/objective2.csv \
 *       --out responses --mock
 *   perfattrib-harness --objective qa --corpus bench/objective2.csv \
 *       --bank bank.jsonl --out answers --endpoint https://api.openai.com/v1
 *
 * Exactly one of --mock or --endpoint must be given. In endpoint mode the
 * API key is read from the environment variable named by --api-key-var
 * (default OPENAI_API_KEY).
 */

import { parseArgs } from "node:util";

import { MockTransport } from "./mock.js";
import type { TemplateName } from "./prompts.js";
import { runObjective, Objective } from "./runner.js";
import { HttpTransport, Transport } from "./transport.js";

const OBJECTIVES: Objective[] = ["factors", "micro", "macro", "qa"];

export async function main(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      objective: { type: "string" },
      corpus: { type: "string" },
      out: { type: "string" },
      template: { type: "string" },
      bank: { type: "string" },
      endpoint: { type: "string" },
      mock: { type: "boolean", default: false },
      model: { type: "string" },
      "api-key-var": { type: "string" },
      concurrency: { type: "string", default: "4" },
      engine: { type: "string", default: "python3 -m perfattrib" },
    },
  });

  const objective = values.objective as Objective | undefined;
  if (!objective || !OBJECTIVES.includes(objective)) {
    console.error(`--objective must be one of ${OBJECTIVES.join(", ")}`);
    return 2;
  }
  if (!values.corpus || !values.out) {
    console.error("--corpus and --out are required");
    return 2;
  }
  if (Boolean(values.mock) === Boolean(values.endpoint)) {
    console.error("choose exactly one of --mock or --endpoint");
    return 2;
  }

  let transport: Transport;
  if (values.mock) {
    transport = new MockTransport({
      corpusPath: values.corpus,
      task: objective,
      bankPath: values.bank,
      engineCommand: values.engine.split(" ").filter(Boolean),
    });
  } else {
    transport = new HttpTransport({
      endpoint: values.endpoint!,
      model: values.model,
      apiKeyVar: values["api-key-var"],
    });
  }

  try {
    const report = await runObjective({
      objective,
      corpusPath: values.corpus,
      transport,
      outDir: values.out,
      template: values.template as TemplateName | undefined,
      bankPath: values.bank,
      concurrency: Number(values.concurrency),
    });
    const failed = report.failures.length;
    console.log(
      `wrote ${report.written.length} file(s) to ${values.out}` +
        (failed ? `, ${failed} unit(s) failed transport` : ""),
    );
    return 0;
  } catch (error) {
    console.error(`error: ${error instanceof Error ? error.message : error}`);
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
