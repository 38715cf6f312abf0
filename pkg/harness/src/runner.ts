/**
 * Objective runner: loops over units (sector, fund-period, or question),
 * prompts the transport with bounded concurrency, and writes files in the
 * exact shapes the grader consumes. A unit whose transport fails after
 * retries is recorded as an unparseable response instead of aborting the
 * run.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import {
  CorpusSlice,
  corpusCsv,
  parseCorpus,
  responseFilename,
  resultFilename,
  sliceCsv,
} from "./corpus.js";
import { FACTOR_TEMPLATES, TEMPLATES, TemplateName, withData } from "./prompts.js";
import type { Transport, UnitKey } from "./transport.js";

export type Objective = "factors" | "micro" | "macro" | "qa";

export interface RunOptions {
  objective: Objective;
  corpusPath: string;
  transport: Transport;
  outDir: string;
  template?: TemplateName;
  bankPath?: string;
  concurrency?: number;
}

export interface RunReport {
  written: string[];
  failures: { unit: UnitKey; reason: string }[];
}

interface BankQuestion {
  id: string;
  kind: "QAMC" | "QCalc";
  question: string;
  options?: Record<string, string>;
}

const RESPONSE_MARKER = "CSV Format:";

export async function runObjective(options: RunOptions): Promise<RunReport> {
  const concurrency = options.concurrency ?? 4;
  mkdirSync(options.outDir, { recursive: true });
  const slices = parseCorpus(options.corpusPath);
  switch (options.objective) {
    case "factors":
      return runFactors(options, slices, concurrency);
    case "micro":
    case "macro":
      return runTables(options, options.objective, slices, concurrency);
    case "qa":
      return runQuestions(options, slices, concurrency);
  }
}

async function mapBounded<T>(
  items: T[],
  limit: number,
  worker: (item: T) => Promise<void>,
): Promise<void> {
  let next = 0;
  const lanes = Array.from({ length: Math.max(1, Math.min(limit, items.length)) }, async () => {
    while (next < items.length) {
      const index = next++;
      await worker(items[index]!);
    }
  });
  await Promise.all(lanes);
}

function pickFactorTemplate(name: TemplateName | undefined): TemplateName {
  const chosen = name ?? "few_shot_1";
  if (!FACTOR_TEMPLATES.includes(chosen)) {
    throw new Error(`objective 'factors' needs one of ${FACTOR_TEMPLATES.join(", ")}`);
  }
  return chosen;
}

async function runFactors(
  options: RunOptions,
  slices: CorpusSlice[],
  concurrency: number,
): Promise<RunReport> {
  const template = TEMPLATES[pickFactorTemplate(options.template)];
  const report: RunReport = { written: [], failures: [] };
  const units = slices.flatMap((slice) =>
    slice.rows.map((row) => ({ slice, sector: row.sector })),
  );
  await mapBounded(units, concurrency, async ({ slice, sector }) => {
    const unit: UnitKey = { fund: slice.fund, period: slice.period, sector };
    const prompt = withData(template.render({ sector }), sliceCsv(slice));
    const path = join(options.outDir, responseFilename(slice.fund, slice.period, sector));
    try {
      const reply = await options.transport.complete({ prompt, unit });
      writeFileSync(path, reply.endsWith("\n") ? reply : reply + "\n");
      report.written.push(path);
    } catch (error) {
      // No marker, so the grader classifies it unparseable and scores zero.
      writeFileSync(path, `transport failure: ${describe(error)}\n`);
      report.written.push(path);
      report.failures.push({ unit, reason: describe(error) });
    }
  });
  return report;
}

async function runTables(
  options: RunOptions,
  task: "micro" | "macro",
  slices: CorpusSlice[],
  concurrency: number,
): Promise<RunReport> {
  if (options.template && options.template !== task) {
    throw new Error(`objective '${task}' uses the '${task}' template`);
  }
  const template = TEMPLATES[task];
  const report: RunReport = { written: [], failures: [] };
  await mapBounded(slices, concurrency, async (slice) => {
    const unit: UnitKey = { fund: slice.fund, period: slice.period };
    const prompt = withData(template.render({}), sliceCsv(slice));
    try {
      const reply = await options.transport.complete({ prompt, unit });
      const payload = extractCsvPayload(reply);
      const path = join(options.outDir, resultFilename(slice.fund, slice.period, task));
      writeFileSync(path, payload.endsWith("\n") ? payload : payload + "\n");
      report.written.push(path);
    } catch (error) {
      // Not a .csv, so grading skips it while the failure stays on disk.
      const path = join(
        options.outDir,
        resultFilename(slice.fund, slice.period, task) + ".failed.txt",
      );
      writeFileSync(path, `transport failure: ${describe(error)}\n`);
      report.written.push(path);
      report.failures.push({ unit, reason: describe(error) });
    }
  });
  return report;
}

/** Live replies lead with the marker; everything after it is the table. */
export function extractCsvPayload(reply: string): string {
  const at = reply.indexOf(RESPONSE_MARKER);
  const payload = at < 0 ? reply : reply.slice(at + RESPONSE_MARKER.length);
  return payload.replace(/^\s+/, "");
}

function loadBank(path: string): BankQuestion[] {
  return readFileSync(path, "utf-8")
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as BankQuestion);
}

async function runQuestions(
  options: RunOptions,
  slices: CorpusSlice[],
  concurrency: number,
): Promise<RunReport> {
  if (!options.bankPath) {
    throw new Error("objective 'qa' needs the public question bank path");
  }
  const questions = loadBank(options.bankPath);
  const allData = corpusCsv(slices);
  const report: RunReport = { written: [], failures: [] };
  const answers = new Map<string, string>();
  await mapBounded(questions, concurrency, async (question) => {
    const template = TEMPLATES[question.kind === "QAMC" ? "qamc" : "qcalc"];
    const optionsText = question.options
      ? Object.entries(question.options)
          .map(([letter, value]) => `${letter}: ${value}`)
          .join("\n")
      : "";
    const prompt = withData(
      template.render({ question: question.question, options: optionsText }),
      allData,
    );
    const unit: UnitKey = { fund: "", period: "", questionId: question.id };
    const path = join(options.outDir, `${question.id}.txt`);
    try {
      const reply = await options.transport.complete({ prompt, unit });
      const answer = reply.trim().split(/\s+/)[0] ?? "";
      writeFileSync(path, reply.endsWith("\n") ? reply : reply + "\n");
      answers.set(question.id, answer);
      report.written.push(path);
    } catch (error) {
      writeFileSync(path, `transport failure: ${describe(error)}\n`);
      answers.set(question.id, "");
      report.written.push(path);
      report.failures.push({ unit, reason: describe(error) });
    }
  });
  const submissionPath = join(options.outDir, "submission.csv");
  const lines = ["id,answer"];
  for (const question of questions) {
    lines.push(`${question.id},${answers.get(question.id) ?? ""}`);
  }
  writeFileSync(submissionPath, lines.join("\n") + "\n");
  report.written.push(submissionPath);
  return report;
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
