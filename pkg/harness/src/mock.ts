/**
 * Offline transport: answers come from the engine's own oracle-respond
 * subcommand, so the full loop runs without any API and grades at 100%.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { resultFilename, responseFilename } from "./corpus.js";
import type { CompletionRequest, Transport } from "./transport.js";

export type MockTask = "factors" | "micro" | "macro" | "qa";

export interface MockTransportOptions {
  corpusPath: string;
  task: MockTask;
  bankPath?: string;
  /** Command that runs the engine CLI, e.g. ["python3", "-m", "perfattrib"]. */
  engineCommand?: string[];
}

const DEFAULT_ENGINE = ["python3", "-m", "perfattrib"];

export class MockTransport implements Transport {
  private readonly corpusPath: string;
  private readonly task: MockTask;
  private readonly bankPath?: string;
  private readonly engineCommand: string[];
  private cacheDir?: string;
  private submission?: Map<string, string>;

  constructor(options: MockTransportOptions) {
    this.corpusPath = options.corpusPath;
    this.task = options.task;
    this.bankPath = options.bankPath;
    this.engineCommand = options.engineCommand ?? DEFAULT_ENGINE;
  }

  async complete(request: CompletionRequest): Promise<string> {
    const dir = this.ensureOracleRun();
    const { unit } = request;
    if (this.task === "factors") {
      if (!unit.sector) {
        throw new Error("factor mock needs a sector in the unit key");
      }
      const path = join(dir, responseFilename(unit.fund, unit.period, unit.sector));
      return readFileSync(path, "utf-8");
    }
    if (this.task === "micro" || this.task === "macro") {
      const path = join(dir, resultFilename(unit.fund, unit.period, this.task));
      // Shaped like a live reply: marker first, CSV payload after.
      return "CSV Format:\n" + readFileSync(path, "utf-8");
    }
    if (!unit.questionId) {
      throw new Error("qa mock needs a question id in the unit key");
    }
    const answers = this.loadSubmission(dir);
    const answer = answers.get(unit.questionId);
    if (answer === undefined) {
      throw new Error(`oracle submission has no answer for ${unit.questionId}`);
    }
    return answer;
  }

  private ensureOracleRun(): string {
    if (this.cacheDir) {
      return this.cacheDir;
    }
    const dir = mkdtempSync(join(tmpdir(), "perfattrib-mock-"));
    const args = [
      ...this.engineCommand.slice(1),
      "oracle-respond",
      "--input",
      this.corpusPath,
      "--task",
      this.task,
      "--out-dir",
      dir,
    ];
    if (this.task === "qa") {
      if (!this.bankPath) {
        throw new Error("qa mock needs the public question bank path");
      }
      args.push("--bank", this.bankPath);
    }
    execFileSync(this.engineCommand[0]!, args, { stdio: ["ignore", "ignore", "pipe"] });
    this.cacheDir = dir;
    return dir;
  }

  private loadSubmission(dir: string): Map<string, string> {
    if (this.submission) {
      return this.submission;
    }
    const lines = readFileSync(join(dir, "submission.csv"), "utf-8").split(/\r?\n/);
    const answers = new Map<string, string>();
    for (const line of lines.slice(1)) {
      if (!line) {
        continue;
      }
      const comma = line.indexOf(",");
      answers.set(line.slice(0, comma), line.slice(comma + 1));
    }
    this.submission = answers;
    return answers;
  }
}
