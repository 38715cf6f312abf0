import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseCorpus, responseFilename, sliceCsv } from "../src/corpus.js";

const HEADER =
  "GICS Type,GICS Sector,Portfolio Weight,Benchmark Weight,Portfolio Return,Benchmark Return,Period,Fund,Benchmark";

function writeCorpus(lines: string[]): string {
  const dir = mkdtempSync(join(tmpdir(), "corpus-"));
  const path = join(dir, "objective2.csv");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

describe("corpus reader", () => {
  it("groups rows by fund and period preserving order", () => {
    const path = writeCorpus([
      HEADER,
      "Sensitive,Energy,0.1000,0.2000,0.0100,0.0200,Q1,Fund A,Bench A",
      "Defensive,Utilities,0.9000,0.8000,0.0300,0.0100,Q1,Fund A,Bench A",
      "Sensitive,Energy,0.5000,0.5000,0.0100,0.0200,Q2,Fund A,Bench A",
      "Defensive,Utilities,0.5000,0.5000,0.0300,0.0100,Q2,Fund A,Bench A",
    ]);
    const slices = parseCorpus(path);
    expect(slices).toHaveLength(2);
    expect(slices[0]!.rows.map((r) => r.sector)).toEqual(["Energy", "Utilities"]);
    expect(slices[1]!.period).toBe("Q2");
  });

  it("round-trips a slice back to CSV for inline prompting", () => {
    const path = writeCorpus([
      HEADER,
      "Sensitive,Energy,0.1000,0.2000,0.0100,0.0200,Q1,Fund A,Bench A",
    ]);
    const [slice] = parseCorpus(path);
    expect(sliceCsv(slice!)).toBe(
      HEADER + "\nSensitive,Energy,0.1000,0.2000,0.0100,0.0200,Q1,Fund A,Bench A\n",
    );
  });

  it("rejects a renamed header column", () => {
    const path = writeCorpus([HEADER.replace("GICS Sector", "Sector"), ""]);
    expect(() => parseCorpus(path)).toThrow(/header column 2/);
  });

  it("rejects ragged rows", () => {
    const path = writeCorpus([HEADER, "Sensitive,Energy,0.1"]);
    expect(() => parseCorpus(path)).toThrow(/row 2/);
  });

  it("names response files exactly like the grader expects", () => {
    expect(
      responseFilename("Portfolio Defensive", "1/31/2022 to 3/31/2022", "Consumer Discret."),
    ).toBe("Portfolio_Defensive__1-31-2022_to_3-31-2022__Consumer_Discret..txt");
  });
});
