/**
 * Prompt templates for every benchmark objective.
 *
 * Bodies are fixed text with {slot} placeholders; rendering only substitutes
 * slots, so a given template and slot map always produce the same prompt.
 * The report rows the model needs are appended as a Data block by the
 * runner, since this harness sends data inline rather than through a
 * file-reading tool.
 */

export type TemplateName =
  | "few_shot_1"
  | "few_shot_2"
  | "few_shot_3"
  | "zero_shot"
  | "micro"
  | "macro"
  | "qamc"
  | "qcalc";

export class PromptTemplate {
  constructor(
    readonly name: TemplateName,
    readonly body: string,
    readonly slots: readonly string[],
  ) {}

  render(values: Record<string, string>): string {
    let text = this.body;
    for (const slot of this.slots) {
      const value = values[slot];
      if (value === undefined) {
        throw new Error(`template ${this.name} is missing a value for {${slot}}`);
      }
      text = text.split(`{${slot}}`).join(value);
    }
    return text;
  }
}

const FEW_SHOT_BASE = `Analyze performance attribution for the {sector} sector using the Brinson model.
Provide:
1. Two bullet points: one for allocation and one for selection, with reasoning and numerical evidence.
2. Convert the bullet points in a CSV format with columns: Sector, Effect Type, Value, Sector Weight, Sector Performance.
3. CSV column "Sector Weight" choices extracted from the bullet points: Underweight, Overweight or Neutral. On selection, write None.
4. CSV column "Sector Performance" choices extracted from the bullet points: Outperformance, Underperformance or Neutral.
- Output should contain only bullet points and the CSV format, separate by 'CSV Format:'
- Write in a format that does not deviate from the following two sentences - choose the words in brackets observing and reasoning attention to the comparison between weights and returns and how that affects the right choice of words:
- The 'X' sector had a '(positive/negative/zero)' allocation effect of 'y'. This was due to the fund being '(overweight/underweight/neutral)' in this sector compared to the benchmark and due to the fact that the benchmark return of 'a' compared to the benchmark total return of 'b' '(outperformed/underperformed)'.
- The 'X' sector also had a '(positive/negative/zero)' selection effect of 'x'. The fund's investments in this sector '(outperformed/underperformed/neutral)' compared to the sector benchmark (Portfolio Return: 'c' vs Benchmark Return: 'd').
Attention: 'Benchmark Total Return' is calculated as the weighted average between columns 'Benchmark weight' and 'Benchmark return'. Calculate it.
Attention: Please only output should be the two bullet points starting with "-" and the CSV format, separated by 'CSV Format:'`;

const REASONING_RULES = `
Attention: These additional explanations helps with your reasoning, especially in the allocation effect:
Positive Allocation occurs in two instances: 1) when the portfolio is 'overweighed' versus the benchmark and the benchmark return 'outperform's the benchmark total return or 2) when the portfolio is 'underweighted' versus the benchmark and the benchmark return 'underperforms' the benchmark total return.
Negative allocation occurs in two instances: 1) when the portfolio is 'overweighed' versus the benchmark and the benchmark return 'underperforms' the benchmark total return or 2) when the portfolio is 'underweighted' versus the benchmark and the benchmark return 'outperforms' the benchmark total return.`;

const NUMERIC_EXAMPLES = `
- The 'Consumer Discret.' sector had a 'positive' allocation effect of '0.03'. This was due to the fund being 'overweight' in this sector compared to the benchmark and due to the the benchmark total return of '0.04' 'outperformed'.
- The 'Consumer Discret.' sector had a 'positive' allocation effect of '0.03'. This was due to the fund being 'underweight' in this sector compared to the benchmark and due to the the benchmark total return of '0.06' 'underperformed'.
- The 'Consumer Discret.' sector had a 'negative' allocation effect of '-0.03'. This was due to the fund being 'overweight' in this sector compared to the benchmark and due to the the benchmark total return of '0.06' 'underperformed'.
- The 'Consumer Discret.' sector had a 'negative' allocation effect of '-0.03'. This was due to the fund being 'underweight' in this sector compared to the benchmark and due to the the benchmark total return of '0.04' 'outperformed'.`;

const ZERO_SHOT = `Analyze performance attribution for the {sector} sector using the Brinson model.
Provide:
1. Two bullet points: one for allocation and one for selection, with reasoning and numerical evidence.
2. Convert the bullet points in a CSV format with columns: Sector, Effect Type, Value, Sector Weight, Sector Performance.
3. CSV column "Sector Weight" choices: Underweight or Overweight. On selection, write None.
4. CSV column "Sector Performance" choices: Outperformance or Underperformance.
- Output should contain only bullet points and the CSV format, separate by 'CSV Format:'.
- Write maximum 3 sentences per bullet point.`;

const MICRO = `Calculate performance attribution using the Brinson Model for a specific Fund and Period with the provided data. Follow these formulas:
- Allocation Effect = (Portfolio Weight - Benchmark Weight) * (Benchmark Return - Benchmark Total Return)
- Selection Effect = Portfolio Weight * (Portfolio Return - Benchmark Return)
- Total Contribution = Allocation Effect + Selection Effect
- Benchmark Total Return = Weighted average of Benchmark weights and Benchmark returns

This is a multi-level problem where sectors below to 'GICS Type'.

Objective:
1. Calculate 'Allocation Effect', 'Selection Effect', and 'Total Contribution' for all 'GICS Sector'. Output in CSV format, with the following columns:
'GICS Sector', 'Allocation Effect', 'Selection Effect', 'Total Contribution', 'Fund', 'Period'. Each record should be on a new line.
2. Calculate 'Allocation Effect', 'Selection Effect', and 'Total Contribution' for all 'GICS Type'. Output in CSV format, with the following columns:
'GICS Type', 'Allocation Effect', 'Selection Effect', 'Total Contribution', 'Fund', 'Period'. Each record should be on a new line.
3. Output should contain only the CSV format, initiated by 'CSV Format:'. No additional sentences, separators, wordings.

Attention: Use pandas for calculations. Ensure accuracy and adherence to the formulas.
Attention: Ensure the output contains only the CSV formatted data.`;

const MACRO = `Your objective is to calculate performance attribution based on the Brinson Model for a specific Fund and Period with the provided data. Follow these formulas:
'Allocation Effect' = (Portfolio Weight - Benchmark Weight) * (Benchmark Return - Benchmark Total Return)
'Selection Effect' = Portfolio Weight * (Portfolio Return - Benchmark Return)
'Total Contribution' = 'Allocation Effect' + 'Selection Effect'
'Portfolio Contribution to Return' = Portfolio Weight * Portfolio Return
'Benchmark Contribution to Return' = Benchmark Weight * Benchmark Return
'Benchmark Total Return' is calculated as the weighted average between Benchmark weights and Benchmark returns.
'Portfolio Return' is the sum over 'Portfolio Contribution to Return' divided by the specific level/segment total weight
'Benchmark Return' is the sum over 'Benchmark Contribution to Return' divided by the specific level/segment total weight

This is a multi-level problem where sectors belong to 'GICS Type'. Think carefully on how to aggregate before giving your answers.
Your goal is to calculate Allocation and Selection effect for all 'GICS Type' from the top-down or highest segment, i.e at the 'GICS Type' level, following these steps:
Step 1: Calculate 'Benchmark Total Return'
Step 2: Calculate the 'Portfolio Return' and 'Benchmark Return' at each 'GICS Type' level.
Step 3: Use these results to calculate the 'Allocation Effect', 'Selection Effect' at each 'GICS Type' level.
Attention: Your output is in a CSV format with the following columns: GICS Type, Effect Type, Value, Fund, Period. Each record should be on a new line.
Attention: 'Value' corresponds to the numerical values calculated in Step 3.
Attention: Output should contain the CSV format, initiated by 'CSV Format:', but no additional sentences.
Attention: Use pandas
Attention: Be intentional, You are expected to provide numerical answers and perform calculations following the formulas and the steps provided.`;

const QAMC = `Question below asks you to calculate performance attribution based on the Brinson Model.

You know that for a specific Fund and Period:
'Allocation Effect' = (Portfolio Weight - Benchmark Weight) * (Benchmark Return - Benchmark Total Return)
'Selection Effect' = Portfolio Weight * (Portfolio Return - Benchmark Return)
'Total Contribution' = 'Allocation Effect' + 'Selection Effect'
'Benchmark Total Return' is calculated as the weighted average between columns 'Benchmark weight' and 'Benchmark return'

You are giving four choices to answer the question. You must choose one of the answers and your output is just the first letter of that answer, nothing else.
Answer 'E' if you do not know the answer.
Attention: Data provided contains various funds and periods. Choose correctly.
Question:
Solve step-by-step, first extract the Fund and Period provided in the question, second calculate 'Benchmark Total Return' for all 'GICS Sector' filtered by the Fund and Period extracted,
third calculate Allocation and Selection Effect for all 'GICS Sector' filtered by the Fund and Period extracted; and finally answer the following: {question}
Choices:
{options}
Answer: `;

const QCALC = `Question below asks you to calculate performance attribution based on the Brinson Model. Make sure to output the answer as a numerical value rounded to five decimal places.

You know that for a specific Fund and Period:
'Allocation Effect' = (Portfolio Weight - Benchmark Weight) * (Benchmark Return - Benchmark Total Return)
'Selection Effect' = Portfolio Weight * (Portfolio Return - Benchmark Return)
'Total Contribution' = 'Allocation Effect' + 'Selection Effect'
'Benchmark Total Return' is calculated as the weighted average between columns 'Benchmark weight' and 'Benchmark return'

Note: Your answer should be a single numerical value rounded to five decimal places.
Attention: Data provided contains various funds and periods. Choose correctly.
Question:
Solve step-by-step, first extract the Fund and Period provided in the question, second calculate 'Benchmark Total Return' for all 'GICS Sector' filtered by the Fund and Period extracted,
third calculate Allocation and Selection Effect for all 'GICS Sector' filtered by the Fund and Period extracted; and finally answer the following: {question}
Note: Your answer should be a single numerical value rounded to five decimal places, nothing else.
Answer: `;

export const TEMPLATES: Record<TemplateName, PromptTemplate> = {
  few_shot_1: new PromptTemplate("few_shot_1", FEW_SHOT_BASE, ["sector"]),
  few_shot_2: new PromptTemplate("few_shot_2", FEW_SHOT_BASE + REASONING_RULES, ["sector"]),
  few_shot_3: new PromptTemplate("few_shot_3", FEW_SHOT_BASE + NUMERIC_EXAMPLES, ["sector"]),
  zero_shot: new PromptTemplate("zero_shot", ZERO_SHOT, ["sector"]),
  micro: new PromptTemplate("micro", MICRO, []),
  macro: new PromptTemplate("macro", MACRO, []),
  qamc: new PromptTemplate("qamc", QAMC, ["question", "options"]),
  qcalc: new PromptTemplate("qcalc", QCALC, ["question", "options"]),
};

export const FACTOR_TEMPLATES: readonly TemplateName[] = [
  "few_shot_1",
  "few_shot_2",
  "few_shot_3",
  "zero_shot",
];

/** Prompt plus inline report rows (this harness has no file-reading tool). */
export function withData(prompt: string, dataCsv: string): string {
  return `${prompt}\n\nData:\n${dataCsv}`;
}
