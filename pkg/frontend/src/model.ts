/** Pure console logic: types mirroring the service API, formatting, slider
 * clamping, the client-side risk cross-check, and bias-table row models. */

export interface MetricsDoc {
  accuracy: number;
  precision: number;
  sensitivity: number;
  specificity: number;
}

export interface CohortEntry {
  absent?: boolean;
  count?: number;
  metrics?: MetricsDoc;
  risk?: number;
  bias_reliability?: number;
  bias_risk?: number;
  direction?: "positive" | "negative" | "zero";
}

export interface ReportDoc {
  class_names: string[];
  baseline: {
    count: number;
    metrics: MetricsDoc;
    risk: number;
    trust: number;
    confusion_matrix: number[][];
  };
  cohorts: Record<string, Record<string, CohortEntry>>;
  flu: {
    p_cough: number;
    p_sneeze: number;
    risk: number;
    p_flu_base: number;
    p_flu_adjusted: number;
  };
}

export interface WhatIfForm {
  alpha: number;
  beta: number;
  pCough: number;
  pSneeze: number;
  cohort: string;
}

export interface WhatIfResponse {
  risk: number;
  pFluBase: number;
  pFluAdjusted: number;
  biasVsBaseline: number;
}

export const SLIDER_BOUNDS = {
  alpha: { min: 0, max: 5, step: 0.1 },
  beta: { min: 0, max: 5, step: 0.1 },
  pCough: { min: 0, max: 1, step: 0.001 },
  pSneeze: { min: 0, max: 1, step: 0.001 },
} as const;

export function clamp(value: number, min: number, max: number): number {
  if (Number.isNaN(value)) return min;
  return Math.min(max, Math.max(min, value));
}

/** Clamp every slider into its legal range so the form can never produce a
 * request the service would reject. */
export function clampForm(form: WhatIfForm): WhatIfForm {
  return {
    alpha: clamp(form.alpha, SLIDER_BOUNDS.alpha.min, SLIDER_BOUNDS.alpha.max),
    beta: clamp(form.beta, SLIDER_BOUNDS.beta.min, SLIDER_BOUNDS.beta.max),
    pCough: clamp(form.pCough, SLIDER_BOUNDS.pCough.min, SLIDER_BOUNDS.pCough.max),
    pSneeze: clamp(form.pSneeze, SLIDER_BOUNDS.pSneeze.min, SLIDER_BOUNDS.pSneeze.max),
    cohort: form.cohort,
  };
}

/** Three-decimal display, matching the published tables. */
export function fmt3(value: number): string {
  return value.toFixed(3);
}

/** Client-side mirror of the service's risk formula; used only to
 * cross-check displayed values in tests, never for display itself. */
export function riskFromRates(
  alpha: number,
  beta: number,
  sensitivity: number,
  specificity: number,
): number {
  return alpha * (1 - sensitivity) + beta * (1 - specificity);
}

export function biasDirectionClass(direction: string | undefined): string {
  if (direction === "positive") return "bias-positive";
  if (direction === "negative") return "bias-negative";
  return "bias-zero";
}

export interface BiasRow {
  attribute: string;
  value: string;
  absent: boolean;
  cells: string[]; // accuracy, sensitivity, specificity, risk, bias-reliability
  directionClass: string;
}

const DASH = "–";

/** Flatten the report's cohort table into display rows; absent cohorts render
 * as dashes, like the published tables do for missing test-set cohorts. */
export function biasTableRows(report: ReportDoc): BiasRow[] {
  const rows: BiasRow[] = [];
  for (const [attribute, values] of Object.entries(report.cohorts)) {
    for (const [value, entry] of Object.entries(values)) {
      if (entry.absent || !entry.metrics) {
        rows.push({
          attribute,
          value,
          absent: true,
          cells: [DASH, DASH, DASH, DASH, DASH],
          directionClass: "bias-absent",
        });
        continue;
      }
      const bias = entry.bias_reliability ?? 0;
      rows.push({
        attribute,
        value,
        absent: false,
        cells: [
          fmt3(entry.metrics.accuracy),
          fmt3(entry.metrics.sensitivity),
          fmt3(entry.metrics.specificity),
          fmt3(entry.risk ?? 0),
          (bias >= 0 ? "+" : "") + fmt3(bias),
        ],
        directionClass: biasDirectionClass(entry.direction),
      });
    }
  }
  return rows;
}

/** Cohort selector options: baseline plus every present cohort value. */
export function cohortOptions(report: ReportDoc): string[] {
  const options = ["baseline"];
  for (const values of Object.values(report.cohorts)) {
    for (const [value, entry] of Object.entries(values)) {
      if (!entry.absent) options.push(value);
    }
  }
  return options;
}

export function whatIfRequestBody(form: WhatIfForm): Record<string, unknown> {
  const clamped = clampForm(form);
  const body: Record<string, unknown> = {
    alpha: clamped.alpha,
    beta: clamped.beta,
    pCough: clamped.pCough,
    pSneeze: clamped.pSneeze,
  };
  if (clamped.cohort && clamped.cohort !== "baseline") {
    body.cohort = clamped.cohort;
  }
  return body;
}
