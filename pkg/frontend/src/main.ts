/** DOM bootstrap: wires sliders, cohort selector, bias table, and outputs. */

import { fetchReport, postWhatIf } from "./api";
import { DEBOUNCE_MS, WhatIfController } from "./controller";
import {
  ReportDoc,
  SLIDER_BOUNDS,
  WhatIfForm,
  biasTableRows,
  cohortOptions,
  fmt3,
} from "./model";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function readForm(): WhatIfForm {
  return {
    alpha: Number(($("alpha") as HTMLInputElement).value),
    beta: Number(($("beta") as HTMLInputElement).value),
    pCough: Number(($("p-cough") as HTMLInputElement).value),
    pSneeze: Number(($("p-sneeze") as HTMLInputElement).value),
    cohort: ($("cohort") as HTMLSelectElement).value,
  };
}

function showSliderValues(): void {
  $("alpha-value").textContent = ($("alpha") as HTMLInputElement).value;
  $("beta-value").textContent = ($("beta") as HTMLInputElement).value;
  $("p-cough-value").textContent = ($("p-cough") as HTMLInputElement).value;
  $("p-sneeze-value").textContent = ($("p-sneeze") as HTMLInputElement).value;
}

function renderBiasTable(report: ReportDoc): void {
  const tbody = $("bias-rows") as HTMLTableSectionElement;
  tbody.textContent = "";
  for (const row of biasTableRows(report)) {
    const tr = document.createElement("tr");
    tr.className = row.directionClass;
    tr.dataset.cohort = row.value;
    const headerCells = [row.attribute, row.value];
    for (const text of headerCells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    for (const text of row.cells) {
      const td = document.createElement("td");
      td.className = "num";
      td.textContent = text;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
}

function populateCohorts(report: ReportDoc): void {
  const select = $("cohort") as HTMLSelectElement;
  select.textContent = "";
  for (const name of cohortOptions(report)) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    select.appendChild(option);
  }
}

function setBanner(message: string | null): void {
  const banner = $("error-banner");
  banner.textContent = message ?? "";
  banner.classList.toggle("hidden", message === null);
  $("retry").classList.toggle("hidden", message === null);
}

async function boot(): Promise<void> {
  const controller = new WhatIfController(
    {
      post: (body) => postWhatIf(body),
      onResult: (result) => {
        $("out-risk").textContent = fmt3(result.risk);
        $("out-base").textContent = fmt3(result.pFluBase);
        $("out-adjusted").textContent = fmt3(result.pFluAdjusted);
        $("out-bias").textContent =
          (result.biasVsBaseline >= 0 ? "+" : "") + fmt3(result.biasVsBaseline);
        $("field-error").textContent = "";
        setBanner(null);
      },
      onFieldError: (message) => {
        $("field-error").textContent = message;
      },
      onNetworkError: (message) => setBanner(`service unreachable: ${message}`),
      onInFlight: (inFlight) => {
        $("spinner").classList.toggle("hidden", !inFlight);
      },
    },
    DEBOUNCE_MS,
  );

  for (const [id, bounds] of Object.entries({
    alpha: SLIDER_BOUNDS.alpha,
    beta: SLIDER_BOUNDS.beta,
    "p-cough": SLIDER_BOUNDS.pCough,
    "p-sneeze": SLIDER_BOUNDS.pSneeze,
  })) {
    const slider = $(id) as HTMLInputElement;
    slider.min = String(bounds.min);
    slider.max = String(bounds.max);
    slider.step = String(bounds.step);
    slider.addEventListener("input", () => {
      showSliderValues();
      controller.update(readForm());
    });
  }
  $("cohort").addEventListener("change", () => controller.update(readForm()));

  const loadReport = async () => {
    try {
      const report = await fetchReport();
      populateCohorts(report);
      renderBiasTable(report);
      setBanner(null);
      await controller.fire(readForm());
    } catch (error) {
      setBanner(
        `service unreachable: ${error instanceof Error ? error.message : String(error)}`,
      );
    }
  };
  $("retry").addEventListener("click", () => void loadReport());

  showSliderValues();
  await loadReport();
}

void boot();
