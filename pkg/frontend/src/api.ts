/** Thin typed fetch wrappers for the service API. */

import { ReportDoc, WhatIfResponse } from "./model";
import { RequestError } from "./controller";

export async function fetchReport(baseUrl = ""): Promise<ReportDoc> {
  const response = await fetch(`${baseUrl}/api/report`);
  if (!response.ok) {
    throw new RequestError(`report request failed (${response.status})`, response.status);
  }
  return (await response.json()) as ReportDoc;
}

export async function postWhatIf(
  body: Record<string, unknown>,
  baseUrl = "",
): Promise<WhatIfResponse> {
  const response = await fetch(`${baseUrl}/api/whatif`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    let detail = `what-if request failed (${response.status})`;
    try {
      const payload = await response.json();
      if (payload && typeof payload.error === "string") detail = payload.error;
    } catch {
      // keep the generic message
    }
    throw new RequestError(detail, response.status);
  }
  return (await response.json()) as WhatIfResponse;
}
