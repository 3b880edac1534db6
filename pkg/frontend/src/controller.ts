/** Debounced what-if requests with last-writer-wins display semantics.
 *
 * Slider drags fire rapidly; the controller waits for a quiet period, then
 * issues one request tagged with a monotonically increasing sequence number.
 * A response is applied only if no later request has already been applied,
 * so out-of-order completions can never show stale numbers. */

import { WhatIfForm, WhatIfResponse, whatIfRequestBody } from "./model";

export const DEBOUNCE_MS = 150;

export interface ControllerHooks {
  post: (body: Record<string, unknown>) => Promise<WhatIfResponse>;
  onResult: (result: WhatIfResponse) => void;
  onFieldError: (message: string) => void;
  onNetworkError: (message: string) => void;
  onInFlight?: (inFlight: boolean) => void;
}

export class RequestError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class WhatIfController {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private issued = 0;
  private applied = 0;
  private pendingForm: WhatIfForm | null = null;

  constructor(
    private readonly hooks: ControllerHooks,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Record a form change; the request fires after the debounce interval. */
  update(form: WhatIfForm): void {
    this.pendingForm = form;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      if (this.pendingForm) {
        void this.fire(this.pendingForm);
      }
    }, this.debounceMs);
  }

  /** Issue the request immediately (used for the initial load). */
  fire(form: WhatIfForm): Promise<void> {
    const seq = ++this.issued;
    this.hooks.onInFlight?.(true);
    return this.hooks
      .post(whatIfRequestBody(form))
      .then((result) => {
        if (seq > this.applied) {
          this.applied = seq;
          this.hooks.onResult(result);
        }
      })
      .catch((error: unknown) => {
        if (seq <= this.applied) return; // stale failure: ignore
        this.applied = seq;
        if (error instanceof RequestError && error.status === 400) {
          this.hooks.onFieldError(error.message);
        } else {
          this.hooks.onNetworkError(error instanceof Error ? error.message : String(error));
        }
      })
      .finally(() => {
        if (seq === this.issued) {
          this.hooks.onInFlight?.(false);
        }
      });
  }
}
