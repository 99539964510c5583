// Editor controller: debounced checks, one in-flight request, stale
// responses never rendered, last good render retained across errors.

import type { CheckResponse } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { buildHighlightModel, emptyModel, type HighlightModel } from "./highlight.js";

export const DEBOUNCE_MS = 150;

export interface EditorHooks {
  check: (document: string, portrait?: string) => Promise<CheckResponse>;
  render: (model: HighlightModel) => void;
  showError: (message: string) => void;
  clearError: () => void;
}

export class EditorController {
  private edit = 0; // bumps on every accepted edit/portrait switch
  private inFlight = false;
  private pending: { document: string; edit: number } | null = null;
  private portrait: string | undefined;
  private readonly scheduleCheck: Debounced<[string, number]>;

  constructor(
    private readonly hooks: EditorHooks,
    debounceMs: number = DEBOUNCE_MS,
  ) {
    this.scheduleCheck = debounce(
      (document: string, edit: number) => void this.issue(document, edit),
      debounceMs,
    );
  }

  onEdit(document: string): void {
    const edit = ++this.edit;
    if (document === "") {
      // Clearing the editor zeroes spans and stats immediately.
      this.scheduleCheck.cancel();
      this.pending = null;
      this.hooks.clearError();
      this.hooks.render(emptyModel());
      return;
    }
    this.scheduleCheck(document, edit);
  }

  selectPortrait(name: string | undefined, document: string): void {
    this.portrait = name;
    if (document === "") return;
    const edit = ++this.edit;
    this.scheduleCheck.cancel();
    void this.issue(document, edit);
  }

  private async issue(document: string, edit: number): Promise<void> {
    if (this.inFlight) {
      this.pending = { document, edit };
      return;
    }
    this.inFlight = true;
    try {
      const response = await this.hooks.check(document, this.portrait);
      if (edit === this.edit) {
        this.hooks.clearError();
        this.hooks.render(buildHighlightModel(document, response));
      }
    } catch (error) {
      if (edit === this.edit) {
        // Keep whatever rendered last; just surface the failure.
        this.hooks.showError(error instanceof Error ? error.message : String(error));
      }
    } finally {
      this.inFlight = false;
      const next = this.pending;
      this.pending = null;
      // A pending document older than the newest edit is superseded: the
      // newer edit is still waiting in the debounce timer and will issue.
      if (next !== null && next.edit === this.edit) {
        void this.issue(next.document, next.edit);
      }
    }
  }
}
