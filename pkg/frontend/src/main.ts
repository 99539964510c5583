// Page wiring: textarea over a highlight backdrop, stats bar, portrait
// selector, and an error banner. All state lives in EditorController.

import { ApiError, PortraitClient } from "./api.js";
import { EditorController } from "./editor.js";
import { renderBackdrop, renderStats } from "./render.js";
import { emptyModel, type HighlightModel } from "./highlight.js";

function requireElement<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (element === null) throw new Error(`missing #${id}`);
  return element as T;
}

function serviceBaseUrl(): string {
  const override = new URLSearchParams(window.location.search).get("service");
  return override !== null ? override.replace(/\/$/, "") : "";
}

async function start(): Promise<void> {
  const editor = requireElement<HTMLTextAreaElement>("editor");
  const backdrop = requireElement<HTMLDivElement>("backdrop");
  const stats = requireElement<HTMLDivElement>("stats");
  const banner = requireElement<HTMLDivElement>("banner");
  const selector = requireElement<HTMLSelectElement>("portrait-select");

  const client = new PortraitClient(serviceBaseUrl());

  const hooks = {
    check: (document: string, portrait?: string) => client.check(document, portrait),
    render: (model: HighlightModel) => {
      renderBackdrop(backdrop, model);
      renderStats(stats, model);
    },
    showError: (message: string) => {
      banner.textContent = message;
      banner.hidden = false;
    },
    clearError: () => {
      banner.hidden = true;
    },
  };
  const controller = new EditorController(hooks);

  editor.addEventListener("input", () => controller.onEdit(editor.value));
  editor.addEventListener("scroll", () => {
    backdrop.scrollTop = editor.scrollTop;
    backdrop.scrollLeft = editor.scrollLeft;
  });
  selector.addEventListener("change", () => {
    controller.selectPortrait(selector.value || undefined, editor.value);
  });

  hooks.render(emptyModel());

  let portraits;
  try {
    portraits = await client.portraits();
  } catch (error) {
    editor.disabled = true;
    hooks.showError(
      error instanceof ApiError
        ? `service error: ${error.message}`
        : "query service unreachable",
    );
    return;
  }
  if (portraits.length === 0) {
    editor.disabled = true;
    editor.placeholder = "no portraits mounted on the service";
    selector.hidden = true;
    return;
  }
  for (const portrait of portraits) {
    const option = document.createElement("option");
    option.value = portrait.name;
    option.textContent = `${portrait.name} (width ${portrait.ngram_width})`;
    selector.appendChild(option);
  }
  selector.hidden = portraits.length === 1;
  controller.selectPortrait(portraits[0]?.name, editor.value);
}

void start();
