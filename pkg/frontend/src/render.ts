// DOM rendering of a highlight model. Mark boundaries are exactly the
// segment cuts derived from response offsets; no re-tokenization.

import { segmentDocument, type HighlightModel } from "./highlight.js";

export function renderBackdrop(target: HTMLElement, model: HighlightModel): void {
  target.replaceChildren();
  for (const segment of segmentDocument(model.document, model.spans)) {
    if (segment.tier === null) {
      target.appendChild(document.createTextNode(segment.text));
    } else {
      const mark = document.createElement("mark");
      mark.className = `tier-${segment.tier}`;
      mark.dataset.start = String(segment.start);
      mark.dataset.end = String(segment.end);
      mark.textContent = segment.text;
      target.appendChild(mark);
    }
  }
  // Trailing newline keeps the backdrop and textarea heights in sync.
  target.appendChild(document.createTextNode("\n"));
}

export function renderStats(target: HTMLElement, model: HighlightModel): void {
  const { overlapRatio, isMember, ngramWidth, elapsedMs } = model.stats;
  if (model.document === "") {
    target.textContent = "overlap 0.0% · width – · – ms";
    target.classList.remove("member");
    return;
  }
  const membership = isMember ? "member" : "not a member";
  target.textContent =
    `overlap ${(overlapRatio * 100).toFixed(1)}% · ${membership} · ` +
    `width ${ngramWidth} · ${elapsedMs.toFixed(1)} ms`;
  target.classList.toggle("member", isMember);
}
