// Turning a service response into highlight spans and renderable segments.
//
// Span offsets come verbatim from the response (start_orig/end_orig); the
// client never re-tokenizes. Tiers: the longest chain is emphasized when it
// is a real chain (two or more joined windows), chains of count >= 2 are
// marked, and lone single-window matches are dimmed.

import type { ChainSpan, CheckResponse } from "./api.js";

export type Tier = "longest" | "chained" | "isolated";

export interface Span {
  start: number;
  end: number;
  tier: Tier;
}

export interface HighlightStats {
  overlapRatio: number;
  isMember: boolean;
  ngramWidth: number;
  elapsedMs: number;
}

export interface HighlightModel {
  document: string;
  spans: Span[];
  stats: HighlightStats;
}

const TIER_RANK: Record<Tier, number> = { longest: 3, chained: 2, isolated: 1 };

function sameChain(a: ChainSpan, b: ChainSpan): boolean {
  return (
    a.start_orig === b.start_orig &&
    a.end_orig === b.end_orig &&
    a.start_norm === b.start_norm &&
    a.count === b.count
  );
}

export function buildHighlightModel(
  document: string,
  response: CheckResponse,
): HighlightModel {
  const longest = response.longest_chain;
  let longestMarked = false;
  const spans: Span[] = response.chains.map((chain) => {
    let tier: Tier;
    if (
      longest !== null &&
      longest.count >= 2 &&
      !longestMarked &&
      sameChain(chain, longest)
    ) {
      tier = "longest";
      longestMarked = true;
    } else if (chain.count >= 2) {
      tier = "chained";
    } else {
      tier = "isolated";
    }
    return { start: chain.start_orig, end: chain.end_orig, tier };
  });
  return {
    document,
    spans,
    stats: {
      overlapRatio: response.overlap_ratio,
      isMember: response.is_member,
      ngramWidth: response.ngram_width,
      elapsedMs: response.elapsed_ms,
    },
  };
}

export interface Segment {
  start: number;
  end: number;
  tier: Tier | null;
  text: string;
}

// Cut the document into contiguous segments of uniform tier. Where spans
// intersect, the higher tier wins (longest > chained > isolated); text
// outside every span gets tier null.
export function segmentDocument(document: string, spans: Span[]): Segment[] {
  if (document.length === 0) return [];
  const ranks = new Int8Array(document.length);
  const byRank: Record<number, Tier> = { 3: "longest", 2: "chained", 1: "isolated" };
  for (const span of spans) {
    const rank = TIER_RANK[span.tier];
    const start = Math.max(0, span.start);
    const end = Math.min(document.length, span.end);
    for (let i = start; i < end; i++) {
      if (ranks[i]! < rank) ranks[i] = rank;
    }
  }
  const segments: Segment[] = [];
  let start = 0;
  for (let i = 1; i <= document.length; i++) {
    if (i === document.length || ranks[i] !== ranks[start]) {
      const rank = ranks[start]!;
      segments.push({
        start,
        end: i,
        tier: rank === 0 ? null : byRank[rank]!,
        text: document.slice(start, i),
      });
      start = i;
    }
  }
  return segments;
}

export function emptyModel(document = ""): HighlightModel {
  return {
    document,
    spans: [],
    stats: { overlapRatio: 0, isMember: false, ngramWidth: 0, elapsedMs: 0 },
  };
}
