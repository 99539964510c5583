import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { debounce } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("fires once on the trailing edge with the last arguments", () => {
    const calls: string[] = [];
    const run = debounce((value: string) => calls.push(value), 150);
    run("a");
    vi.advanceTimersByTime(100);
    run("b");
    vi.advanceTimersByTime(100);
    run("c");
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["c"]);
  });

  it("fires again for bursts separated by the wait", () => {
    const calls: string[] = [];
    const run = debounce((value: string) => calls.push(value), 150);
    run("a");
    vi.advanceTimersByTime(150);
    run("b");
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["a", "b"]);
  });

  it("cancel drops the pending call", () => {
    const calls: string[] = [];
    const run = debounce((value: string) => calls.push(value), 150);
    run("a");
    run.cancel();
    vi.advanceTimersByTime(500);
    expect(calls).toEqual([]);
  });
});
