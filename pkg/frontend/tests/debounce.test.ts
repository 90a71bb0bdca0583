import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { debounce, SLIDER_DEBOUNCE_MS } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("fires once per burst, with the last arguments", () => {
    const spy = vi.fn();
    const send = debounce(spy, 150);
    send(1);
    send(2);
    send(3);
    vi.advanceTimersByTime(149);
    expect(spy).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(spy).toHaveBeenCalledTimes(1);
    expect(spy).toHaveBeenCalledWith(3);
  });

  it("fires again for a later burst", () => {
    const spy = vi.fn();
    const send = debounce(spy, 150);
    send("a");
    vi.advanceTimersByTime(150);
    send("b");
    vi.advanceTimersByTime(150);
    expect(spy.mock.calls).toEqual([["a"], ["b"]]);
  });

  it("keeps postponing while calls keep arriving", () => {
    const spy = vi.fn();
    const send = debounce(spy, 150);
    for (let i = 0; i < 10; i++) {
      send(i);
      vi.advanceTimersByTime(100); // always inside the window
    }
    expect(spy).not.toHaveBeenCalled();
    vi.advanceTimersByTime(150);
    expect(spy).toHaveBeenCalledTimes(1);
    expect(spy).toHaveBeenCalledWith(9);
  });

  it("cancel drops the pending call", () => {
    const spy = vi.fn();
    const send = debounce(spy, 150);
    send(7);
    send.cancel();
    vi.advanceTimersByTime(500);
    expect(spy).not.toHaveBeenCalled();
  });

  it("flush runs the pending call immediately", () => {
    const spy = vi.fn();
    const send = debounce(spy, 150);
    send(7);
    send.flush();
    expect(spy).toHaveBeenCalledWith(7);
    vi.advanceTimersByTime(500);
    expect(spy).toHaveBeenCalledTimes(1);
  });

  it("slider sends wait 150ms after the knob goes quiet", () => {
    expect(SLIDER_DEBOUNCE_MS).toBe(150);
  });
});
