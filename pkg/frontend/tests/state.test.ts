import { describe, expect, it } from "vitest";

import { DEFAULT_STATE, decodeState, encodeState } from "../src/state.js";

describe("session-state URL hash", () => {
  it("round-trips a full state", () => {
    const state = {
      z: [0, -0.8] as [number, number],
      targetP: 0.9,
      overlay: "density" as const,
    };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it("round-trips without a selected point", () => {
    const state = { z: null, targetP: 0.35, overlay: "groups" as const };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it("falls back to defaults on an empty hash", () => {
    expect(decodeState("")).toEqual(DEFAULT_STATE);
    expect(decodeState("#")).toEqual(DEFAULT_STATE);
  });

  it("ignores malformed fields", () => {
    const state = decodeState("#z=abc,def&p=7&overlay=nonsense");
    expect(state.z).toBeNull();
    expect(state.targetP).toBe(DEFAULT_STATE.targetP);
    expect(state.overlay).toBe(DEFAULT_STATE.overlay);
  });

  it("preserves full float precision in the hash", () => {
    const state = {
      z: [0.12345678901234567, -1.9876543210987654] as [number, number],
      targetP: 0.73,
      overlay: "phase" as const,
    };
    const decoded = decodeState(encodeState(state));
    expect(decoded.z).toEqual(state.z);
  });
});
