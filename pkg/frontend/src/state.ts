/** Session state serialized into the URL hash so reloading a link restores
 * the identical view against the same checkpoint. */

import type { OverlayMode } from "./types.js";

export interface SessionState {
  z: [number, number] | null;
  targetP: number;
  overlay: OverlayMode;
}

export const DEFAULT_STATE: SessionState = { z: null, targetP: 0.9, overlay: "phase" };

const OVERLAYS: OverlayMode[] = ["phase", "elements", "density", "groups"];

export function encodeState(state: SessionState): string {
  const parts: string[] = [];
  if (state.z) {
    parts.push(`z=${state.z[0]},${state.z[1]}`);
  }
  parts.push(`p=${state.targetP}`);
  parts.push(`overlay=${state.overlay}`);
  return "#" + parts.join("&");
}

export function decodeState(hash: string): SessionState {
  const state: SessionState = { ...DEFAULT_STATE };
  const text = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!text) return state;
  for (const part of text.split("&")) {
    const [key, value] = part.split("=");
    if (key === "z" && value) {
      const nums = value.split(",").map(Number);
      if (nums.length === 2 && nums.every(Number.isFinite)) {
        state.z = [nums[0], nums[1]];
      }
    } else if (key === "p" && value) {
      const p = Number(value);
      if (Number.isFinite(p) && p >= 0 && p <= 1) state.targetP = p;
    } else if (key === "overlay" && OVERLAYS.includes(value as OverlayMode)) {
      state.overlay = value as OverlayMode;
    }
  }
  return state;
}
