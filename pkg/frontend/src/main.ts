/** Application wiring: latent-map explorer, click-to-generate, iterative
 * inversion stepper and the SHAP panel, with the session encoded in the URL
 * hash for reload-stable links. */

import { ApiClient, ApiError, type FetchLike } from "./api.js";
import { isLowDensity, renderLatentMap, type LatentMapView } from "./latentmap.js";
import { renderCandidate, renderError, renderShap, renderTrace } from "./panels.js";
import { DEFAULT_STATE, decodeState, encodeState, type SessionState } from "./state.js";
import type { LatentMapResponse, OverlayMode } from "./types.js";

export interface App {
  state: SessionState;
  view: LatentMapView;
  map: LatentMapResponse;
  pick(z: [number, number]): Promise<void>;
  setTargetP(p: number): Promise<void>;
  setOverlay(mode: OverlayMode): void;
  runInversion(formula: string, cutoff?: number): Promise<void>;
  showShap(formula: string): Promise<void>;
}

function byId<T extends HTMLElement>(root: Document, id: string): T {
  const node = root.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export async function boot(
  doc: Document = document,
  fetchImpl?: FetchLike,
  base = "",
): Promise<App> {
  const api = fetchImpl ? new ApiClient(base, fetchImpl) : new ApiClient(base);
  const mapContainer = byId<HTMLDivElement>(doc, "latent-map");
  const candidatePanel = byId<HTMLDivElement>(doc, "candidate-panel");
  const tracePanel = byId<HTMLDivElement>(doc, "trace-panel");
  const shapPanel = byId<HTMLDivElement>(doc, "shap-panel");
  const errorPanel = byId<HTMLDivElement>(doc, "error-panel");
  const slider = byId<HTMLInputElement>(doc, "target-p");
  const sliderValue = byId<HTMLSpanElement>(doc, "target-p-value");
  const overlaySelect = byId<HTMLSelectElement>(doc, "overlay-mode");
  const invertForm = byId<HTMLFormElement>(doc, "invert-form");
  const invertFormula = byId<HTMLInputElement>(doc, "invert-formula");
  const invertCutoff = byId<HTMLInputElement>(doc, "invert-cutoff");
  const shapForm = byId<HTMLFormElement>(doc, "shap-form");
  const shapFormula = byId<HTMLInputElement>(doc, "shap-formula");
  const modelLine = byId<HTMLDivElement>(doc, "model-line");

  const state = decodeState(doc.defaultView?.location.hash ?? "");
  const info = await api.modelInfo();
  modelLine.textContent =
    `checkpoint ${info.checkpoint_hash.slice(0, 12)} | ` +
    `${info.vocabulary.length}-element vocabulary`;
  const map = await api.latentMap();

  const syncHash = () => {
    const win = doc.defaultView;
    if (win) win.history.replaceState(null, "", encodeState(app.state));
  };

  const clearError = () => errorPanel.replaceChildren();
  const showError = (err: unknown) => {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    renderError(errorPanel, message);
  };

  const view = renderLatentMap(mapContainer, map, (z) => {
    void app.pick(z);
  });

  const app: App = {
    state,
    view,
    map,
    async pick(z) {
      clearError();
      app.state.z = z;
      view.setMarker(z);
      syncHash();
      try {
        const result = await api.generate(z, app.state.targetP);
        renderCandidate(candidatePanel, result, z, app.state.targetP,
                        isLowDensity(map, z));
      } catch (err) {
        showError(err);
      }
    },
    async setTargetP(p) {
      app.state.targetP = p;
      sliderValue.textContent = String(p);
      syncHash();
      if (app.state.z) {
        await app.pick(app.state.z);
      }
    },
    setOverlay(mode) {
      app.state.overlay = mode;
      overlaySelect.value = mode;
      view.setOverlay(mode);
      syncHash();
    },
    async runInversion(formula, cutoff) {
      clearError();
      try {
        const trace = await api.invert(formula, cutoff);
        renderTrace(tracePanel, trace);
      } catch (err) {
        showError(err);
      }
    },
    async showShap(formula) {
      clearError();
      try {
        renderShap(shapPanel, await api.shap(formula));
      } catch (err) {
        showError(err);
      }
    },
  };

  slider.value = String(state.targetP);
  sliderValue.textContent = String(state.targetP);
  slider.addEventListener("input", () => {
    void app.setTargetP(Number(slider.value));
  });
  overlaySelect.addEventListener("change", () => {
    app.setOverlay(overlaySelect.value as OverlayMode);
  });
  invertForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const cutoff = invertCutoff.value === "" ? undefined : Number(invertCutoff.value);
    void app.runInversion(invertFormula.value, cutoff);
  });
  shapForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void app.showShap(shapFormula.value);
  });

  app.setOverlay(state.overlay);
  if (state.z) {
    await app.pick(state.z);
  }
  return app;
}

declare global {
  interface Window {
    alloyvaeBoot?: typeof boot;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && !window.alloyvaeBoot) {
  window.alloyvaeBoot = boot;
  if (document.getElementById("latent-map")) {
    void boot();
  }
}
