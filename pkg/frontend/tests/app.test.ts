// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { boot } from "../src/main.js";
import { isLowDensity } from "../src/latentmap.js";
import type { GenerateResponse, LatentMapResponse } from "../src/types.js";
import { fixtureFetch, loadFixture, mountAppDom, texts } from "./helpers.js";

const FIXTURES = [
  "model", "latent_map", "generate", "generate_low", "invert", "shap",
  "error_bad_formula",
];

function api() {
  return fixtureFetch(FIXTURES);
}

beforeEach(() => {
  mountAppDom();
  window.location.hash = "";
});

describe("application boot", () => {
  it("renders the latent map with one circle per dataset point", async () => {
    const app = await boot(document, api());
    const map = loadFixture("latent_map").response as LatentMapResponse;
    const circles = document.querySelectorAll(".point-layer circle");
    expect(circles.length).toBe(map.points.length);
    expect(app.state.overlay).toBe("phase");
    const hover = circles[0].querySelector("title")?.textContent ?? "";
    expect(hover).toContain(map.points[0].formula);
    expect(hover).toContain(String(map.points[0].probability));
  });

  it("switches overlays", async () => {
    const app = await boot(document, api());
    app.setOverlay("density");
    expect(document.querySelector(".density-layer")?.getAttribute("display"))
      .toBe("inline");
    app.setOverlay("groups");
    expect(document.querySelector(".group-layer")?.getAttribute("display"))
      .toBe("inline");
    expect(window.location.hash).toContain("overlay=groups");
  });
});

describe("interactive generate loop (scripted click)", () => {
  it("svg clicks map back to latent coordinates", async () => {
    const map = loadFixture("latent_map").response as LatentMapResponse;
    const { renderLatentMap } = await import("../src/latentmap.js");
    const host = document.createElement("div");
    document.body.appendChild(host);
    const picked: [number, number][] = [];
    const view = renderLatentMap(host, map, (z) => picked.push(z));
    const [px, py] = view.pixelOf([0.0, -0.8]);
    view.svg.dispatchEvent(
      new MouseEvent("click", { clientX: px, clientY: py, bubbles: true }),
    );
    expect(picked.length).toBe(1);
    expect(picked[0][0]).toBeCloseTo(0.0, 9);
    expect(picked[0][1]).toBeCloseTo(-0.8, 9);
  });

  it("pick at (0, -0.8) with slider 0.9 renders the recorded response "
     + "byte-for-byte", async () => {
    const app = await boot(document, api());
    const gen = loadFixture("generate").response as GenerateResponse;
    const map = loadFixture("latent_map").response as LatentMapResponse;

    const slider = document.getElementById("target-p") as HTMLInputElement;
    slider.value = "0.9";
    slider.dispatchEvent(new Event("input"));
    await app.pick([0.0, -0.8]);

    expect(texts(".candidate-formula")[0]).toBe(gen.formula);
    expect(texts(".candidate-recheck")[0]).toBe(String(gen.recheck_p));
    expect(texts(".comp-fraction")).toEqual(
      Object.values(gen.composition).map(String),
    );
    // density badge consistent with the latent-map fixture at this point
    const expectBadge = isLowDensity(map, [0.0, -0.8]);
    expect(document.querySelector(".badge-low-density") !== null).toBe(expectBadge);
    // marker follows the picked point
    expect(document.querySelector(".marker")?.getAttribute("visibility"))
      .toBe("visible");
  });

  it("low-density pick at (0.8, -0.5) is badged and surfaces inconsistency",
     async () => {
    const app = await boot(document, api());
    await app.setTargetP(0.1);
    await app.pick([0.8, -0.5]);
    const gen = loadFixture("generate_low").response as GenerateResponse;
    const map = loadFixture("latent_map").response as LatentMapResponse;
    expect(texts(".candidate-recheck")[0]).toBe(String(gen.recheck_p));
    expect(document.querySelector(".badge-low-density") !== null)
      .toBe(isLowDensity(map, [0.8, -0.5]));
    expect(document.querySelector(".badge-inconsistent") !== null)
      .toBe(!gen.consistent);
  });
});

describe("session URL restore", () => {
  it("restoring a hash reproduces the identical view", async () => {
    window.location.hash = "#z=0,-0.8&p=0.9&overlay=density";
    const app = await boot(document, api());
    expect(app.state.z).toEqual([0, -0.8]);
    expect(app.state.targetP).toBe(0.9);
    expect(app.state.overlay).toBe("density");
    const slider = document.getElementById("target-p") as HTMLInputElement;
    expect(slider.value).toBe("0.9");
    // the candidate panel is already populated from the restored state
    const gen = loadFixture("generate").response as GenerateResponse;
    expect(texts(".candidate-recheck")[0]).toBe(String(gen.recheck_p));
    expect(document.querySelector(".density-layer")?.getAttribute("display"))
      .toBe("inline");
  });

  it("state changes keep the hash shareable", async () => {
    const app = await boot(document, api());
    await app.setTargetP(0.9);
    await app.pick([0.0, -0.8]);
    expect(window.location.hash).toBe("#z=0,-0.8&p=0.9&overlay=phase");
  });
});

describe("inversion and shap forms", () => {
  it("renders the inversion chain from the form", async () => {
    await boot(document, api());
    const formula = document.getElementById("invert-formula") as HTMLInputElement;
    formula.value = "Fe14Ni16Cr22Co14Al22Cu8";
    (document.getElementById("invert-form") as HTMLFormElement)
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await new Promise((r) => setTimeout(r, 0));
    const fixture = loadFixture("invert").response as { steps: unknown[] };
    expect(texts(".trace-formula").length).toBe(fixture.steps.length);
  });

  it("renders the shap panel from the form", async () => {
    await boot(document, api());
    const formula = document.getElementById("shap-formula") as HTMLInputElement;
    formula.value = "Fe20Ni20Co20Ti20Cu20";
    (document.getElementById("shap-form") as HTMLFormElement)
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await new Promise((r) => setTimeout(r, 0));
    expect(texts(".shap-name").length).toBe(8);
  });

  it("surfaces API errors inline, never silently", async () => {
    const app = await boot(document, api());
    await app.showShap("20++");
    const banner = document.querySelector("#error-panel .error-banner");
    expect(banner).not.toBeNull();
    expect(banner?.textContent).toContain("bad_formula");
  });
});
