/** Candidate, inversion-trace and SHAP panels.
 *
 * Every numeric text node is String(<api field>) with no arithmetic, so the
 * rendered value is exactly what the service returned.
 */

import type { GenerateResponse, InvertResponse, ShapResponse } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderCandidate(
  container: HTMLElement,
  result: GenerateResponse,
  z: [number, number],
  targetP: number,
  lowDensity: boolean,
): void {
  container.replaceChildren();
  const card = el("div", "candidate-card");
  card.appendChild(el("h3", "candidate-formula", result.formula));

  const meta = el("dl", "candidate-meta");
  const row = (label: string, value: string, cls: string) => {
    meta.appendChild(el("dt", undefined, label));
    meta.appendChild(el("dd", cls, value));
  };
  row("latent point", `(${String(z[0])}, ${String(z[1])})`, "candidate-z");
  row("target probability", String(targetP), "candidate-target");
  row("re-checked probability", String(result.recheck_p), "candidate-recheck");
  row("consistent", result.consistent ? "yes" : "no", "candidate-consistent");
  card.appendChild(meta);

  if (!result.consistent) {
    card.appendChild(
      el("div", "badge badge-inconsistent",
         "classifier disagrees with the requested probability"),
    );
  }
  if (lowDensity) {
    card.appendChild(
      el("div", "badge badge-low-density",
         "low-density latent region: prediction may be unreliable"),
    );
  }

  const comp = el("table", "candidate-composition");
  for (const [sym, frac] of Object.entries(result.composition)) {
    const tr = el("tr");
    tr.appendChild(el("td", "comp-symbol", sym));
    tr.appendChild(el("td", "comp-fraction", String(frac)));
    comp.appendChild(tr);
  }
  card.appendChild(comp);
  container.appendChild(card);
}

export function renderTrace(container: HTMLElement, trace: InvertResponse): void {
  container.replaceChildren();
  const wrap = el("div", "trace");
  const status = el(
    "div",
    trace.converged ? "trace-status converged" : "trace-status unconverged",
    trace.converged
      ? `converged: final probability exceeds cutoff ${String(trace.cutoff)}`
      : `not converged within the step budget (cutoff ${String(trace.cutoff)})`,
  );
  wrap.appendChild(status);

  const chain = el("ol", "trace-chain");
  trace.steps.forEach((step, i) => {
    const li = el("li", "trace-step");
    li.appendChild(el("span", "trace-formula", step.formula));
    li.appendChild(el("span", "trace-y", `y=${String(step.probability)}`));
    li.appendChild(
      el("span", "trace-z", `z=[${String(step.z[0])}, ${String(step.z[1])}]`),
    );
    if (i < trace.steps.length - 1) {
      li.appendChild(el("span", "trace-arrow", "->"));
    }
    chain.appendChild(li);
  });
  wrap.appendChild(chain);
  container.appendChild(wrap);
}

export function renderShap(container: HTMLElement, shap: ShapResponse): void {
  container.replaceChildren();
  const wrap = el("div", "shap");
  wrap.appendChild(
    el("div", "shap-base", `base value: ${String(shap.base_value)}`),
  );
  wrap.appendChild(
    el("div", "shap-output", `model output: ${String(shap.model_output)}`),
  );

  const maxAbs = Math.max(...shap.shap_values.map(Math.abs), 1e-12);
  const table = el("table", "shap-table");
  shap.feature_names.forEach((name, i) => {
    const value = shap.shap_values[i];
    const tr = el("tr", "shap-row");
    tr.appendChild(el("td", "shap-name", name));
    tr.appendChild(el("td", "shap-feature-value", String(shap.feature_values[i])));
    const barCell = el("td", "shap-bar-cell");
    const bar = el("div", value >= 0 ? "shap-bar positive" : "shap-bar negative");
    bar.style.width = `${(Math.abs(value) / maxAbs) * 100}%`;
    barCell.appendChild(bar);
    tr.appendChild(barCell);
    tr.appendChild(el("td", "shap-value", String(value)));
    table.appendChild(tr);
  });
  wrap.appendChild(table);
  container.appendChild(wrap);
}

export function renderError(container: HTMLElement, message: string): void {
  container.replaceChildren(el("div", "error-banner", message));
}
