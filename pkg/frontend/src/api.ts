/** Thin typed client over the service JSON API.
 *
 * The fetch implementation is injectable so tests can replay recorded
 * fixtures byte-for-byte; the UI never post-processes numeric fields.
 */

import type {
  ApiErrorBody,
  ClassifyResponse,
  EncodeResponse,
  GenerateResponse,
  InvertResponse,
  LatentMapResponse,
  ModelInfoResponse,
  ShapResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = status;
    this.detail = body.detail;
  }
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (u, i) => fetch(u, i)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, body?: unknown): Promise<T> {
    const init: RequestInit =
      body === undefined
        ? { method: "GET" }
        : {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
          };
    const resp = await this.fetchImpl(this.base + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  classify(formula: string): Promise<ClassifyResponse> {
    return this.request("/api/classify", { formula });
  }

  encode(formula: string, phi?: number): Promise<EncodeResponse> {
    return this.request("/api/encode", phi === undefined ? { formula } : { formula, phi });
  }

  generate(z: number[], targetP: number): Promise<GenerateResponse> {
    return this.request("/api/generate", { z, target_p: targetP });
  }

  invert(formula: string, cutoff?: number, maxIters?: number): Promise<InvertResponse> {
    const body: Record<string, unknown> = { formula };
    if (cutoff !== undefined) body.cutoff = cutoff;
    if (maxIters !== undefined) body.max_iters = maxIters;
    return this.request("/api/invert", body);
  }

  latentMap(): Promise<LatentMapResponse> {
    return this.request("/api/latent-map");
  }

  shap(formula: string): Promise<ShapResponse> {
    return this.request("/api/shap", { formula });
  }

  modelInfo(): Promise<ModelInfoResponse> {
    return this.request("/api/model");
  }
}
