/** JSON contracts of the alloyvae HTTP service. */

export interface ClassifyResponse {
  probability: number;
  features8_raw: number[];
  features8_std: number[];
}

export interface EncodeResponse {
  mu: number[];
  sigma: number[];
}

export interface GenerateResponse {
  formula: string;
  composition: Record<string, number>;
  recheck_p: number;
  consistent: boolean;
}

export interface InvertStep {
  formula: string;
  composition: Record<string, number>;
  probability: number;
  z: number[];
}

export interface InvertResponse {
  steps: InvertStep[];
  converged: boolean;
  cutoff: number;
}

export interface LatentPoint {
  z: [number, number];
  probability: number;
  label: number;
  n_elements: number;
  formula: string;
}

export interface LatentMapResponse {
  points: LatentPoint[];
  density: {
    z1: number[];
    z2: number[];
    values: number[][];
    low_density_threshold: number;
  };
  groups: Record<string, number[][]>;
}

export interface ShapResponse {
  base_value: number;
  shap_values: number[];
  feature_names: string[];
  feature_values: number[];
  model_output: number;
}

export interface ModelInfoResponse {
  checkpoint_hash: string;
  vocabulary: string[];
  config: Record<string, unknown>;
  metrics: Record<string, unknown>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

export type OverlayMode = "phase" | "elements" | "density" | "groups";
