// Payload shapes of the preference service's JSON API.

export type Choice = "A" | "B" | "E";
export type MetricDirection = "maximize" | "minimize";
export type SessionPhase = "initializing" | "active" | "complete";

export interface SessionDescriptor {
  session_id: string;
  n_metrics: number;
  metric_names: string[];
  directions: MetricDirection[];
  policy: string;
  budget: number;
  queries_answered: number;
  phase: SessionPhase;
  status: "fitting" | "idle";
  seed: number;
}

export interface ComparisonCard {
  query_id: string;
  a: Record<string, number>;
  b: Record<string, number>;
  queries_answered: number;
  budget: number;
}

export interface CurvePayload {
  metric: number;
  name: string;
  direction: MetricDirection;
  grid: number[];
  median: number[];
  q25: number[];
  q75: number[];
}

export interface ModelPayload {
  theta: Record<string, unknown>;
  curves: CurvePayload[];
  log_likelihood: number | null;
  prior_only: boolean;
}

export interface CreateSessionRequest {
  metric_names: string[];
  directions: MetricDirection[];
  policy: string;
  budget: number;
  seed?: number;
}
