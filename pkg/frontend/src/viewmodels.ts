import type {
  ComparisonCard,
  CurvePayload,
  MetricDirection,
  ModelPayload,
  SessionDescriptor,
} from "./types.js";

/** One row of the back-to-back bar chart. */
export interface CardRow {
  name: string;
  direction: MetricDirection;
  valueA: number;
  valueB: number;
}

export interface CardViewModel {
  queryId: string;
  rows: CardRow[];
  answered: number;
  budget: number;
}

export interface CurveViewModel {
  name: string;
  direction: MetricDirection;
  grid: number[];
  median: number[];
  q25: number[];
  q75: number[];
}

export interface CurvesViewModel {
  curves: CurveViewModel[];
  priorOnly: boolean;
  logLikelihood: number | null;
}

/**
 * Zip the card payload with the descriptor's metric order.  Values pass
 * through untouched: rows keep the server's metric order and the exact
 * payload numbers.
 */
export function toCardViewModel(
  descriptor: SessionDescriptor,
  card: ComparisonCard,
): CardViewModel {
  const rows = descriptor.metric_names.map((name, i) => {
    const valueA = card.a[name];
    const valueB = card.b[name];
    const direction = descriptor.directions[i];
    if (valueA === undefined || valueB === undefined || direction === undefined) {
      throw new Error(`comparison card is missing metric ${name}`);
    }
    return { name, direction, valueA, valueB };
  });
  return {
    queryId: card.query_id,
    rows,
    answered: card.queries_answered,
    budget: card.budget,
  };
}

export function toCurveViewModel(payload: CurvePayload): CurveViewModel {
  const { name, direction, grid, median, q25, q75 } = payload;
  const n = grid.length;
  if (median.length !== n || q25.length !== n || q75.length !== n) {
    throw new Error(`curve arrays for ${name} disagree in length`);
  }
  return { name, direction, grid, median, q25, q75 };
}

export function toCurvesViewModel(payload: ModelPayload): CurvesViewModel {
  return {
    curves: payload.curves.map(toCurveViewModel),
    priorOnly: payload.prior_only,
    logLikelihood: payload.log_likelihood,
  };
}
