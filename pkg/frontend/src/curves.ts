import type { CurvesViewModel, CurveViewModel } from "./viewmodels.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 280;
const HEIGHT = 200;
const PAD = 28;

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function sx(x: number): number {
  return PAD + x * (WIDTH - 2 * PAD);
}

function sy(y: number): number {
  return HEIGHT - PAD - y * (HEIGHT - 2 * PAD);
}

function polyPoints(xs: number[], ys: number[]): string {
  return xs.map((x, i) => `${sx(x)},${sy(ys[i] ?? 0)}`).join(" ");
}

/** One metric's plot: shaded interquartile band under the median line. */
export function renderCurve(curve: CurveViewModel): HTMLElement {
  const wrapper = document.createElement("figure");
  wrapper.className = "curve-plot";
  wrapper.dataset.metric = curve.name;

  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: String(WIDTH),
    height: String(HEIGHT),
    role: "img",
  });

  // axes
  svg.appendChild(
    svgEl("line", {
      x1: String(sx(0)), y1: String(sy(0)), x2: String(sx(1)), y2: String(sy(0)),
      class: "axis",
    }),
  );
  svg.appendChild(
    svgEl("line", {
      x1: String(sx(0)), y1: String(sy(0)), x2: String(sx(0)), y2: String(sy(1)),
      class: "axis",
    }),
  );

  // interquartile band: q75 forward, q25 reversed
  const bandXs = [...curve.grid, ...[...curve.grid].reverse()];
  const bandYs = [...curve.q75, ...[...curve.q25].reverse()];
  const band = svgEl("polygon", {
    points: polyPoints(bandXs, bandYs),
    class: "iqr-band",
  });
  svg.appendChild(band);

  const median = svgEl("polyline", {
    points: polyPoints(curve.grid, curve.median),
    class: "median-line",
    fill: "none",
  });
  svg.appendChild(median);

  const caption = document.createElement("figcaption");
  caption.textContent = curve.name + " ";
  const direction = document.createElement("span");
  direction.className = `direction direction-${curve.direction}`;
  direction.textContent =
    curve.direction === "minimize" ? "↓ minimized" : "↑ maximized";
  caption.appendChild(direction);

  wrapper.appendChild(svg);
  wrapper.appendChild(caption);
  return wrapper;
}

/** The per-metric plot grid, with an untrained badge for prior-only models. */
export function renderCurves(model: CurvesViewModel): HTMLElement {
  const root = document.createElement("div");
  root.className = "curves-panel";

  if (model.priorOnly) {
    const badge = document.createElement("div");
    badge.className = "untrained-badge";
    badge.textContent = "untrained — showing prior curves";
    root.appendChild(badge);
  }

  const grid = document.createElement("div");
  grid.className = "curve-grid";
  for (const curve of model.curves) {
    grid.appendChild(renderCurve(curve));
  }
  root.appendChild(grid);

  if (model.logLikelihood !== null) {
    const footer = document.createElement("div");
    footer.className = "fit-loglik";
    footer.textContent = `fit log-likelihood: ${model.logLikelihood.toFixed(3)}`;
    root.appendChild(footer);
  }
  return root;
}
