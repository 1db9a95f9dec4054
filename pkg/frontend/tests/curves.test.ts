import { describe, expect, it } from "vitest";

import { renderCurves } from "../src/curves.js";
import type { CurvesViewModel } from "../src/viewmodels.js";

function identityModel(priorOnly: boolean): CurvesViewModel {
  const grid = [0, 0.25, 0.5, 0.75, 1];
  return {
    priorOnly,
    logLikelihood: priorOnly ? null : -2.5,
    curves: [
      // degenerate-uniform model: straight diagonal, zero-width band
      { name: "precision", direction: "maximize", grid, median: [...grid], q25: [...grid], q75: [...grid] },
      // minimize direction: descending diagonal
      {
        name: "latency",
        direction: "minimize",
        grid,
        median: grid.map((x) => 1 - x),
        q25: grid.map((x) => 1 - x),
        q75: grid.map((x) => 1 - x),
      },
    ],
  };
}

function pointsOf(el: Element, selector: string): Array<[number, number]> {
  const attr = el.querySelector(selector)!.getAttribute("points")!;
  return attr.split(" ").map((pair) => {
    const [x, y] = pair.split(",").map(Number);
    return [x!, y!];
  });
}

describe("renderCurves", () => {
  it("renders one subplot per metric with direction annotations", () => {
    const el = renderCurves(identityModel(false));
    const plots = el.querySelectorAll(".curve-plot");
    expect(plots).toHaveLength(2);
    expect(plots[1]!.querySelector(".direction")!.textContent).toContain("minimized");
  });

  it("diagonal median for the identity model, descending when minimized", () => {
    const el = renderCurves(identityModel(false));
    const up = pointsOf(el.querySelectorAll(".curve-plot")[0]!, ".median-line");
    const ys = up.map(([, y]) => y);
    for (let i = 1; i < ys.length; i++) expect(ys[i]!).toBeLessThan(ys[i - 1]!); // screen y grows downward
    const down = pointsOf(el.querySelectorAll(".curve-plot")[1]!, ".median-line");
    const ys2 = down.map(([, y]) => y);
    for (let i = 1; i < ys2.length; i++) expect(ys2[i]!).toBeGreaterThan(ys2[i - 1]!);
  });

  it("band never crosses the median", () => {
    const grid = [0, 0.5, 1];
    const el = renderCurves({
      priorOnly: false,
      logLikelihood: -1,
      curves: [
        {
          name: "m",
          direction: "maximize",
          grid,
          median: [0.1, 0.5, 0.9],
          q25: [0.05, 0.4, 0.85],
          q75: [0.2, 0.6, 0.95],
        },
      ],
    });
    const band = pointsOf(el, ".iqr-band");
    const median = pointsOf(el, ".median-line");
    const upper = band.slice(0, grid.length);
    const lower = band.slice(grid.length).reverse();
    median.forEach(([, y], i) => {
      expect(upper[i]![1]).toBeLessThanOrEqual(y); // q75 above median on screen
      expect(lower[i]![1]).toBeGreaterThanOrEqual(y);
    });
  });

  it("shows the untrained badge only for prior-only payloads", () => {
    expect(
      renderCurves(identityModel(true)).querySelector(".untrained-badge"),
    ).not.toBeNull();
    expect(
      renderCurves(identityModel(false)).querySelector(".untrained-badge"),
    ).toBeNull();
  });
});
