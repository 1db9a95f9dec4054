import type { Choice } from "./types.js";
import type { CardViewModel } from "./viewmodels.js";

export type ChoiceHandler = (queryId: string, choice: Choice) => void;

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

function directionGlyph(direction: "maximize" | "minimize"): string {
  return direction === "maximize" ? "↑ maximize" : "↓ minimize";
}

/**
 * Back-to-back bar chart for one comparison, with the three choice
 * buttons.  Bars share a fixed [0, 1] axis; the rendered numbers are the
 * exact payload values.  After a click every button is disabled so one
 * card can never submit twice.
 */
export function renderComparison(
  card: CardViewModel,
  onChoice: ChoiceHandler,
  options: { showValues?: boolean } = {},
): HTMLElement {
  const root = el("div", "comparison-card");
  root.dataset.queryId = card.queryId;
  if (options.showValues === false) root.classList.add("values-hidden");

  const progress = el(
    "div",
    "progress",
    `${card.answered} of ${card.budget} answered`,
  );
  root.appendChild(progress);

  const header = el("div", "card-header");
  header.appendChild(el("span", "side-label side-a", "A"));
  header.appendChild(el("span", "axis-note", "0 ← value → 1"));
  header.appendChild(el("span", "side-label side-b", "B"));
  root.appendChild(header);

  const rows = el("div", "metric-rows");
  for (const row of card.rows) {
    const rowEl = el("div", "metric-row");
    rowEl.dataset.metric = row.name;

    const label = el("div", "metric-label", row.name + " ");
    label.appendChild(el("span", "direction", directionGlyph(row.direction)));
    rowEl.appendChild(label);

    const bars = el("div", "bars");

    const valueA = el("span", "value value-a", String(row.valueA));
    const trackA = el("div", "track track-a");
    const barA = el("div", "bar bar-a");
    barA.style.width = `${row.valueA * 100}%`;
    trackA.appendChild(barA);

    const valueB = el("span", "value value-b", String(row.valueB));
    const trackB = el("div", "track track-b");
    const barB = el("div", "bar bar-b");
    barB.style.width = `${row.valueB * 100}%`;
    trackB.appendChild(barB);

    bars.append(valueA, trackA, trackB, valueB);
    rowEl.appendChild(bars);
    rows.appendChild(rowEl);
  }
  root.appendChild(rows);

  const actions = el("div", "actions");
  const buttons: HTMLButtonElement[] = [];
  const makeButton = (label: string, choice: Choice, className: string) => {
    const button = el("button", `choice ${className}`, label);
    button.addEventListener("click", () => {
      for (const b of buttons) b.disabled = true;
      onChoice(card.queryId, choice);
    });
    buttons.push(button);
    actions.appendChild(button);
  };
  makeButton("Prefer A", "A", "choose-a");
  makeButton("Equal", "E", "choose-equal");
  makeButton("Prefer B", "B", "choose-b");
  root.appendChild(actions);

  const toggleLabel = el("label", "values-toggle");
  const toggle = el("input") as HTMLInputElement;
  toggle.type = "checkbox";
  toggle.checked = options.showValues !== false;
  toggle.className = "show-values";
  toggle.addEventListener("change", () => {
    root.classList.toggle("values-hidden", !toggle.checked);
  });
  toggleLabel.appendChild(toggle);
  toggleLabel.appendChild(document.createTextNode(" show numeric values"));
  root.appendChild(toggleLabel);

  return root;
}
