import { ApiError, PreferenceApi } from "./api.js";
import { renderComparison } from "./card.js";
import { renderCurves } from "./curves.js";
import type { Choice, CreateSessionRequest, SessionDescriptor } from "./types.js";
import { toCardViewModel, toCurvesViewModel } from "./viewmodels.js";

/**
 * Single-session controller.  One request is in flight per tab at a time;
 * submissions are guarded by the pending query id, so a stale click can
 * never consume budget twice (the server answers 409 and the app silently
 * refetches the real pending card).
 */
export class SessionApp {
  descriptor: SessionDescriptor | null = null;

  constructor(
    readonly root: HTMLElement,
    readonly api: PreferenceApi,
  ) {}

  // -- view plumbing ------------------------------------------------------

  private panel(className: string): HTMLElement {
    const node = document.createElement("div");
    node.className = className;
    this.root.replaceChildren(node);
    return node;
  }

  private banner(target: HTMLElement, message: string, retry: () => void): void {
    const note = document.createElement("div");
    note.className = "error-banner";
    note.textContent = message + " ";
    const button = document.createElement("button");
    button.className = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", () => {
      note.remove();
      retry();
    });
    note.appendChild(button);
    target.prepend(note);
  }

  // -- session lifecycle ---------------------------------------------------

  async startSession(request: CreateSessionRequest): Promise<void> {
    this.descriptor = await this.api.createSession(request);
    await this.showCard();
  }

  async resumeSession(sessionId: string): Promise<void> {
    this.descriptor = await this.api.getSession(sessionId);
    if (this.descriptor.phase === "complete") {
      await this.showCompletion();
    } else {
      await this.showCard();
    }
  }

  private get sessionId(): string {
    if (!this.descriptor) throw new Error("no active session");
    return this.descriptor.session_id;
  }

  // -- comparison flow -----------------------------------------------------

  async showCard(): Promise<void> {
    const panel = this.panel("card-panel loading");
    panel.textContent = "selecting the next comparison…";
    try {
      const card = await this.api.getComparison(this.sessionId);
      const descriptor = await this.api.getSession(this.sessionId);
      this.descriptor = descriptor;
      const view = toCardViewModel(descriptor, card);
      const cardEl = renderComparison(view, (queryId, choice) => {
        void this.submit(queryId, choice);
      });
      const nav = document.createElement("button");
      nav.className = "nav-curves";
      nav.textContent = "View learned utility";
      nav.addEventListener("click", () => void this.showCurves());
      const panel2 = this.panel("card-panel");
      panel2.append(cardEl, nav);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.showCompletion();
        return;
      }
      const panel3 = this.panel("card-panel");
      this.banner(panel3, "could not load the next comparison", () => {
        void this.showCard();
      });
    }
  }

  async submit(queryId: string, choice: Choice): Promise<void> {
    try {
      const descriptor = await this.api.submitPreference(this.sessionId, queryId, choice);
      this.descriptor = descriptor;
      if (descriptor.phase === "complete") {
        await this.showCompletion();
      } else {
        await this.showCard();
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // stale query id: someone answered already, fetch the live state
        await this.showCard();
        return;
      }
      this.banner(this.root, "submitting your choice failed", () => {
        void this.submit(queryId, choice);
      });
    }
  }

  // -- completion and curves ------------------------------------------------

  async showCompletion(): Promise<void> {
    const panel = this.panel("completion-panel");
    const note = document.createElement("p");
    note.className = "completion-note";
    note.textContent = "All comparisons answered — thank you.";
    const link = document.createElement("button");
    link.className = "nav-curves";
    link.textContent = "View learned utility";
    link.addEventListener("click", () => void this.showCurves());
    panel.append(note, link);
  }

  async showCurves(): Promise<void> {
    const panel = this.panel("curves-screen loading");
    panel.textContent = "computing curve summaries…";
    try {
      const model = await this.api.getModel(this.sessionId);
      const view = toCurvesViewModel(model);
      const panel2 = this.panel("curves-screen");
      panel2.appendChild(renderCurves(view));
      const back = document.createElement("button");
      back.className = "nav-back";
      back.textContent =
        this.descriptor && this.descriptor.phase === "complete"
          ? "Back to summary"
          : "Back to comparisons";
      back.addEventListener("click", () => {
        if (this.descriptor && this.descriptor.phase === "complete") {
          void this.showCompletion();
        } else {
          void this.showCard();
        }
      });
      panel2.appendChild(back);
    } catch {
      const panel3 = this.panel("curves-screen");
      this.banner(panel3, "could not load the model", () => {
        void this.showCurves();
      });
    }
  }
}

// -- bootstrap for the standalone page --------------------------------------

function readSetupForm(form: HTMLFormElement): CreateSessionRequest {
  const data = new FormData(form);
  const names = String(data.get("metrics") ?? "")
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean);
  const directions = names.map((_, i) => {
    const field = form.querySelector<HTMLSelectElement>(`select[name="dir-${i}"]`);
    return field && field.value === "minimize" ? "minimize" : "maximize";
  });
  const seedRaw = String(data.get("seed") ?? "").trim();
  const request: CreateSessionRequest = {
    metric_names: names,
    directions,
    policy: String(data.get("policy") ?? "pair_entropy"),
    budget: Number(data.get("budget") ?? names.length * 10),
  };
  if (seedRaw !== "") request.seed = Number(seedRaw);
  return request;
}

function renderDirectionPickers(form: HTMLFormElement): void {
  const metrics = String(
    form.querySelector<HTMLInputElement>('input[name="metrics"]')?.value ?? "",
  )
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean);
  const host = form.querySelector<HTMLElement>(".direction-pickers");
  if (!host) return;
  host.replaceChildren();
  metrics.forEach((name, i) => {
    const label = document.createElement("label");
    label.textContent = `${name}: `;
    const select = document.createElement("select");
    select.name = `dir-${i}`;
    for (const value of ["maximize", "minimize"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      select.appendChild(option);
    }
    label.appendChild(select);
    host.appendChild(label);
  });
}

export function bootstrap(): void {
  const root = document.getElementById("prefbeta-root");
  const form = document.getElementById("setup-form") as HTMLFormElement | null;
  if (!root || !form) return;
  const app = new SessionApp(root, new PreferenceApi(""));

  form
    .querySelector<HTMLInputElement>('input[name="metrics"]')
    ?.addEventListener("input", () => renderDirectionPickers(form));
  renderDirectionPickers(form);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    form.hidden = true;
    void app.startSession(readSetupForm(form)).catch(() => {
      form.hidden = false;
      root.textContent = "could not create the session; check the inputs";
    });
  });
}

bootstrap();
