/**
 * Annotation screen: one blind pair at a time, Left / Right / Tie.
 *
 * Exactly one verdict can be submitted per task: controls disable the
 * moment a submission starts and the next task loads only after the
 * service acknowledges. Ties need an extra confirmation step, since the
 * guidelines ask annotators to avoid them. The screen only ever renders
 * the fields the service exposes (an opaque task id and two texts), so
 * blindness holds end to end.
 */

import { ApiClient, ConflictError, Task, Verdict } from "./api.js";

type State =
  | { kind: "loading" }
  | { kind: "task"; task: Task; inFlight: boolean; confirmingTie: boolean; note: string }
  | { kind: "done" }
  | { kind: "fatal"; message: string }
  | { kind: "retry"; task: Task; verdict: Verdict; message: string };

export class AnnotationApp {
  private state: State = { kind: "loading" };
  private progressPercent = 0;
  private progressLabel = "";
  private progressStale = false;
  private guidelinesText = "";
  private guidelinesOpen = false;
  private readonly keyHandler = (event: KeyboardEvent) => this.onKey(event);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly pollMs = 15000,
  ) {}

  async start(): Promise<void> {
    document.addEventListener("keydown", this.keyHandler);
    try {
      this.guidelinesText = await this.api.guidelines();
    } catch {
      this.guidelinesText = "(guidelines unavailable)";
    }
    await this.refreshProgress();
    if (this.pollMs > 0) {
      setInterval(() => void this.refreshProgress(), this.pollMs);
    }
    await this.loadNext();
  }

  stop(): void {
    document.removeEventListener("keydown", this.keyHandler);
  }

  async refreshProgress(): Promise<void> {
    try {
      const progress = await this.api.progress();
      const mine = progress.annotator ?? progress.global;
      this.progressPercent = mine.total === 0 ? 100 : (100 * mine.judged) / mine.total;
      this.progressLabel = `${mine.judged} / ${mine.total}`;
      this.progressStale = false;
    } catch {
      this.progressStale = true;
    }
    this.render();
  }

  async loadNext(note = ""): Promise<void> {
    this.state = { kind: "loading" };
    this.render();
    try {
      const task = await this.api.nextTask();
      this.state = task
        ? { kind: "task", task, inFlight: false, confirmingTie: false, note }
        : { kind: "done" };
    } catch (error) {
      this.state = { kind: "fatal", message: String(error) };
    }
    this.render();
  }

  /** Entry point for the three verdict controls and the keyboard. */
  choose(verdict: Verdict): void {
    if (this.state.kind !== "task" || this.state.inFlight) return;
    if (verdict === "tie" && !this.state.confirmingTie) {
      this.state.confirmingTie = true;
      this.render();
      return;
    }
    void this.submit(this.state.task, verdict);
  }

  cancelTie(): void {
    if (this.state.kind !== "task") return;
    this.state.confirmingTie = false;
    this.render();
  }

  private async submit(task: Task, verdict: Verdict): Promise<void> {
    if (this.state.kind === "task") {
      this.state.inFlight = true;
      this.render();
    }
    try {
      await this.api.submitJudgment(task.task_id, verdict);
      await this.refreshProgress();
      await this.loadNext();
    } catch (error) {
      if (error instanceof ConflictError) {
        // Someone (or a previous attempt) already judged it; move on.
        await this.refreshProgress();
        await this.loadNext("Previous task was already judged; skipped.");
      } else {
        this.state = {
          kind: "retry",
          task,
          verdict,
          message: "Could not reach the service. Your judgment was not recorded twice; retry when ready.",
        };
        this.render();
      }
    }
  }

  retrySubmission(): void {
    if (this.state.kind !== "retry") return;
    void this.submit(this.state.task, this.state.verdict);
  }

  private onKey(event: KeyboardEvent): void {
    if (this.state.kind === "task" && this.state.confirmingTie) {
      if (event.key === "Enter") this.choose("tie");
      if (event.key === "Escape") this.cancelTie();
      return;
    }
    if (event.key === "1") this.choose("left");
    else if (event.key === "2") this.choose("right");
    else if (event.key === "t") this.choose("tie");
  }

  // -- rendering ----------------------------------------------------------

  private render(): void {
    this.root.textContent = "";
    this.root.appendChild(this.renderProgress());
    switch (this.state.kind) {
      case "loading":
        this.root.appendChild(el("p", "status", "Loading…"));
        break;
      case "task":
        this.renderTask(this.state);
        break;
      case "done":
        this.renderDone();
        break;
      case "retry":
        this.renderRetry(this.state.message);
        break;
      case "fatal":
        this.root.appendChild(el("p", "status error", this.state.message));
        break;
    }
    this.root.appendChild(this.renderGuidelines());
  }

  private renderProgress(): HTMLElement {
    const wrapper = el("div", "progress");
    const bar = el("div", "progress-bar");
    bar.id = "progress-bar";
    const fill = el("div", "progress-fill");
    fill.style.width = `${this.progressPercent}%`;
    bar.appendChild(fill);
    wrapper.appendChild(bar);
    const label = el("span", "progress-label", this.progressLabel);
    label.id = "progress-label";
    wrapper.appendChild(label);
    if (this.progressStale) {
      const stale = el("span", "progress-stale", "progress may be stale");
      stale.id = "progress-stale";
      wrapper.appendChild(stale);
    }
    return wrapper;
  }

  private renderTask(state: Extract<State, { kind: "task" }>): void {
    if (state.note) this.root.appendChild(el("p", "note", state.note));
    this.root.appendChild(el("h2", "prompt", "Which sentence is better?"));

    const pair = el("div", "pair");
    pair.appendChild(this.renderSide("left", state.task.left_text, state));
    pair.appendChild(this.renderSide("right", state.task.right_text, state));
    this.root.appendChild(pair);

    const tie = button("tie-button", "Tie (t)", () => this.choose("tie"));
    tie.disabled = state.inFlight;
    this.root.appendChild(tie);

    if (state.confirmingTie) {
      const dialog = el("div", "tie-confirm");
      dialog.id = "tie-confirm";
      dialog.appendChild(
        el(
          "p",
          "",
          "The guidelines ask you to avoid ties unless both sentences are " +
            "equally unusable or exactly identical. Declare a tie anyway?",
        ),
      );
      dialog.appendChild(button("tie-confirm-yes", "Confirm tie", () => this.choose("tie")));
      dialog.appendChild(button("tie-confirm-no", "Go back", () => this.cancelTie()));
      this.root.appendChild(dialog);
    }
  }

  private renderSide(
    side: "left" | "right",
    text: string,
    state: Extract<State, { kind: "task" }>,
  ): HTMLElement {
    const card = el("div", `side ${side}`);
    card.appendChild(el("p", "sentence", text));
    const label = side === "left" ? "Choose left (1)" : "Choose right (2)";
    const pick = button(`choose-${side}`, label, () => this.choose(side));
    pick.disabled = state.inFlight;
    card.appendChild(pick);
    return card;
  }

  private renderDone(): void {
    const done = el("div", "done");
    done.id = "done-screen";
    done.appendChild(el("h2", "", "All comparisons finished"));
    done.appendChild(el("p", "", "Thank you; every task in your queue is judged."));
    this.root.appendChild(done);
  }

  private renderRetry(message: string): void {
    this.root.appendChild(el("p", "status error", message));
    this.root.appendChild(button("retry-button", "Retry", () => this.retrySubmission()));
  }

  private renderGuidelines(): HTMLElement {
    const panel = el("details", "guidelines");
    panel.id = "guidelines-panel";
    if (this.guidelinesOpen) panel.setAttribute("open", "");
    panel.addEventListener("toggle", () => {
      this.guidelinesOpen = (panel as HTMLDetailsElement).open;
    });
    panel.appendChild(el("summary", "", "Annotation guidelines"));
    const body = el("pre", "guidelines-text", this.guidelinesText);
    panel.appendChild(body);
    return panel;
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(id: string, label: string, onClick: () => void): HTMLButtonElement {
  const node = document.createElement("button");
  node.id = id;
  node.textContent = label;
  node.addEventListener("click", onClick);
  return node;
}
