/**
 * DOM wiring for the review console. One session per page; the view is
 * re-rendered from state after every service response.
 */

import { ApiClient, ServiceError, type ApiErrorPayload } from "./api.js";
import {
  K_CHOICES,
  canFinalize,
  hasVoted,
  initialState,
  pendingVotes,
  reduce,
  type Choice,
  type Event,
  type SessionViewState,
} from "./state.js";

function asApiError(error: unknown): ApiErrorPayload {
  if (error instanceof ServiceError) {
    return error.payload;
  }
  return { code: "network_error", message: String(error) };
}

export class ReviewConsole {
  state: SessionViewState = initialState();

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  dispatch(event: Event): void {
    this.state = reduce(this.state, event);
    this.render();
  }

  /** Pull trust and score from the service and re-render the readouts. */
  async refreshReadouts(userId: string, productId: string): Promise<void> {
    if (userId) {
      try {
        this.dispatch({ kind: "trust-read", trust: await this.client.getTrust(userId) });
      } catch (error) {
        this.dispatch({ kind: "error", error: asApiError(error) });
      }
    }
    if (productId) {
      try {
        this.dispatch({ kind: "score-read", score: await this.client.getScore(productId) });
      } catch (error) {
        this.dispatch({ kind: "error", error: asApiError(error) });
      }
    }
  }

  async submit(
    userId: string,
    productId: string,
    appreciation: number,
    text: string,
    k: number,
  ): Promise<void> {
    try {
      await this.client.ensureUser(userId);
      const session = await this.client.submitReview({
        user_id: userId,
        product_id: productId,
        appreciation,
        text,
        k,
      });
      this.dispatch({ kind: "session-opened", session });
    } catch (error) {
      const payload = asApiError(error);
      if (payload.code === "discordant" || payload.code === "blacklisted") {
        this.dispatch({ kind: "session-rejected", error: payload });
      } else {
        this.dispatch({ kind: "error", error: payload });
      }
    }
    await this.refreshReadouts(userId, productId);
  }

  async vote(feedbackId: string, choice: Choice): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || hasVoted(this.state, feedbackId)) {
      return;
    }
    try {
      await this.client.castVote(sessionId, feedbackId, choice);
      this.dispatch({ kind: "vote-recorded", feedbackId, choice });
      this.dispatch({ kind: "trust-read", trust: await this.client.getTrust(this.state.userId) });
    } catch (error) {
      this.dispatch({ kind: "error", error: asApiError(error) });
    }
  }

  async finalize(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || !canFinalize(this.state)) {
      return;
    }
    try {
      const outcome = await this.client.finalize(sessionId);
      this.dispatch({ kind: "finalized", outcome });
    } catch (error) {
      this.dispatch({ kind: "error", error: asApiError(error) });
    }
    await this.refreshReadouts(this.state.userId, this.state.productId);
  }

  render(): void {
    const state = this.state;
    this.root.replaceChildren(
      this.renderReadouts(state),
      this.renderPhase(state),
      this.renderError(state),
    );
  }

  private renderReadouts(state: SessionViewState): HTMLElement {
    const bar = el("div", { class: "readouts" });
    const trust = state.trust;
    // readouts echo service responses only; nothing is computed here
    bar.append(
      el("span", { class: "readout", "data-testid": "trust-readout" },
        trust === null ? "trust: —" : `trust: ${trust.trust_degree}`),
      el("span", { class: "readout", "data-testid": "score-readout" },
        state.score === null ? "score: —" : `score: ${state.score.score}`),
      el("span", { class: "readout", "data-testid": "rating-count" },
        state.score === null ? "ratings: —" : `ratings: ${state.score.rating_count}`),
    );
    if (trust !== null && trust.blacklisted) {
      bar.append(el("span", { class: "readout blacklisted", "data-testid": "blacklist-readout" },
        `blacklisted for ${trust.retry_after_seconds ?? "?"} s`));
    }
    return bar;
  }

  private renderPhase(state: SessionViewState): HTMLElement {
    switch (state.phase) {
      case "ComposeReview":
        return this.renderCompose();
      case "Voting":
        return this.renderVoting(state);
      case "Finalized":
        return this.renderFinalized(state);
      case "Rejected":
        return this.renderRejected(state);
    }
  }

  private renderCompose(): HTMLElement {
    const form = el("form", { class: "compose", "data-testid": "compose-form" });
    const userInput = input("user-id", "user id");
    const productInput = input("product-id", "product id");
    const appreciationInput = input("appreciation", "rating 1-5");
    appreciationInput.type = "number";
    appreciationInput.min = "1";
    appreciationInput.max = "5";
    appreciationInput.step = "0.5";
    const textArea = el("textarea", {
      "data-testid": "review-text",
      placeholder: "your review",
      rows: "4",
    }) as HTMLTextAreaElement;

    const kSelect = el("select", { "data-testid": "k-select" }) as HTMLSelectElement;
    for (const k of K_CHOICES) {
      kSelect.append(el("option", { value: String(k) }, String(k)));
    }
    kSelect.value = "6";

    const submit = el("button", { type: "submit", "data-testid": "submit-review" },
      "Submit review") as HTMLButtonElement;

    form.append(
      label("User", userInput),
      label("Product", productInput),
      label("Rating", appreciationInput),
      label("Review", textArea),
      label("Feedbacks to judge", kSelect),
      submit,
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(
        userInput.value.trim(),
        productInput.value.trim(),
        Number(appreciationInput.value),
        textArea.value,
        Number(kSelect.value),
      );
    });
    return form;
  }

  private renderVoting(state: SessionViewState): HTMLElement {
    const section = el("section", { class: "voting", "data-testid": "voting-view" });
    section.append(el("h2", {}, `Judge these ${state.served.length} feedbacks`));
    if (state.thin) {
      section.append(el("p", { class: "thin-notice", "data-testid": "thin-notice" },
        "Short stock: fewer feedbacks than requested."));
    }
    const list = el("ul", { class: "served" });
    for (const feedback of state.served) {
      const item = el("li", { class: "feedback", "data-feedback-id": feedback.feedback_id });
      item.append(
        el("span", { class: `badge badge-${feedback.category.toLowerCase()}` },
          feedback.category),
        el("p", { class: "feedback-text" }, feedback.text),
      );
      const voted = state.votes[feedback.feedback_id];
      for (const choice of ["Like", "Dislike"] as const) {
        const button = el("button", {
          type: "button",
          "data-testid": `vote-${choice.toLowerCase()}-${feedback.feedback_id}`,
        }, choice) as HTMLButtonElement;
        button.disabled = voted !== undefined;
        if (voted === choice) {
          button.classList.add("chosen");
        }
        button.addEventListener("click", () => void this.vote(feedback.feedback_id, choice));
        item.append(button);
      }
      list.append(item);
    }
    section.append(list);

    const finalize = el("button", {
      type: "button",
      "data-testid": "finalize-button",
    }, "Finalize session") as HTMLButtonElement;
    finalize.disabled = !canFinalize(state);
    finalize.addEventListener("click", () => void this.finalize());
    section.append(
      el("p", { "data-testid": "pending-votes" }, `${pendingVotes(state)} vote(s) remaining`),
      finalize,
    );
    return section;
  }

  private renderFinalized(state: SessionViewState): HTMLElement {
    const section = el("section", { class: "finalized", "data-testid": "finalized-view" });
    const outcome = state.outcome;
    section.append(el("h2", {}, "Session finalized"));
    if (outcome !== null) {
      section.append(
        el("p", { "data-testid": "final-trust" }, `final trust: ${outcome.final_trust}`),
        el("p", { "data-testid": "outcome-included" },
          outcome.score_included
            ? "your rating entered the product score"
            : "your rating was not included (trust must be positive)"),
      );
    }
    const again = el("button", { type: "button", "data-testid": "new-session" },
      "Start another review") as HTMLButtonElement;
    again.addEventListener("click", () => this.dispatch({ kind: "reset" }));
    section.append(again);
    return section;
  }

  private renderRejected(state: SessionViewState): HTMLElement {
    const section = el("section", { class: "rejected", "data-testid": "rejected-view" });
    section.append(el("h2", {}, "Submission rejected"));
    if (state.error !== null) {
      section.append(
        el("p", { class: "error", "data-testid": "rejection-code" }, state.error.code),
        el("p", { "data-testid": "rejection-message" }, state.error.message),
      );
      if (state.error.retry_after_seconds != null) {
        section.append(el("p", { "data-testid": "retry-after" },
          `try again in ${state.error.retry_after_seconds} s`));
      }
    }
    const again = el("button", { type: "button", "data-testid": "new-session" },
      "Back") as HTMLButtonElement;
    again.addEventListener("click", () => this.dispatch({ kind: "reset" }));
    section.append(again);
    return section;
  }

  private renderError(state: SessionViewState): HTMLElement {
    if (state.error === null || state.phase === "Rejected") {
      return el("div", { class: "error-slot" });
    }
    return el("div", { class: "error-slot" },
      el("p", { class: "error", "data-testid": "error-banner" },
        `${state.error.code}: ${state.error.message}`));
  }
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (string | HTMLElement)[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function input(testId: string, placeholder: string): HTMLInputElement {
  return el("input", { "data-testid": testId, placeholder }) as HTMLInputElement;
}

function label(text: string, control: HTMLElement): HTMLElement {
  const wrapper = el("label", { class: "field" });
  wrapper.append(el("span", {}, text), control);
  return wrapper;
}

export function mount(root: HTMLElement, client: ApiClient): ReviewConsole {
  const console_ = new ReviewConsole(client, root);
  console_.render();
  return console_;
}
