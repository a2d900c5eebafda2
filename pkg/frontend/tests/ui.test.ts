import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { mount, type ReviewConsole } from "../src/ui.js";

const SELECTION = [
  { feedback_id: "f1", text: "the battery is great.", category: "Positive" },
  { feedback_id: "f2", text: "the screen is terrible.", category: "Negative" },
  { feedback_id: "f3", text: "the camera is great. the speaker is poor.", category: "Mitigated" },
  { feedback_id: "f4", text: "the battery is great. the battery is terrible.", category: "Contradictory" },
];

/** Scripted service: enough routing to play one happy-path session. */
function scriptedService(): FetchLike {
  let trust = 0;
  let votes = 0;
  return async (url, init) => {
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status });
    if (url.endsWith("/users") && init?.method === "POST") {
      return respond(201, { user_id: "alice", trust_degree: 0 });
    }
    if (url.endsWith("/reviews")) {
      return respond(201, {
        session_id: "s000001", user_id: "alice", product_id: "p1",
        state: "Voting", thin: false, selection: SELECTION, votes_cast: 0,
      });
    }
    if (url.includes("/votes")) {
      votes += 1;
      trust += 2;
      return respond(200, {
        session_id: "s000001", user_id: "alice",
        feedback_id: JSON.parse(String(init?.body)).feedback_id,
        choice: "Like", trust_before: trust - 2, trust_after: trust,
      });
    }
    if (url.includes("/finalize")) {
      return respond(200, {
        session_id: "s000001", final_trust: trust, feedback_trustworthiness: trust,
        score_included: true, new_product_score: 4.5,
      });
    }
    if (url.includes("/trust")) {
      return respond(200, {
        user_id: "alice", trust_degree: trust, blacklisted: false,
        blacklist_until: null, retry_after_seconds: null,
      });
    }
    if (url.includes("/score")) {
      return respond(200, {
        product_id: "p1",
        score: votes === SELECTION.length ? 4.5 : "unrated",
        rating_count: votes === SELECTION.length ? 1 : 0,
      });
    }
    throw new Error(`unrouted url ${url}`);
  };
}

function byTestId(id: string): HTMLElement {
  const node = document.querySelector(`[data-testid="${id}"]`);
  if (node === null) {
    throw new Error(`missing [data-testid=${id}]`);
  }
  return node as HTMLElement;
}

async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

describe("review console UI", () => {
  let root: HTMLElement;
  let consoleUi: ReviewConsole;

  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app") as HTMLElement;
  });

  it("offers only selection sizes 4 through 10", () => {
    consoleUi = mount(root, new ApiClient("http://svc", scriptedService()));
    const options = [...byTestId("k-select").querySelectorAll("option")].map((o) => o.value);
    expect(options).toEqual(["4", "5", "6", "7", "8", "9", "10"]);
  });

  it("plays a full session and keeps finalize gated until all votes", async () => {
    consoleUi = mount(root, new ApiClient("http://svc", scriptedService()));
    await consoleUi.submit("alice", "p1", 4.5, "the battery is great.", 4);
    await settle();

    expect(byTestId("voting-view")).toBeTruthy();
    const finalize = byTestId("finalize-button") as HTMLButtonElement;
    expect(finalize.disabled).toBe(true);

    for (const [index, feedback] of SELECTION.entries()) {
      // trustworthiness is never shown alongside the served text
      expect(document.body.innerHTML).not.toContain("trustworthiness");
      (byTestId(`vote-like-${feedback.feedback_id}`) as HTMLButtonElement).click();
      await settle();
      await settle();
      const gate = byTestId("finalize-button") as HTMLButtonElement;
      expect(gate.disabled).toBe(index < SELECTION.length - 1);
    }

    // voted buttons are locked
    expect((byTestId("vote-like-f1") as HTMLButtonElement).disabled).toBe(true);
    expect((byTestId("vote-dislike-f1") as HTMLButtonElement).disabled).toBe(true);

    (byTestId("finalize-button") as HTMLButtonElement).click();
    await settle();
    await settle();
    await settle();

    expect(byTestId("finalized-view")).toBeTruthy();
    expect(byTestId("final-trust").textContent).toBe("final trust: 8");
    expect(byTestId("trust-readout").textContent).toBe("trust: 8");
    expect(byTestId("score-readout").textContent).toBe("score: 4.5");
  });

  it("renders rejections with the error code verbatim", async () => {
    const rejecting: FetchLike = async (url, init) => {
      if (url.endsWith("/users")) {
        return new Response(JSON.stringify({ user_id: "bob", trust_degree: 0 }), { status: 201 });
      }
      if (url.endsWith("/reviews")) {
        return new Response(JSON.stringify({
          code: "discordant",
          message: "rating and review text disagree; submission rejected and user blacklisted",
          retry_after_seconds: 3600,
        }), { status: 409 });
      }
      if (url.includes("/trust")) {
        return new Response(JSON.stringify({
          user_id: "bob", trust_degree: 0, blacklisted: true,
          blacklist_until: 1700003600, retry_after_seconds: 3600,
        }), { status: 200 });
      }
      if (url.includes("/score")) {
        return new Response(JSON.stringify({
          product_id: "p1", score: "unrated", rating_count: 0,
        }), { status: 200 });
      }
      throw new Error(`unrouted url ${url}`);
    };
    consoleUi = mount(root, new ApiClient("http://svc", rejecting));
    await consoleUi.submit("bob", "p1", 1.0, "the battery is great.", 4);
    await settle();

    expect(byTestId("rejected-view")).toBeTruthy();
    expect(byTestId("rejection-code").textContent).toBe("discordant");
    expect(byTestId("retry-after").textContent).toBe("try again in 3600 s");
    expect(byTestId("blacklist-readout").textContent).toBe("blacklisted for 3600 s");
  });
});
