/**
 * Session view state: a small reducer mirroring the server-side session
 * lifecycle (ComposeReview -> Voting -> Finalized, or -> Rejected).
 *
 * The state never computes reputation numbers. Trust and score readouts
 * hold whatever the service last returned; disabling the network merely
 * leaves them stale.
 */

import type {
  ApiErrorPayload,
  OutcomePayload,
  ScorePayload,
  ServedFeedback,
  SessionPayload,
  TrustPayload,
} from "./api.js";

export type Phase = "ComposeReview" | "Voting" | "Finalized" | "Rejected";

export type Choice = "Like" | "Dislike";

export const K_CHOICES = [4, 5, 6, 7, 8, 9, 10] as const;

export interface SessionViewState {
  phase: Phase;
  userId: string;
  productId: string;
  sessionId: string | null;
  served: ServedFeedback[];
  thin: boolean;
  votes: Record<string, Choice>;
  trust: TrustPayload | null;
  score: ScorePayload | null;
  outcome: OutcomePayload | null;
  error: ApiErrorPayload | null;
}

export function initialState(): SessionViewState {
  return {
    phase: "ComposeReview",
    userId: "",
    productId: "",
    sessionId: null,
    served: [],
    thin: false,
    votes: {},
    trust: null,
    score: null,
    outcome: null,
    error: null,
  };
}

export type Event =
  | { kind: "session-opened"; session: SessionPayload }
  | { kind: "session-rejected"; error: ApiErrorPayload }
  | { kind: "vote-recorded"; feedbackId: string; choice: Choice }
  | { kind: "finalized"; outcome: OutcomePayload }
  | { kind: "trust-read"; trust: TrustPayload }
  | { kind: "score-read"; score: ScorePayload }
  | { kind: "error"; error: ApiErrorPayload }
  | { kind: "reset" };

export function reduce(state: SessionViewState, event: Event): SessionViewState {
  switch (event.kind) {
    case "session-opened":
      return {
        ...state,
        phase: "Voting",
        sessionId: event.session.session_id,
        userId: event.session.user_id,
        productId: event.session.product_id,
        served: event.session.selection,
        thin: event.session.thin,
        votes: {},
        outcome: null,
        error: null,
      };
    case "session-rejected":
      return { ...state, phase: "Rejected", error: event.error };
    case "vote-recorded": {
      if (state.phase !== "Voting") {
        return state;
      }
      if (!state.served.some((f) => f.feedback_id === event.feedbackId)) {
        return state;
      }
      if (event.feedbackId in state.votes) {
        return state;
      }
      return {
        ...state,
        votes: { ...state.votes, [event.feedbackId]: event.choice },
      };
    }
    case "finalized":
      return { ...state, phase: "Finalized", outcome: event.outcome, error: null };
    case "trust-read":
      return { ...state, trust: event.trust };
    case "score-read":
      return { ...state, score: event.score };
    case "error":
      return { ...state, error: event.error };
    case "reset":
      return { ...initialState(), trust: state.trust, score: state.score };
  }
}

/** Count of served feedbacks still lacking a vote. */
export function pendingVotes(state: SessionViewState): number {
  return state.served.filter((f) => !(f.feedback_id in state.votes)).length;
}

/** The finalize control is enabled only when every served feedback has a vote. */
export function canFinalize(state: SessionViewState): boolean {
  return state.phase === "Voting" && pendingVotes(state) === 0;
}

export function hasVoted(state: SessionViewState, feedbackId: string): boolean {
  return feedbackId in state.votes;
}
