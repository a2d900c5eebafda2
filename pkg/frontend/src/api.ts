/**
 * Typed client for the trustrep JSON service.
 *
 * Every non-success response carries exactly one error object of shape
 * {code, message, retry_after_seconds?}; it is surfaced verbatim as a
 * ServiceError so views can show the code and message unchanged.
 */

export interface ApiErrorPayload {
  code: string;
  message: string;
  retry_after_seconds?: number | null;
}

export interface ServedFeedback {
  feedback_id: string;
  text: string;
  category: string;
}

export interface SessionPayload {
  session_id: string;
  user_id: string;
  product_id: string;
  state: string;
  thin: boolean;
  selection: ServedFeedback[];
  votes_cast: number;
}

export interface VotePayload {
  session_id: string;
  user_id: string;
  feedback_id: string;
  choice: "Like" | "Dislike";
  trust_before: number;
  trust_after: number;
}

export interface OutcomePayload {
  session_id: string;
  final_trust: number;
  feedback_trustworthiness: number;
  score_included: boolean;
  new_product_score: number | null;
}

export interface TrustPayload {
  user_id: string;
  trust_degree: number;
  blacklisted: boolean;
  blacklist_until: number | null;
  retry_after_seconds: number | null;
}

export interface ScorePayload {
  product_id: string;
  score: number | "unrated";
  rating_count: number;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ApiErrorPayload,
  ) {
    super(`${payload.code}: ${payload.message}`);
    this.name = "ServiceError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ServiceError(response.status, payload as ApiErrorPayload);
    }
    return payload as T;
  }

  createUser(userId: string): Promise<{ user_id: string; trust_degree: number }> {
    return this.request("POST", "/users", { user_id: userId });
  }

  /** Register the user if new; an already-registered id is fine. */
  async ensureUser(userId: string): Promise<void> {
    try {
      await this.createUser(userId);
    } catch (error) {
      if (error instanceof ServiceError && error.payload.code === "duplicate_user") {
        return;
      }
      throw error;
    }
  }

  submitReview(body: {
    user_id: string;
    product_id: string;
    appreciation: number;
    text: string;
    k: number;
  }): Promise<SessionPayload> {
    return this.request("POST", "/reviews", body);
  }

  castVote(
    sessionId: string,
    feedbackId: string,
    choice: "Like" | "Dislike",
  ): Promise<VotePayload> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/votes`, {
      feedback_id: feedbackId,
      choice,
    });
  }

  finalize(sessionId: string): Promise<OutcomePayload> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/finalize`);
  }

  getTrust(userId: string): Promise<TrustPayload> {
    return this.request("GET", `/users/${encodeURIComponent(userId)}/trust`);
  }

  getScore(productId: string): Promise<ScorePayload> {
    return this.request("GET", `/products/${encodeURIComponent(productId)}/score`);
  }
}
