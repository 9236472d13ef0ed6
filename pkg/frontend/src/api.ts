import type { Progress, ReviewTask, Submission, TaskKind } from './types';

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = 'ApiError';
  }
}

/** Bad or missing token: the UI should re-prompt for credentials. */
export class AuthError extends ApiError {
  constructor() {
    super('review token rejected', 401);
    this.name = 'AuthError';
  }
}

/** Transport-level failure: safe to retry, submissions may be queued. */
export class NetworkError extends ApiError {
  constructor(cause: unknown) {
    super(`network failure: ${String(cause)}`);
    this.name = 'NetworkError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ReviewApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = { 'X-Review-Token': this.token };
    if (json) headers['Content-Type'] = 'application/json';
    return headers;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (cause) {
      throw new NetworkError(cause);
    }
    if (response.status === 401) throw new AuthError();
    return response;
  }

  /** Next unseen task for this annotator, or null when all cases are done. */
  async nextTask(annotator: string, kind: TaskKind): Promise<ReviewTask | null> {
    const query = new URLSearchParams({ annotator, kind });
    const response = await this.request(`/api/tasks/next?${query}`, {
      headers: this.headers(),
    });
    if (response.status === 204) return null;
    if (!response.ok) {
      throw new ApiError(await safeDetail(response), response.status);
    }
    return (await response.json()) as ReviewTask;
  }

  /** Submit a completed ranking or verdict; resolves only on 201. */
  async submit(submission: Submission): Promise<void> {
    const response = await this.request('/api/submissions', {
      method: 'POST',
      headers: this.headers(true),
      body: JSON.stringify(submission),
    });
    if (response.status !== 201) {
      throw new ApiError(await safeDetail(response), response.status);
    }
  }

  async progress(): Promise<Progress> {
    const response = await this.request('/api/progress', { headers: this.headers() });
    if (!response.ok) {
      throw new ApiError(await safeDetail(response), response.status);
    }
    return (await response.json()) as Progress;
  }

  /** Raw JSONL export (de-anonymized server-side). */
  async exportText(): Promise<string> {
    const response = await this.request('/api/export', { headers: this.headers() });
    if (!response.ok) {
      throw new ApiError(await safeDetail(response), response.status);
    }
    return response.text();
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body && body.detail !== undefined) return String(body.detail);
  } catch {
    /* non-JSON error body */
  }
  return `request failed with status ${response.status}`;
}
