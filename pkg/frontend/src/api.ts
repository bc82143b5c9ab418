/** Typed client for the review service endpoints. */

export interface RepoSummary {
  repository: string;
  total: number;
  bots: number;
  humans: number;
  unknowns: number;
}

export interface ContributorRow {
  repository: string;
  login: string;
  num_comments: number;
  num_empty: number;
  num_patterns: number;
  gini: number;
  pattern_ratio: number;
  predicted: string;
  confidence: number;
  override: string | null;
  effective: string;
  samples: string[];
}

export type OverrideChoice = "bot" | "human" | "clear";

/** Non-2xx response; `status` carries the HTTP code for operator-facing toasts. */
export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") {
      return body.detail;
    }
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await parseDetail(response));
    }
    return (await response.json()) as T;
  }

  getSummaries(): Promise<RepoSummary[]> {
    return this.request<RepoSummary[]>("/api/repos");
  }

  getContributors(repository: string): Promise<ContributorRow[]> {
    const [owner, name] = repository.split("/");
    return this.request<ContributorRow[]>(
      `/api/repos/${encodeURIComponent(owner)}/${encodeURIComponent(name)}/contributors`,
    );
  }

  postOverride(
    repository: string,
    login: string,
    choice: OverrideChoice,
  ): Promise<ContributorRow> {
    return this.request<ContributorRow>("/api/overrides", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ repository, login, type: choice }),
    });
  }
}
