import type {
  FeedbackRuleInfo,
  Instance,
  InstancePage,
  PredictionResponse,
  RuleText,
  SchemaInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    message: string,
    public readonly position?: number,
  ) {
    super(message);
  }
}

export class ConflictError extends Error {
  constructor(public readonly conflictWith: string) {
    super(`conflicts with stored rule ${conflictWith}`);
  }
}

type Fetch = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: Fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const body = await response.json();
    if (response.status === 409) {
      throw new ConflictError(body.conflict_with);
    }
    if (!response.ok) {
      const err = body?.error ?? {};
      throw new ApiError(
        response.status,
        err.kind ?? "error",
        err.message ?? response.statusText,
        err.position,
      );
    }
    return body as T;
  }

  getSchema(): Promise<SchemaInfo> {
    return this.request("/schema");
  }

  predict(instance: Instance): Promise<PredictionResponse> {
    return this.request("/predict", {
      method: "POST",
      body: JSON.stringify({ instance }),
    });
  }

  whatIf(instance: Instance, corrected: RuleText, original?: RuleText): Promise<PredictionResponse> {
    return this.request("/whatif", {
      method: "POST",
      body: JSON.stringify({ instance, clause_override: { corrected, original } }),
    });
  }

  async commitFeedback(corrected: RuleText, original?: RuleText): Promise<string> {
    const body = await this.request<{ id: string }>("/feedback", {
      method: "POST",
      body: JSON.stringify({ corrected, original }),
    });
    return body.id;
  }

  listRules(): Promise<FeedbackRuleInfo[]> {
    return this.request("/rules");
  }

  deleteRule(id: string): Promise<void> {
    return this.request(`/rules/${id}`, { method: "DELETE" });
  }

  listInstances(split: string, offset: number, limit: number): Promise<InstancePage> {
    const params = new URLSearchParams({
      split,
      offset: String(offset),
      limit: String(limit),
    });
    return this.request(`/instances?${params}`);
  }
}
