// Thin typed client over the curation API. The fetch function is
// injectable so tests can script responses without a server.

import type {
  ClusterDetail,
  ClusterListPayload,
  Decision,
  DecisionRequest,
  FieldAlignments,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as T;
  }

  listClusters(): Promise<ClusterListPayload> {
    return this.getJson<ClusterListPayload>("/api/clusters");
  }

  clusterDetail(id: number): Promise<ClusterDetail> {
    return this.getJson<ClusterDetail>(`/api/clusters/${id}`);
  }

  fieldAlignments(index: number): Promise<FieldAlignments> {
    return this.getJson<FieldAlignments>(`/api/fields/${index}/alignments`);
  }

  async postDecision(request: DecisionRequest): Promise<Decision> {
    const response = await this.fetchFn(this.baseUrl + "/api/decisions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as Decision;
  }

  async exportMapping(): Promise<string> {
    const response = await this.fetchFn(this.baseUrl + "/api/export");
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return response.text();
  }

  meta(): Promise<Record<string, unknown>> {
    return this.getJson<Record<string, unknown>>("/api/meta");
  }
}
